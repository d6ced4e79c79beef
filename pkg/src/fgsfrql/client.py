import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path

from fgsfrql.models.config import TrainConfig
from fgsfrql.models.records import (
    CHECKPOINT_FILE,
    STEPS_FILE,
    SUMMARY_FILE,
    RunRecord,
    write_step_log,
    write_summary,
)
from fgsfrql.models.suite import ExperimentSuite
from fgsfrql.plotting import emit_plots
from fgsfrql.successor import save_checkpoint
from fgsfrql.trainer import train
from fgsfrql.utils import worker_limit

logger = logging.getLogger(__name__)


def write_run(record: RunRecord, directory) -> Path:
    """Write steps.csv, summary.json and checkpoint.zip of a finished run."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_step_log(record.rows, directory / STEPS_FILE)
    write_summary(record, directory / SUMMARY_FILE)
    if record.model is not None:
        save_checkpoint(record.model, str(directory / CHECKPOINT_FILE))
    return directory


def _run_member(config: TrainConfig, directory: str) -> str:
    # module-level so worker processes can unpickle it
    write_run(train(config), directory)
    return directory


class ExperimentClient(object):
    """Runs configurations and suites, writing their artifacts under output_dir."""

    def __init__(self, output_dir="results"):
        self.output_dir = Path(output_dir)

    def run_directory(self, config: TrainConfig) -> Path:
        return self.output_dir / f"{config.algorithm}-{config.env}-seed{config.seed}"

    def train(self, config: TrainConfig, directory=None) -> RunRecord:
        record = train(config)
        directory = write_run(record, directory or self.run_directory(config))
        logger.info("Run written to %s", directory)
        return record

    def run_suite(self, suite: ExperimentSuite, workers=None):
        """Run every (run, seed) member, then draw the suite's charts.

        Members run in up to ``workers`` processes (default: the
        FG_SFRQL_THREADS cap). Returns the member run directories.
        """
        suite.validate()
        workers = workers or worker_limit()
        members = [(config, str(suite.output_dir / run_id)) for run_id, config in suite.member_runs()]
        logger.info("Suite: %d member runs on %d worker(s)", len(members), workers)

        if workers == 1:
            done = [_run_member(config, directory) for config, directory in members]
        else:
            done = []
            with ProcessPoolExecutor(max_workers=workers) as ex:
                futures = {ex.submit(_run_member, config, directory): directory for config, directory in members}
                for future in as_completed(futures):
                    done.append(future.result())
                    logger.info("Finished %s (%d/%d)", futures[future], len(done), len(members))

        for plot in suite.plots:
            emit_plots(suite.run_directories(plot.inputs), plot.kind, suite.output_dir / plot.out, suite.colors)
        return [Path(directory) for _, directory in members]
