"""
Experiment suite description.

A suite file (YAML or JSON) lists named runs, the seeds every run is
repeated with, an output directory and the charts to draw:

    output_dir: results/four_rooms
    seeds: [0, 1, 2, 3, 4]
    runs:
      - name: fg
        algorithm: fg_sfdqn_alg1
        env: four_rooms
      - name: sf
        algorithm: sfdqn
        env: four_rooms
    plots:
      - kind: cumulative
        inputs: [fg, sf]
        out: cumulative.svg
    colors:
      sfdqn: "#ff7f0e"
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

from fgsfrql.errors import ConfigurationError
from fgsfrql.models.config import TrainConfig
from fgsfrql.models.constants import ALGORITHM_COLORS, Algorithm, PlotKind
from fgsfrql.validators import validate_choice, validate_hex_color


@dataclass(frozen=True)
class PlotSpec:
    """One chart: its kind, the run names it draws from and its file name."""

    kind: str
    inputs: Tuple[str, ...]
    out: str

    def json_dict(self):
        return {"kind": self.kind, "inputs": list(self.inputs), "out": self.out}


@dataclass
class ExperimentSuite:
    """Named runs x seeds, plus charts over their outputs.

    Attributes:
        runs (dict): Run name -> TrainConfig (its seed is replaced per member run)
        seeds (list): Seeds every run is repeated with
        output_dir (Path): Root of all run directories and charts
        plots (list): PlotSpecs
        colors (dict): Algorithm -> hex color for charts
    """

    runs: Dict[str, TrainConfig]
    seeds: List[int]
    output_dir: Path
    plots: List[PlotSpec] = field(default_factory=list)
    colors: Dict[str, str] = field(default_factory=lambda: dict(ALGORITHM_COLORS))

    @staticmethod
    def run_id(name: str, seed: int) -> str:
        return f"{name}-seed{seed}"

    def member_runs(self):
        """(run_id, TrainConfig) for every run and seed, in file order."""
        members = []
        for name, config in self.runs.items():
            for seed in self.seeds:
                values = config.json_dict()
                values["seed"] = seed
                members.append((self.run_id(name, seed), TrainConfig.from_dict(values)))
        return members

    def run_directories(self, names):
        return [self.output_dir / self.run_id(name, seed) for name in names for seed in self.seeds]

    def validate(self) -> bool:
        """Check run names, seeds, plots and colors.

        Raises:
            ConfigurationError: If a plot references an unknown run or a
                field is malformed
        """
        if not self.runs:
            raise ConfigurationError("Suite has no runs")
        if not self.seeds:
            raise ConfigurationError("Suite has no seeds")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigurationError(f"Suite seeds repeat: {self.seeds}")
        for config in self.runs.values():
            config.validate()
        for plot in self.plots:
            validate_choice("plot kind", plot.kind, PlotKind.ALL)
            missing = [name for name in plot.inputs if name not in self.runs]
            if missing:
                raise ConfigurationError(f"Plot {plot.out} references unknown runs: {missing}")
            if not plot.inputs:
                raise ConfigurationError(f"Plot {plot.out} has no inputs")
        for algorithm, color in self.colors.items():
            validate_choice("color algorithm", algorithm, Algorithm.ALL)
            validate_hex_color(color)
        return True

    @classmethod
    def from_dict(cls, data: dict, base_dir=".") -> "ExperimentSuite":
        """Build from a parsed suite file; relative output_dir resolves against base_dir.

        Raises:
            ConfigurationError: If the structure is malformed
        """
        if not isinstance(data, dict):
            raise ConfigurationError("Suite file must hold a mapping")
        unknown = sorted(set(data) - {"runs", "seeds", "output_dir", "plots", "colors"})
        if unknown:
            raise ConfigurationError(f"Unknown suite keys: {', '.join(unknown)}")

        runs = {}
        for index, entry in enumerate(data.get("runs") or []):
            entry = dict(entry)
            name = str(entry.pop("name", f"run{index}"))
            if name in runs:
                raise ConfigurationError(f"Duplicate run name {name!r}")
            runs[name] = TrainConfig.from_dict(entry)

        plots = [
            PlotSpec(kind=p.get("kind"), inputs=tuple(p.get("inputs") or ()), out=str(p.get("out", f"plot{i}.svg")))
            for i, p in enumerate(data.get("plots") or [])
        ]
        colors = dict(ALGORITHM_COLORS)
        colors.update(data.get("colors") or {})

        seeds = data.get("seeds", [0])
        if not isinstance(seeds, list) or any(isinstance(s, bool) or not isinstance(s, int) for s in seeds):
            raise ConfigurationError(f"seeds must be a list of integers, got {seeds!r}")

        output_dir = Path(data.get("output_dir", "results"))
        if not output_dir.is_absolute():
            output_dir = Path(base_dir) / output_dir

        suite = cls(runs=runs, seeds=seeds, output_dir=output_dir, plots=plots, colors=colors)
        suite.validate()
        return suite

    def json_dict(self):
        return {
            "runs": [dict(name=name, **config.json_dict()) for name, config in self.runs.items()],
            "seeds": list(self.seeds),
            "output_dir": str(self.output_dir),
            "plots": [p.json_dict() for p in self.plots],
            "colors": dict(self.colors),
        }
