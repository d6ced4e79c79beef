"""
Bounded FIFO replay with a pivot index.

Transitions get consecutive sequence numbers and live in a ring of
``capacity`` slots (slot = seq % capacity). The pivot index maps each
pivot_key to the sequence numbers of live transitions with that key, oldest
first, so eviction only ever pops the front of one bucket.
"""

import logging
from collections import deque
from pathlib import Path
from typing import Deque, Dict, Hashable, List

import numpy as np

from fgsfrql.errors import UsageError
from fgsfrql.models.constants import DEFAULT_BUFFER_CAPACITY
from fgsfrql.models.tasks import Transition
from fgsfrql.validators import validate_positive

logger = logging.getLogger(__name__)


class ReplayBuffer:
    """FIFO transition store with uniform and pivot-conditional sampling.

    Args:
        capacity (int): Maximum number of stored transitions

    Example:
        >>> buf = ReplayBuffer(capacity=2)
        >>> len(buf)
        0
    """

    def __init__(self, capacity: int = DEFAULT_BUFFER_CAPACITY):
        validate_positive("capacity", capacity)
        self.capacity = int(capacity)
        self._slots: List[Transition] = [None] * self.capacity
        self._first = 0  # sequence number of the oldest live transition
        self._next = 0  # sequence number the next push receives
        self._index: Dict[Hashable, Deque[int]] = {}

    def __len__(self) -> int:
        return self._next - self._first

    def _at(self, seq: int) -> Transition:
        return self._slots[seq % self.capacity]

    def clear(self) -> None:
        self._slots = [None] * self.capacity
        self._first = self._next = 0
        self._index = {}

    def push(self, t: Transition) -> None:
        """Append a transition, evicting the oldest at capacity."""
        if len(self) == self.capacity:
            oldest = self._at(self._first)
            bucket = self._index[oldest.pivot_key]
            bucket.popleft()
            if not bucket:
                del self._index[oldest.pivot_key]
            self._first += 1
        self._slots[self._next % self.capacity] = t
        self._index.setdefault(t.pivot_key, deque()).append(self._next)
        self._next += 1

    def sample(self, batch_size: int, rng) -> List[Transition]:
        """Uniform sample with replacement.

        Raises:
            UsageError: If the buffer is empty
        """
        if len(self) == 0:
            raise UsageError("Cannot sample from an empty replay buffer")
        offsets = rng.integers(len(self), size=batch_size)
        return [self._at(self._first + int(k)) for k in offsets]

    def sample_pivot_key(self, rng) -> Hashable:
        """Pivot key of a uniformly drawn stored transition.

        Raises:
            UsageError: If the buffer is empty
        """
        if len(self) == 0:
            raise UsageError("Cannot sample a pivot from an empty replay buffer")
        return self._at(self._first + int(rng.integers(len(self)))).pivot_key

    def pivot_count(self, pivot_key: Hashable) -> int:
        return len(self._index.get(pivot_key, ()))

    def sample_pivot_batch(self, pivot_key: Hashable, n: int, rng) -> List[Transition]:
        """Up to n transitions stored under pivot_key.

        A bucket holding more than n transitions is sampled without
        replacement; a smaller bucket is returned whole, oldest first, so a
        result shorter than n tells the caller to skip its update. An absent
        key gives an empty list.
        """
        validate_positive("n", n)
        bucket = self._index.get(pivot_key)
        if not bucket:
            return []
        if len(bucket) <= n:
            return [self._at(seq) for seq in bucket]
        chosen = rng.choice(len(bucket), size=n, replace=False)
        return [self._at(bucket[int(k)]) for k in chosen]

    def audit(self) -> bool:
        """Check that the pivot index matches storage exactly.

        Raises:
            UsageError: On any stale, foreign or missing index entry
        """
        indexed = 0
        for key, bucket in self._index.items():
            if not bucket:
                raise UsageError(f"Empty bucket left in pivot index for {key!r}")
            previous = self._first - 1
            for seq in bucket:
                if not self._first <= seq < self._next:
                    raise UsageError(f"Pivot index points at evicted sequence {seq}")
                if seq <= previous:
                    raise UsageError(f"Pivot bucket out of order at sequence {seq}")
                if self._at(seq).pivot_key != key:
                    raise UsageError(f"Sequence {seq} is indexed under the wrong pivot key")
                previous = seq
            indexed += len(bucket)
        if indexed != len(self):
            raise UsageError(f"Pivot index covers {indexed} of {len(self)} transitions")
        return True

    def dump(self, path) -> Path:
        """Write all stored transitions, oldest first, to a compressed .npz archive.

        Pivot keys are not stored; they are a function of (s, a).
        """
        path = Path(path)
        stored = [self._at(seq) for seq in range(self._first, self._next)]
        if stored:
            arrays = {
                "s": np.stack([t.s for t in stored]).astype('<f8'),
                "a": np.array([t.a for t in stored], dtype='<i8'),
                "r": np.array([t.r for t in stored], dtype='<f8'),
                "s_next": np.stack([t.s_next for t in stored]).astype('<f8'),
                "features": np.stack([t.features for t in stored]).astype('<f8'),
                "terminal": np.array([t.terminal for t in stored], dtype=bool),
                "task_id": np.array([t.task_id for t in stored], dtype='<i8'),
            }
        else:
            arrays = {}
        with open(path, "wb") as fh:
            np.savez_compressed(fh, **arrays)
        logger.info("Dumped %d transitions to %s", len(stored), path)
        return path
