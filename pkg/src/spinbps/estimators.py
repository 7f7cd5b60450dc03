"""Moment estimation from weighted spin observations."""

from __future__ import annotations

import numpy as np

from .oracle import MomentTable

__all__ = ["MomentAccumulator"]


class MomentAccumulator:
    """Accumulates duration- or count-weighted first and second spin moments.

    Event-driven samplers feed it (spin vector, segment duration) pairs via
    ``add_segment``; discrete-time samplers feed equally weighted samples via
    ``add_sample``.  ``finalize`` normalizes to a MomentTable, and ``merge``
    combines accumulators from independent runs of the same model.

    The accumulator draws no conclusions about uncertainty: it keeps sums,
    not histories, so variance diagnostics must be built outside (for
    example by batching segments into several accumulators).
    """

    def __init__(self, dim: int, include_second: bool = True):
        if dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {dim}")
        self.dim = dim
        self.include_second = include_second
        self.weighted_first = np.zeros(dim)
        self.weighted_second = np.zeros((dim, dim)) if include_second else None
        self.total_weight = 0.0

    def add_segment(self, s, duration: float) -> None:
        """Add a stretch of ``duration`` time units spent in spin state ``s``."""
        if not duration > 0.0:
            raise ValueError(f"segment duration must be positive, got {duration}")
        sv = np.asarray(s, dtype=float)
        self.weighted_first += duration * sv
        if self.weighted_second is not None:
            self.weighted_second += duration * (sv[:, None] * sv[None, :])
        self.total_weight += duration

    def add_sample(self, s) -> None:
        """Add one equally weighted sample of spin state ``s``."""
        self.add_segment(s, 1.0)

    def merge(self, other: "MomentAccumulator") -> None:
        """Fold another accumulator's sums into this one."""
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        if other.include_second != self.include_second:
            raise ValueError("cannot merge accumulators with different moment layouts")
        self.weighted_first += other.weighted_first
        if self.weighted_second is not None:
            self.weighted_second += other.weighted_second
        self.total_weight += other.total_weight

    def finalize(self) -> MomentTable:
        """Normalize the sums into a MomentTable.

        Spin entries are +-1, so estimates land in [-1, 1] up to float
        rounding; they are clipped back in.  The second moment matrix is made
        exactly symmetric with a unit diagonal.  Raises ValueError if nothing
        was accumulated.
        """
        if not self.total_weight > 0.0:
            raise ValueError("cannot finalize an empty accumulator")
        first = np.clip(self.weighted_first / self.total_weight, -1.0, 1.0)
        second = None
        if self.weighted_second is not None:
            second = self.weighted_second / self.total_weight
            second = np.clip(0.5 * (second + second.T), -1.0, 1.0)
            np.fill_diagonal(second, 1.0)
        return MomentTable(first=first, second=second, total_weight=self.total_weight)
