"""Point-set distances for fine-level matching.

Directed Hausdorff, symmetric Hausdorff and the Modified Hausdorff distance
(MHD, mean of nearest-neighbor distances instead of the max) over 2-D point
sets, plus the thresholded accept/reject decision. The max-based Hausdorff
blows up from a single outlier; MHD dilutes it by the set size, which is why
the decision statistic is MHD.

All three distances are computed with the plain per-pair formula
sqrt(dx*dx + dy*dy) and sequential summation, so they agree bit for bit with
a brute-force double loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import MinutiaeSet, to_core_relative
from .errors import EmptySet

DEFAULT_TAU = 12.0


class Decision(Enum):
    ACCEPT = "accept"
    REJECT = "reject"


def _as_points(points) -> np.ndarray:
    a = np.asarray(points, dtype=np.float64)
    if a.size == 0:
        raise EmptySet("distance over an empty point set")
    return a.reshape(-1, 2)


def _dist_table(m: np.ndarray, n: np.ndarray) -> np.ndarray:
    dx = m[:, 0][:, None] - n[:, 0][None, :]
    dy = m[:, 1][:, None] - n[:, 1][None, :]
    return np.sqrt(dx * dx + dy * dy)


def _seq_mean(values: np.ndarray) -> float:
    # Sequential (left-to-right) accumulation; np.sum's pairwise reduction
    # would drift from a brute-force loop by an ulp.
    total = 0.0
    for v in values.tolist():
        total += v
    return total / len(values)


def directed_hausdorff(m_points, n_points) -> float:
    """max over M of the distance to the nearest point of N."""
    table = _dist_table(_as_points(m_points), _as_points(n_points))
    return float(table.min(axis=1).max())


def hausdorff(m_points, n_points) -> float:
    """Symmetric Hausdorff: max of the two directed distances."""
    table = _dist_table(_as_points(m_points), _as_points(n_points))
    return float(max(table.min(axis=1).max(), table.min(axis=0).max()))


def modified_hausdorff(m_points, n_points) -> float:
    """MHD: max over both directions of the mean nearest-neighbor distance."""
    table = _dist_table(_as_points(m_points), _as_points(n_points))
    return max(_seq_mean(table.min(axis=1)), _seq_mean(table.min(axis=0)))


@dataclass(frozen=True)
class MatchScore:
    """All four distances for one probe/template comparison."""

    hausdorff: float
    mhd: float
    directed_ab: float
    directed_ba: float
    decision: Decision
    threshold_used: float

    def __post_init__(self):
        if self.hausdorff != max(self.directed_ab, self.directed_ba):
            raise ValueError("hausdorff must equal the larger directed distance")
        if not (0.0 <= self.mhd <= self.hausdorff + 1e-12):
            raise ValueError("mhd must lie in [0, hausdorff]")


def score_point_sets(a_points, b_points, tau: float) -> MatchScore:
    """Score two raw point arrays; Accept iff MHD <= tau."""
    a = _as_points(a_points)
    b = _as_points(b_points)
    table = _dist_table(a, b)
    row_min = table.min(axis=1)
    col_min = table.min(axis=0)
    d_ab = float(row_min.max())
    d_ba = float(col_min.max())
    mhd = max(_seq_mean(row_min), _seq_mean(col_min))
    decision = Decision.ACCEPT if mhd <= tau else Decision.REJECT
    return MatchScore(
        hausdorff=max(d_ab, d_ba),
        mhd=mhd,
        directed_ab=d_ab,
        directed_ba=d_ba,
        decision=decision,
        threshold_used=tau,
    )


def match_decision(probe: MinutiaeSet, template: MinutiaeSet, tau: float = DEFAULT_TAU) -> MatchScore:
    """Compare two impressions in core-relative coordinates.

    Only coordinates enter the distances (directions and minutia kind do
    not). Both sets need a core point; emptiness signals upstream failure
    and raises instead of returning infinity.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if len(probe) == 0 or len(template) == 0:
        raise EmptySet("matching requires non-empty minutiae sets")
    a = to_core_relative(probe).coords()
    b = to_core_relative(template).coords()
    return score_point_sets(a, b, tau)
