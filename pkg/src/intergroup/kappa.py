"""Two-rater agreement: contingency tables and (weighted) Cohen's kappa.

Weights are stored as integer numerators over a common denominator so the
observed and chance agreement are exact rationals; the only rounding happens
in the final division.  That keeps kappa <= 1 exactly and makes the value
independent of the order in which items were tallied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMarginals, InvalidK, LengthMismatch, OutOfScaleCode

DEGENERATE_PERFECT = "kappa: constant identical sequences, defined as 1"


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    k: int
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: "ContingencyTable") -> "ContingencyTable":
        if self.k != other.k:
            raise InvalidK("cannot add tables over different scales")
        return ContingencyTable(self.k, self.counts + other.counts)


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Agreement weights ``numerators / denominator`` (diagonal = 1)."""

    numerators: np.ndarray
    denominator: int

    @property
    def k(self) -> int:
        return self.numerators.shape[0]

    @property
    def values(self) -> np.ndarray:
        return self.numerators / self.denominator


def contingency_table(x, y, k: int) -> ContingencyTable:
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"sequences differ in shape: {x.shape} vs {y.shape}")
    if x.size == 0:
        raise LengthMismatch("sequences are empty")
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    for seq in (x, y):
        if seq.min() < 1 or seq.max() > k:
            raise OutOfScaleCode(f"codes must lie in 1..{k}")
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (x - 1, y - 1), 1)
    return ContingencyTable(k, counts)


def identity_weights(k: int) -> WeightMatrix:
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    return WeightMatrix(np.eye(k, dtype=np.int64), 1)


def linear_weight_matrix(k: int) -> WeightMatrix:
    """``w[r, c] = 1 - |r - c| / (k - 1)``."""
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    idx = np.arange(k)
    return WeightMatrix((k - 1) - np.abs(idx[:, None] - idx[None, :]), k - 1)


def weighted_kappa(t: ContingencyTable, w: WeightMatrix, flags: list | None = None) -> float:
    """Chance-corrected agreement ``(p_o - p_e) / (1 - p_e)`` under weights ``w``.

    When the marginals force ``p_e = 1`` (both raters constant on the same
    category) the value is defined as 1 and a flag is appended to ``flags``.
    """
    if w.k != t.k:
        raise InvalidK(f"weight matrix is {w.k}x{w.k} but table is {t.k}x{t.k}")
    counts = t.counts.astype(object)
    total = int(t.counts.sum())
    if total < 1:
        raise LengthMismatch("empty contingency table")
    num = w.numerators.astype(object)
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    # p_o = obs / (D N), p_e = exp / (D N^2)
    obs = int((num * counts).sum())
    exp = int(rows @ num @ cols)
    scale = w.denominator * total * total
    if exp == scale:
        if obs * total == exp:
            if flags is not None:
                flags.append(DEGENERATE_PERFECT)
            return 1.0
        raise DegenerateMarginals("chance agreement is 1 but observed agreement is not")
    return (obs * total - exp) / (scale - exp)


def cohen_kappa(t: ContingencyTable, flags: list | None = None) -> float:
    return weighted_kappa(t, identity_weights(t.k), flags)
