"""Agreement within one group of raters: Fleiss' kappa and Krippendorff's alpha.

Both kernels take an n x m matrix of codes 1..k with no missing cells and
accumulate integer tallies, so results do not depend on the order of
subjects or raters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateExpected, InputError, InvalidK, OutOfScaleCode, SingleRater

METRICS = ("ordinal", "interval", "nominal")
FLEISS_SINGLE_CATEGORY = "fleiss: every rating in one category, defined as 1"
ALPHA_NO_VARIATION = "alpha: no variation in ratings, defined as 1"


def _as_codes(ratings, k, min_raters=2):
    r = np.asarray(ratings, dtype=np.int64)
    if r.ndim != 2:
        raise InputError("ratings must be a 2-d subjects x raters matrix")
    if r.shape[1] < min_raters:
        raise SingleRater(f"need at least 2 raters, got {r.shape[1]}")
    if r.shape[0] < 1:
        raise InputError("need at least one subject")
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if r.min() < 1 or r.max() > k:
        raise OutOfScaleCode(f"codes must lie in 1..{k}")
    return r


def category_counts(ratings, k: int) -> np.ndarray:
    """n x k matrix: raters assigning subject u to category c."""
    r = _as_codes(ratings, k, min_raters=1)
    counts = np.zeros((r.shape[0], k), dtype=np.int64)
    np.add.at(counts, (np.repeat(np.arange(r.shape[0]), r.shape[1]), r.ravel() - 1), 1)
    return counts


def fleiss_kappa(counts, flags: list | None = None) -> float:
    counts = np.asarray(counts, dtype=np.int64)
    per_row = counts.sum(axis=1)
    m = int(per_row[0])
    if np.any(per_row != m):
        raise InputError("every subject must be rated by the same number of raters")
    if m < 2:
        raise SingleRater(f"need at least 2 raters, got {m}")
    n = counts.shape[0]
    c = counts.astype(object)
    # P-bar = agree / (n m (m-1)), P_e = expected / (n m)^2
    agree = int((c * c).sum()) - n * m
    margins = c.sum(axis=0)
    expected = int((margins * margins).sum())
    nm = n * m
    if expected == nm * nm:
        if agree == n * m * (m - 1):
            if flags is not None:
                flags.append(FLEISS_SINGLE_CATEGORY)
            return 1.0
        raise DegenerateExpected("chance agreement is 1 but observed agreement is not")
    return (agree * nm * nm - expected * n * m * (m - 1)) / (n * m * (m - 1) * (nm * nm - expected))


@dataclass(frozen=True, eq=False)
class CoincidenceMatrix:
    """Pairing credits ``o = pairs / (m - 1)``, kept as integer pair tallies."""

    pairs: np.ndarray
    m: int

    @property
    def values(self) -> np.ndarray:
        return self.pairs / (self.m - 1)

    @property
    def margins(self) -> np.ndarray:
        # with complete data every value is paired m - 1 times, so these are integers
        return self.pairs.sum(axis=1) // (self.m - 1)

    @property
    def total(self) -> int:
        return int(self.margins.sum())


def coincidence_matrix(ratings, k: int) -> CoincidenceMatrix:
    r = _as_codes(ratings, k)
    counts = category_counts(r, k)
    pairs = counts.T @ counts - np.diag(counts.sum(axis=0))
    return CoincidenceMatrix(pairs, r.shape[1])


def _delta4(margins: np.ndarray, metric: str) -> np.ndarray:
    """Four times the squared difference function (keeps ordinal values integral)."""
    k = len(margins)
    idx = np.arange(k)
    if metric == "nominal":
        return 4 * (idx[:, None] != idx[None, :]).astype(np.int64)
    if metric == "interval":
        return 4 * (idx[:, None] - idx[None, :]) ** 2
    if metric == "ordinal":
        cum = np.concatenate([[0], np.cumsum(margins)])
        lo = np.minimum(idx[:, None], idx[None, :])
        hi = np.maximum(idx[:, None], idx[None, :])
        spanned = cum[hi + 1] - cum[lo]
        return (2 * spanned - margins[:, None] - margins[None, :]) ** 2
    raise InputError(f"unknown metric {metric!r}; expected one of {METRICS}")


def krippendorff_alpha(ratings, k: int, metric: str = "ordinal", flags: list | None = None) -> float:
    """``1 - D_o / D_e`` from the coincidence matrix of a complete rating matrix."""
    cm = coincidence_matrix(ratings, k)
    margins = cm.margins
    d4 = _delta4(margins, metric).astype(object)
    observed = int((cm.pairs.astype(object) * d4).sum())
    m_obj = margins.astype(object)
    expected = int((np.outer(m_obj, m_obj) * d4).sum())
    if expected == 0:
        if flags is not None:
            flags.append(ALPHA_NO_VARIATION)
        return 1.0
    total = cm.total
    return 1.0 - (total - 1) * observed / ((cm.m - 1) * expected)
