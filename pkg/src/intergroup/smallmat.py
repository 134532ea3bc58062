"""Small dense symmetric linear algebra backing the quadratic-form measure.

Matrices here are m1 x m1 with m1 the size of rater group A, so plain numpy
arrays and LAPACK's symmetric eigensolver are enough.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, SingularMatrix, TooFewVectors

RANK_RTOL = 1e-10
INVERSE_MODES = ("pseudo", "strict")


@dataclass(frozen=True, eq=False)
class EigenSummary:
    values: np.ndarray  # descending
    vectors: np.ndarray  # columns match ``values``
    rank: int

    @property
    def largest(self) -> float:
        return float(self.values[0])


def as_symmetric(s, tol: float = 1e-12) -> np.ndarray:
    s = np.array(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise InputError(f"expected a square matrix, got shape {s.shape}")
    scale = max(1.0, float(np.abs(s).max(initial=0.0)))
    if np.abs(s - s.T).max(initial=0.0) > tol * scale:
        raise InputError("matrix is not symmetric")
    return (s + s.T) / 2


def covariance_matrix(vectors) -> np.ndarray:
    """Sample covariance (denominator N - 1) of N row vectors.

    Every entry is an exactly rounded sum, so reordering the vectors leaves the
    result bit-for-bit unchanged.
    """
    v = np.asarray(vectors, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    n, d = v.shape
    if n < 2:
        raise TooFewVectors(f"covariance needs at least 2 vectors, got {n}")
    means = np.array([math.fsum(v[:, p]) / n for p in range(d)])
    dev = v - means
    s = np.empty((d, d))
    for p in range(d):
        for q in range(p, d):
            s[p, q] = s[q, p] = math.fsum(dev[:, p] * dev[:, q]) / (n - 1)
    return s


def rank_tolerance(values: np.ndarray) -> float:
    top = float(np.max(values, initial=0.0))
    return len(values) * top * RANK_RTOL if top > 0 else 0.0


def sym_eigen(s) -> EigenSummary:
    s = as_symmetric(s)
    values, vectors = np.linalg.eigh(s)
    order = np.argsort(values)[::-1]
    values, vectors = values[order], vectors[:, order]
    tol = rank_tolerance(values)
    rank = int(np.sum(values > tol)) if values[0] > 0 else 0
    return EigenSummary(values, vectors, rank)


def spd_inverse(s, mode: str = "strict") -> np.ndarray:
    """Inverse of a covariance matrix.

    ``strict`` refuses rank-deficient input; ``pseudo`` inverts only the
    eigenvalues above the rank tolerance (Moore-Penrose for symmetric input).
    """
    if mode not in INVERSE_MODES:
        raise InputError(f"unknown inverse mode {mode!r}; expected one of {INVERSE_MODES}")
    eig = sym_eigen(s)
    d = len(eig.values)
    if mode == "strict":
        if eig.rank < d:
            raise SingularMatrix(
                f"covariance matrix has rank {eig.rank} < {d}; two raters are collinear"
            )
        return as_symmetric(np.linalg.inv(as_symmetric(s)), tol=1e-6)
    kept = eig.vectors[:, : eig.rank]
    inv = (kept / eig.values[: eig.rank]) @ kept.T
    return (inv + inv.T) / 2
