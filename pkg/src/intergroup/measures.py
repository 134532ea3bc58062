"""The eight intergroup agreement measures.

Proposed measures: ``pam`` (one minus the quadratic-form disagreement),
``crpm`` (cube root of the product of within-group agreements), ``pairwise``
and ``pooled`` (Cohen's kappa across groups).  Baselines: ``proportion``,
``vanbelle``, ``consensus_median`` and ``consensus_mode``.

Every function maps a :class:`GroupedRatings` to a :class:`MeasureResult`
whose ``conventions`` list how undefined corners were resolved.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    AllZeroVectors,
    DegenerateExpected,
    InputError,
    NumericalError,
    SingleRaterGroup,
    SingularMatrix,
)
from .kappa import contingency_table, identity_weights, linear_weight_matrix, weighted_kappa
from .multirater import METRICS, category_counts, fleiss_kappa, krippendorff_alpha
from .ratings import MEASURE_IDS, GroupedRatings, MeasureResult
from .smallmat import covariance_matrix, spd_inverse, sym_eigen

DM_INVERSE_MODES = ("pseudo", "drop", "strict")
NORMALIZERS = ("inverse", "covariance")
AGREEMENT_METHODS = ("alpha", "fleiss")
MODE_TIE_RULES = ("drop", "median")

# column permutations are enumerated up to this many group-A raters
_CANONICAL_MAX_DIM = 6


@dataclass(frozen=True)
class MeasureOptions:
    inverse: str = "pseudo"
    normalizer: str = "inverse"
    agreement: str = "alpha"
    alpha_metric: str = "ordinal"
    mode_ties: str = "drop"

    def __post_init__(self):
        for name, allowed in (
            ("inverse", DM_INVERSE_MODES),
            ("normalizer", NORMALIZERS),
            ("agreement", AGREEMENT_METHODS),
            ("alpha_metric", METRICS),
            ("mode_ties", MODE_TIE_RULES),
        ):
            if getattr(self, name) not in allowed:
                raise InputError(f"{name} must be one of {allowed}, got {getattr(self, name)!r}")


def _weights(g: GroupedRatings):
    return linear_weight_matrix(g.k) if g.scale.ordered else identity_weights(g.k)


def _weight_tag(g: GroupedRatings) -> str:
    return "weights: linear" if g.scale.ordered else "weights: none (nominal scale)"


def _dedupe(flags):
    return tuple(dict.fromkeys(flags))


# -- Cohen's kappa across groups -------------------------------------------


def pairwise_measure(g: GroupedRatings) -> MeasureResult:
    """Mean weighted kappa over all m1 * m2 cross-group rater pairs."""
    w = _weights(g)
    flags = [_weight_tag(g)]
    kappas = [
        weighted_kappa(contingency_table(g.a[:, i], g.b[:, j], g.k), w, flags)
        for i in range(g.m1)
        for j in range(g.m2)
    ]
    return MeasureResult("pairwise", math.fsum(kappas) / len(kappas), _dedupe(flags))


def pooled_table(g: GroupedRatings):
    table = contingency_table(g.a[:, 0], g.b[:, 0], g.k)
    for i in range(g.m1):
        for j in range(g.m2):
            if i or j:
                table = table + contingency_table(g.a[:, i], g.b[:, j], g.k)
    return table


def pooled_measure(g: GroupedRatings) -> MeasureResult:
    """Weighted kappa of the single table pooling every cross-group pair."""
    flags = [_weight_tag(g), "pooling: all cross-group pairs"]
    value = weighted_kappa(pooled_table(g), _weights(g), flags)
    return MeasureResult("pooled", value, _dedupe(flags))


# -- cube root of product ---------------------------------------------------


def intragroup_agreement(ratings, k: int, method: str = "alpha", metric: str = "ordinal", flags=None):
    if method == "alpha":
        return krippendorff_alpha(ratings, k, metric, flags)
    if method == "fleiss":
        return fleiss_kappa(category_counts(ratings, k), flags)
    raise InputError(f"unknown agreement method {method!r}")


def crpm(g: GroupedRatings, agreement: str = "alpha", metric: str = "ordinal") -> MeasureResult:
    """Real cube root of Agr(A) * Agr(B) * Agr(A u B); keeps the product's sign."""
    if g.m1 < 2 or g.m2 < 2:
        raise SingleRaterGroup("within-group agreement needs at least 2 raters in each group")
    flags = [f"agr: krippendorff alpha ({metric})" if agreement == "alpha" else "agr: fleiss kappa"]
    agr_a = intragroup_agreement(g.a, g.k, agreement, metric, flags)
    agr_b = intragroup_agreement(g.b, g.k, agreement, metric, flags)
    agr_ab = intragroup_agreement(g.combined, g.k, agreement, metric, flags)
    return MeasureResult("crpm", float(np.cbrt(agr_a * agr_b * agr_ab)), _dedupe(flags))


# -- quadratic-form disagreement -------------------------------------------


@dataclass(frozen=True, eq=False)
class DiffVectorSet:
    """Difference vectors ``X[j, k] = A[k, :] - B[k, j]`` with their covariance.

    ``vectors`` rows are in a canonical order (see :func:`_canonical`), and
    their components follow ``columns`` (group-A rater indices).  Use
    :meth:`vector` for lookups by (group-B rater, subject).
    """

    vectors: np.ndarray
    columns: tuple[int, ...]
    index: dict
    s: np.ndarray
    inv_s: np.ndarray
    lambda1: float
    conventions: tuple[str, ...] = field(default_factory=tuple)

    def vector(self, j: int, k: int) -> np.ndarray:
        """Components ordered as group-A raters; dropped raters are omitted."""
        row = self.vectors[self.index[(j, k)]]
        order = np.argsort(self.columns)
        return row[order]


def raw_diff_vectors(g: GroupedRatings) -> np.ndarray:
    """(m2 * n) x m1 integer array, row ``k * m2 + j`` is X_jk."""
    return (g.a[:, None, :] - g.b[:, :, None]).reshape(g.n * g.m2, g.m1)


def _canonical(x: np.ndarray):
    """Representative of ``x`` under row and column permutations.

    Returns (row order, column order).  Computing on the canonical form makes
    the measure bit-for-bit invariant to subject and rater order, which plain
    floating-point evaluation would only give up to rounding.
    """
    d = x.shape[1]
    if d <= _CANONICAL_MAX_DIM:
        perms = itertools.permutations(range(d))
    else:
        key = [(tuple(np.sort(x[:, p])), p) for p in range(d)]
        perms = [tuple(p for _, p in sorted(key))]
    best = None
    for perm in perms:
        cols = list(perm)
        y = x[:, cols]
        rows = np.lexsort(y.T[::-1])
        candidate = y[rows].tobytes()
        if best is None or candidate < best[0]:
            best = (candidate, rows, cols)
    return best[1], best[2]


def _drop_collinear(x: np.ndarray):
    """Greedily keep the columns that raise the covariance rank."""
    kept = []
    for p in range(x.shape[1]):
        trial = kept + [p]
        if sym_eigen(covariance_matrix(x[:, trial])).rank == len(trial):
            kept = trial
    return kept


def build_diff_vectors(
    g: GroupedRatings, inverse_mode: str = "pseudo", normalizer: str = "inverse"
) -> DiffVectorSet:
    if inverse_mode not in DM_INVERSE_MODES:
        raise InputError(f"inverse mode must be one of {DM_INVERSE_MODES}, got {inverse_mode!r}")
    if normalizer not in NORMALIZERS:
        raise InputError(f"normalizer must be one of {NORMALIZERS}, got {normalizer!r}")
    raw = raw_diff_vectors(g)
    if not raw.any():
        raise AllZeroVectors("every difference vector is zero")
    rows, cols = _canonical(raw)
    x = raw[rows][:, cols]
    index = {(int(r % g.m2), int(r // g.m2)): pos for pos, r in enumerate(rows)}
    flags = [f"inverse: {inverse_mode}", f"lambda1: largest eigenvalue of {'S^-1' if normalizer == 'inverse' else 'S'}"]
    if g.m1 == 1:
        flags.append("dm: single group-A rater, S is a scalar variance")

    if inverse_mode == "drop":
        kept = _drop_collinear(x)
        if len(kept) < x.shape[1]:
            dropped = sorted(g.rater_labels[cols[p]] for p in range(x.shape[1]) if p not in kept)
            flags.append("dropped collinear raters: " + ",".join(dropped))
        if kept:
            x = x[:, kept]
            cols = [cols[p] for p in kept]
    s = covariance_matrix(x)
    eig = sym_eigen(s)
    if eig.rank == 0:
        if inverse_mode == "strict":
            raise SingularMatrix("covariance of the difference vectors is zero")
        inv_s = np.zeros_like(s)
        lam = 0.0
    else:
        inv_s = spd_inverse(s, "strict" if inverse_mode in ("strict", "drop") else "pseudo")
        if normalizer == "inverse":
            lam = sym_eigen(inv_s).largest
        else:
            lam = eig.largest
    return DiffVectorSet(x, tuple(int(c) for c in cols), index, s, inv_s, lam, tuple(flags))


def _quadratic_ratios(x: np.ndarray, inv_s: np.ndarray) -> np.ndarray:
    xf = x.astype(float)
    q = np.einsum("ni,ij,nj->n", xf, inv_s, xf)
    xx = (x * x).sum(axis=1)
    out = np.zeros(len(x))
    nz = xx > 0
    out[nz] = q[nz] / xx[nz]
    return out


def disagreement_measure(
    g: GroupedRatings, inverse_mode: str = "pseudo", normalizer: str = "inverse"
) -> tuple[MeasureResult, MeasureResult]:
    """(Dm, PAm): mean of X'S^-1X / X'X over all difference vectors, over lambda1."""
    try:
        dv = build_diff_vectors(g, inverse_mode, normalizer)
    except AllZeroVectors:
        flags = ("dm: all difference vectors zero, Dm = 0",)
        return MeasureResult("dm", 0.0, flags), MeasureResult("pam", 1.0, flags)
    flags = list(dv.conventions)
    if dv.lambda1 == 0.0:
        # identical nonzero vectors: every comparison disagrees and S carries no shape
        flags.append("dm: constant nonzero difference vectors, Dm = 1")
        dm = 1.0
    else:
        ratios = _quadratic_ratios(dv.vectors, dv.inv_s)
        if not np.all(ratios[(dv.vectors != 0).any(axis=1)] > 0):
            flags.append("dm: some nonzero vectors lie in the null space of S")
        dm = math.fsum(ratios) / len(ratios) / dv.lambda1
    if (dv.vectors == 0).all(axis=1).any():
        flags.append("dm: zero difference vectors contribute 0")
    flags = _dedupe(flags)
    return MeasureResult("dm", dm, flags), MeasureResult("pam", 1.0 - dm, flags)


def pam_measure(g: GroupedRatings, inverse_mode: str = "pseudo", normalizer: str = "inverse") -> MeasureResult:
    return disagreement_measure(g, inverse_mode, normalizer)[1]


# -- literature baselines ---------------------------------------------------


def proportion_fraction(g: GroupedRatings) -> Fraction:
    agree = int((g.a[:, :, None] == g.b[:, None, :]).sum())
    return Fraction(agree, g.n * g.m1 * g.m2)


def proportion_agreement(g: GroupedRatings) -> MeasureResult:
    return MeasureResult("proportion", float(proportion_fraction(g)), ("exact match only",))


VANBELLE_PERFECT = "vanbelle: maximum and chance agreement coincide at 1, defined as 1"


def vanbelle_measure(g: GroupedRatings) -> MeasureResult:
    """Two-group weighted kappa, corrected by the maximum attainable agreement.

    With p_k^A, p_k^B the per-subject rating distributions of each group:
    p_o = mean_k p_k^A' W p_k^B, p_e = pbar^A' W pbar^B and
    p_m = mean_k max(p_k^A' W p_k^A, p_k^B' W p_k^B); kappa = (p_o - p_e) / (p_m - p_e).
    All three are scaled to a common integer denominator before dividing.
    """
    w = _weights(g)
    num = w.numerators.astype(object)
    ca = category_counts(g.a, g.k).astype(object)
    cb = category_counts(g.b, g.k).astype(object)
    n, m1, m2 = g.n, g.m1, g.m2
    po = n * m1 * m2 * int(((ca @ num) * cb).sum())
    pe = m1 * m2 * int(ca.sum(axis=0) @ num @ cb.sum(axis=0))
    self_a = ((ca @ num) * ca).sum(axis=1) * (m2 * m2)
    self_b = ((cb @ num) * cb).sum(axis=1) * (m1 * m1)
    pm = n * sum(max(int(x), int(y)) for x, y in zip(self_a, self_b))
    flags = [_weight_tag(g), "normalized by maximum attainable agreement"]
    if pm == pe:
        if po == pm:
            flags.append(VANBELLE_PERFECT)
            return MeasureResult("vanbelle", 1.0, tuple(flags))
        raise DegenerateExpected("maximum attainable agreement equals chance agreement")
    return MeasureResult("vanbelle", (po - pe) / (pm - pe), tuple(flags))


@dataclass(frozen=True, eq=False)
class ConsensusSeries:
    a: np.ndarray
    b: np.ndarray
    rule: str
    tie_events: int
    subjects: np.ndarray  # indices of subjects kept


def _lower_median(row: np.ndarray) -> int:
    s = np.sort(row)
    return int(s[(len(s) - 1) // 2])


def _unique_mode(row: np.ndarray, k: int):
    counts = np.bincount(row, minlength=k + 1)
    top = counts.max()
    winners = np.flatnonzero(counts == top)
    return int(winners[0]) if len(winners) == 1 else None


def consensus_series(g: GroupedRatings, rule: str = "median", ties: str = "drop") -> ConsensusSeries:
    """One consensus code per subject and group.

    ``median`` takes the lower median (the middle value for odd group sizes).
    ``mode`` needs a unique modal category; a subject where either group has
    none is dropped (``ties="drop"``) or falls back to that group's median.
    """
    if rule == "median":
        if not g.scale.ordered:
            raise InputError("median consensus needs an ordinal scale")
        a = np.array([_lower_median(r) for r in g.a])
        b = np.array([_lower_median(r) for r in g.b])
        return ConsensusSeries(a, b, rule, 0, np.arange(g.n))
    if rule != "mode":
        raise InputError(f"unknown consensus rule {rule!r}")
    if ties not in MODE_TIE_RULES:
        raise InputError(f"mode tie rule must be one of {MODE_TIE_RULES}, got {ties!r}")
    a, b, keep = [], [], []
    tie_events = 0
    for idx in range(g.n):
        ma, mb = _unique_mode(g.a[idx], g.k), _unique_mode(g.b[idx], g.k)
        tie_events += (ma is None) + (mb is None)
        if ma is None or mb is None:
            if ties == "drop":
                continue
            ma = _lower_median(g.a[idx]) if ma is None else ma
            mb = _lower_median(g.b[idx]) if mb is None else mb
        a.append(ma)
        b.append(mb)
        keep.append(idx)
    return ConsensusSeries(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64), rule, tie_events, np.array(keep))


def consensus_measure(g: GroupedRatings, rule: str = "median", ties: str = "drop") -> MeasureResult:
    series = consensus_series(g, rule, ties)
    if len(series.subjects) == 0:
        raise NumericalError("no subject has a unique modal rating in both groups")
    flags = [_weight_tag(g), f"consensus: {rule}"]
    if rule == "median" and (g.m1 % 2 == 0 or g.m2 % 2 == 0):
        flags.append("median: lower middle value for even group sizes")
    if rule == "mode":
        flags.append(f"mode ties: {ties} ({series.tie_events} events)")
    value = weighted_kappa(contingency_table(series.a, series.b, g.k), _weights(g), flags)
    return MeasureResult(f"consensus_{rule}", value, _dedupe(flags))


# -- registry --------------------------------------------------------------

MEASURE_NAMES = {
    "pam": "Proposed Agreement Measure (1 - Dm)",
    "crpm": "Cube Root of Product Measure",
    "pairwise": "Pairwise Agreement Measure",
    "pooled": "Pooled Agreement Measure",
    "proportion": "Proportion Agreement Measure",
    "vanbelle": "Vanbelle's Generalized Measure",
    "consensus_median": "Consensus (Median) Measure",
    "consensus_mode": "Consensus (Mode) Measure",
    "dm": "Disagreement Measure (Dm)",
}

ALL_MEASURES = MEASURE_IDS + ("dm",)


def compute(g: GroupedRatings, measure_id: str, options: MeasureOptions | None = None) -> MeasureResult:
    opts = options or MeasureOptions()
    if measure_id == "pam":
        result = pam_measure(g, opts.inverse, opts.normalizer)
    elif measure_id == "dm":
        result = disagreement_measure(g, opts.inverse, opts.normalizer)[0]
    elif measure_id == "crpm":
        result = crpm(g, opts.agreement, opts.alpha_metric)
    elif measure_id == "pairwise":
        result = pairwise_measure(g)
    elif measure_id == "pooled":
        result = pooled_measure(g)
    elif measure_id == "proportion":
        result = proportion_agreement(g)
    elif measure_id == "vanbelle":
        result = vanbelle_measure(g)
    elif measure_id == "consensus_median":
        result = consensus_measure(g, "median")
    elif measure_id == "consensus_mode":
        result = consensus_measure(g, "mode", opts.mode_ties)
    else:
        raise InputError(f"unknown measure {measure_id!r}; expected one of {ALL_MEASURES}")
    if g.conventions:
        result = MeasureResult(result.measure_id, result.value, result.conventions + g.conventions)
    return result
