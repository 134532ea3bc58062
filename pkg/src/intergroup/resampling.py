"""Jackknife (pseudo-value) and bootstrap engines over subjects.

Both engines resample whole subject rows, so every rater's score for a
subject stays together.  A measure is either a measure id understood by
:func:`intergroup.measures.compute` or any callable taking a
:class:`GroupedRatings` and returning a float or :class:`MeasureResult`.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .errors import AgreementError, EmptyInput, InputError, SubsampleDegenerate, TooFewSubjects, ZeroVariance
from .measures import MeasureOptions, compute
from .ratings import GroupedRatings, MeasureResult

Z95 = 1.96


def _evaluator(measure, options):
    if callable(measure):
        return measure
    return partial(compute, measure_id=measure, options=options)


def _value(result) -> float:
    return result.value if isinstance(result, MeasureResult) else float(result)


def normal_two_sided_p(z: float) -> float:
    return math.erfc(abs(z) / math.sqrt(2.0))


@dataclass(frozen=True, eq=False)
class JackknifeReport:
    theta_hat: float
    leave_one_out: np.ndarray
    theta_bar: float
    var_jackknife: float
    bias_hat: float
    theta_jack: float
    pseudo_values: np.ndarray
    ps_mean: float
    ps_var: float
    se: float
    ci95: tuple[float, float]

    @property
    def n(self) -> int:
        return len(self.leave_one_out)

    def z_stat(self, theta0: float) -> float:
        return z_test(self, theta0)[0]


def jackknife(g: GroupedRatings, measure, options: MeasureOptions | None = None) -> JackknifeReport:
    """Leave-one-subject-out estimates, pseudo-values and a normal 95% interval."""
    n = g.n
    if n < 3:
        raise TooFewSubjects(f"jackknife needs at least 3 subjects, got {n}")
    evaluate = _evaluator(measure, options)
    theta_hat = _value(evaluate(g))
    loo = np.empty(n)
    everyone = np.arange(n)
    for i in range(n):
        try:
            loo[i] = _value(evaluate(g.take(np.delete(everyone, i))))
        except AgreementError as exc:
            raise SubsampleDegenerate(
                f"measure undefined without subject {g.subject_ids[i]!r}: {exc}", subject=i
            ) from exc
    theta_bar = math.fsum(loo) / n
    var_jk = (n - 1) / n * math.fsum((loo - theta_bar) ** 2)
    pseudo = n * theta_hat - (n - 1) * loo
    ps_mean = math.fsum(pseudo) / n
    ps_var = math.fsum((pseudo - ps_mean) ** 2) / (n - 1)
    se = math.sqrt(ps_var / n)
    return JackknifeReport(
        theta_hat=theta_hat,
        leave_one_out=loo,
        theta_bar=theta_bar,
        var_jackknife=var_jk,
        bias_hat=(n - 1) * (theta_bar - theta_hat),
        theta_jack=n * theta_hat - (n - 1) * theta_bar,
        pseudo_values=pseudo,
        ps_mean=ps_mean,
        ps_var=ps_var,
        se=se,
        ci95=(ps_mean - Z95 * se, ps_mean + Z95 * se),
    )


def z_test(report: JackknifeReport, theta0: float) -> tuple[float, float]:
    """z = (mean pseudo-value - theta0) / se and its two-sided normal p-value."""
    if report.se == 0:
        raise ZeroVariance("pseudo-values have zero variance")
    z = (report.ps_mean - theta0) / report.se
    return z, normal_two_sided_p(z)


@dataclass(frozen=True, eq=False)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray


def histogram_bins(values, bin_count: int = 20) -> Histogram:
    """Equal-width bins over [min, max]; bins are half-open except the last.

    A constant sample gets one bin of width 1 centred on the value.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise EmptyInput("cannot bin an empty sample")
    if bin_count < 1:
        raise InputError("bin_count must be >= 1")
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        return Histogram(np.array([lo - 0.5, lo + 0.5]), np.array([v.size]))
    counts, edges = np.histogram(v, bins=bin_count, range=(lo, hi))
    return Histogram(edges, counts)


@dataclass(frozen=True, eq=False)
class BootstrapReport:
    b: int
    seed: int
    values: np.ndarray
    quantile_ci95: tuple[float, float]
    mean: float
    sd: float
    skewness: float
    histogram: Histogram
    failures: tuple[tuple[int, str], ...] = field(default_factory=tuple)


def replicate_rows(n: int, seed: int, r: int) -> np.ndarray:
    """Subject indices for replicate ``r``; depends only on (seed, r)."""
    rng = np.random.default_rng([seed, r])
    return rng.integers(0, n, size=n)


def _run_replicates(g, measure, options, seed, replicates):
    evaluate = _evaluator(measure, options)
    out = []
    for r in replicates:
        try:
            out.append((_value(evaluate(g.take(replicate_rows(g.n, seed, r)))), None))
        except AgreementError as exc:
            out.append((math.nan, f"{type(exc).__name__}: {exc}"))
    return out


def skewness(values) -> float:
    """Moment coefficient of skewness, m3 / m2**1.5."""
    v = np.asarray(values, dtype=float)
    dev = v - v.mean()
    m2 = np.mean(dev**2)
    if m2 == 0:
        return 0.0
    return float(np.mean(dev**3) / m2**1.5)


def bootstrap(
    g: GroupedRatings,
    measure,
    b: int = 1000,
    seed: int = 0,
    options: MeasureOptions | None = None,
    bins: int = 20,
    workers: int = 1,
) -> BootstrapReport:
    """Resample n subjects with replacement ``b`` times.

    Replicates whose measure is undefined are kept as NaN and listed in
    ``failures``; summaries use the finite replicates.  Results are identical
    for any ``workers`` count.
    """
    if b < 1:
        raise InputError("bootstrap needs b >= 1")
    if g.n < 2:
        raise TooFewSubjects("bootstrap needs at least 2 subjects")
    if workers > 1:
        chunks = [range(start, b, workers) for start in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_replicates, *zip(*[(g, measure, options, seed, c) for c in chunks])))
        results = [None] * b
        for chunk, part in zip(chunks, parts):
            for r, item in zip(chunk, part):
                results[r] = item
    else:
        results = _run_replicates(g, measure, options, seed, range(b))
    values = np.array([v for v, _ in results])
    failures = tuple((r, msg) for r, (_, msg) in enumerate(results) if msg is not None)
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        raise SubsampleDegenerate("the measure was undefined on every bootstrap replicate")
    lo, hi = np.quantile(finite, [0.025, 0.975])
    return BootstrapReport(
        b=b,
        seed=seed,
        values=values,
        quantile_ci95=(float(lo), float(hi)),
        mean=float(finite.mean()),
        sd=float(finite.std(ddof=1)) if finite.size > 1 else 0.0,
        skewness=skewness(finite),
        histogram=histogram_bins(finite, bins),
        failures=failures,
    )
