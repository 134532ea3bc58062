"""Command line front end: CSV input, summary reports and plot data.

Usage::

    intergroup analyze --input table1.csv --group-a EC1,EC2,EC3 \\
        --group-b NC1,NC2,NC3 --scale 1..5 --bootstrap 1000 --seed 42 --out report.md
    intergroup scatter --input table1.csv --group-a ... --group-b ... --scale 1..5 --out scatter.csv
    intergroup hist --report report.md --out-dir hist/
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    AgreementError,
    DuplicateSubjectId,
    InputError,
    NoBootstrapData,
    OutOfScaleCode,
    ParseError,
    UnknownColumn,
)
from .measures import ALL_MEASURES, MEASURE_NAMES, MeasureOptions, compute
from .ratings import MEASURE_IDS, GroupedRatings, RatingScale, validate_grouped_ratings
from .resampling import bootstrap, histogram_bins, jackknife

JSON_FENCE = "```json"

# natural range of each measure, used only to clamp displayed interval ends
VALUE_RANGE = {m: (-1.0, 1.0) for m in ALL_MEASURES}
VALUE_RANGE.update(pam=(0.0, 1.0), dm=(0.0, 1.0), proportion=(0.0, 1.0))


def bundled_table1() -> Path:
    return Path(__file__).with_name("data") / "table1.csv"


def _split_columns(spec) -> list[str]:
    if isinstance(spec, str):
        return [c.strip() for c in spec.split(",") if c.strip()]
    return list(spec)


def parse_ratings_csv(path, group_a_columns, group_b_columns, scale) -> GroupedRatings:
    """Read a header + one row per subject CSV; the first column is the subject id."""
    path = Path(path)
    if isinstance(scale, str):
        scale = RatingScale.parse(scale)
    group_a = _split_columns(group_a_columns)
    group_b = _split_columns(group_b_columns)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path} is empty") from None
        body = [row for row in reader if any(cell.strip() for cell in row)]

    for name in group_a + group_b:
        if name not in header[1:]:
            raise UnknownColumn(f"column {name!r} not found; available: {', '.join(header[1:])}")
    col_index = [header.index(name) for name in group_a + group_b]
    allowed = set(scale.labels)
    matrix, ids = [], []
    seen = set()
    for line, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(row)}", row=line)
        subject = row[0].strip()
        if subject in seen:
            raise DuplicateSubjectId(f"subject id {subject!r} repeated at row {line}")
        seen.add(subject)
        ids.append(subject)
        values = []
        for c in col_index:
            cell = row[c].strip()
            if not cell:
                raise ParseError("missing rating", row=line, column=header[c])
            try:
                value = int(cell)
            except ValueError:
                raise ParseError(f"malformed rating {cell!r}", row=line, column=header[c]) from None
            if value not in allowed:
                raise OutOfScaleCode(
                    f"rating {value} outside {scale.describe()} (row {line}, column {header[c]!r})"
                )
            values.append(value)
        matrix.append(values)
    m1 = len(group_a)
    return validate_grouped_ratings(
        matrix,
        range(m1),
        range(m1, m1 + len(group_b)),
        scale,
        rater_labels=group_a + group_b,
        subject_ids=ids,
    )


def _round(x: float, places: int) -> str:
    return str(Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


@dataclass
class AnalysisReport:
    records: list[dict]
    metadata: dict = field(default_factory=dict)

    def record(self, measure_id: str) -> dict:
        for rec in self.records:
            if rec["measure_id"] == measure_id:
                return rec
        raise KeyError(measure_id)

    def table(self) -> str:
        lines = [
            "| Method | Agreement value | Mean (ps) | SE | CI |",
            "|---|---|---|---|---|",
        ]
        for rec in self.records:
            jk = rec["jackknife"]
            lo, hi = jk["ci95_display"]
            lines.append(
                f"| {MEASURE_NAMES[rec['measure_id']]} | {_round(rec['value'], 3)} "
                f"| {_round(jk['ps_mean'], 3)} | {_round(jk['se'], 3)} "
                f"| ({_round(lo, 4)}, {_round(hi, 4)}) |"
            )
        return "\n".join(lines)

    def bootstrap_table(self) -> str:
        rows = [r for r in self.records if r.get("bootstrap")]
        if not rows:
            return ""
        lines = [
            "| Method | Mean | SD | Skewness | 2.5% | 97.5% |",
            "|---|---|---|---|---|---|",
        ]
        for rec in rows:
            bs = rec["bootstrap"]
            lo, hi = bs["quantile_ci95"]
            lines.append(
                f"| {MEASURE_NAMES[rec['measure_id']]} | {_round(bs['mean'], 3)} | {_round(bs['sd'], 3)} "
                f"| {_round(bs['skewness'], 3)} | {_round(lo, 4)} | {_round(hi, 4)} |"
            )
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {"metadata": self.metadata, "measures": self.records}

    def render(self) -> str:
        meta = self.metadata
        parts = [
            "# Intergroup agreement report",
            "",
            f"subjects: {meta.get('n')}, group A: {meta.get('m1')} raters, group B: {meta.get('m2')} raters",
            "",
            "## Jackknife (pseudo-values)",
            "",
            self.table(),
        ]
        boot = self.bootstrap_table()
        if boot:
            parts += ["", f"## Bootstrap (b = {meta.get('bootstrap')}, seed = {meta.get('seed')})", "", boot]
        parts += [
            "",
            "Interval ends are clamped to each measure's range for display; raw ends are in the data below.",
            "",
            "## Data",
            "",
            JSON_FENCE,
            json.dumps(self.to_dict(), indent=1, sort_keys=True),
            "```",
            "",
        ]
        return "\n".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "AnalysisReport":
        try:
            start = text.index(JSON_FENCE) + len(JSON_FENCE)
            end = text.index("```", start)
            data = json.loads(text[start:end])
        except ValueError as exc:
            raise ParseError(f"report has no readable data section: {exc}") from None
        return cls(data["measures"], data["metadata"])


def _clamp(x, lo, hi):
    return min(max(x, lo), hi)


def analyze(
    g: GroupedRatings,
    measures=MEASURE_IDS,
    options: MeasureOptions | None = None,
    b: int = 0,
    seed: int = 0,
    bins: int = 20,
    workers: int = 1,
    metadata: dict | None = None,
) -> AnalysisReport:
    """Point estimate, jackknife and (when ``b > 0``) bootstrap for each measure."""
    options = options or MeasureOptions()
    measures = list(measures)
    if not measures:
        raise InputError("select at least one measure")
    records = []
    for m in measures:
        if m not in ALL_MEASURES:
            raise InputError(f"unknown measure {m!r}; expected one of {', '.join(ALL_MEASURES)}")
        try:
            result = compute(g, m, options)
            jk = jackknife(g, m, options)
            bs = bootstrap(g, m, b, seed, options, bins, workers) if b > 0 else None
        except AgreementError as exc:
            exc.args = (f"{m}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
            raise
        lo, hi = VALUE_RANGE[m]
        rec = {
            "measure_id": m,
            "name": MEASURE_NAMES[m],
            "value": result.value,
            "conventions": list(result.conventions),
            "jackknife": {
                "ps_mean": jk.ps_mean,
                "se": jk.se,
                "ci95_raw": list(jk.ci95),
                "ci95_display": [_clamp(jk.ci95[0], lo, hi), _clamp(jk.ci95[1], lo, hi)],
                "theta_bar": jk.theta_bar,
                "var_jackknife": jk.var_jackknife,
                "bias": jk.bias_hat,
                "theta_jack": jk.theta_jack,
                "leave_one_out": jk.leave_one_out.tolist(),
            },
        }
        if bs is not None:
            rec["bootstrap"] = {
                "b": bs.b,
                "mean": bs.mean,
                "sd": bs.sd,
                "skewness": bs.skewness,
                "quantile_ci95": list(bs.quantile_ci95),
                "histogram": {"edges": bs.histogram.edges.tolist(), "counts": bs.histogram.counts.tolist()},
                "values": [None if np.isnan(v) else v for v in bs.values.tolist()],
                "failures": [list(f) for f in bs.failures],
            }
        records.append(rec)
    meta = {
        "n": g.n,
        "m1": g.m1,
        "m2": g.m2,
        "scale": g.scale.describe(),
        "raters": list(g.rater_labels),
        "bootstrap": b,
        "seed": seed,
        "bins": bins,
        "options": {
            "inverse": options.inverse,
            "normalizer": options.normalizer,
            "agreement": options.agreement,
            "alpha_metric": options.alpha_metric,
            "mode_ties": options.mode_ties,
        },
        "tool_version": __version__,
    }
    meta.update(metadata or {})
    return AnalysisReport(records, meta)


def scatter_data(g: GroupedRatings) -> list[tuple[int, int, int]]:
    """(group-A rating, group-B rating, count) over all n * m1 * m2 cross pairs."""
    a = np.broadcast_to(g.a[:, :, None], (g.n, g.m1, g.m2)).ravel()
    b = np.broadcast_to(g.b[:, None, :], (g.n, g.m1, g.m2)).ravel()
    labels = g.scale.labels
    tally = Counter(zip(a.tolist(), b.tolist()))
    return [(labels[x - 1], labels[y - 1], c) for (x, y), c in sorted(tally.items())]


def write_scatter(g: GroupedRatings, path) -> None:
    lines = ["a,b,count"] + [f"{x},{y},{c}" for x, y, c in scatter_data(g)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def emit_histograms(report: AnalysisReport, path, bins: int | None = None) -> list[Path]:
    """Write ``<measure>.hist.csv`` (left,right,count) per bootstrapped measure."""
    out_dir = Path(path)
    with_boot = [r for r in report.records if r.get("bootstrap")]
    if not with_boot:
        raise NoBootstrapData("report has no bootstrap replicates; rerun analyze with --bootstrap")
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for rec in with_boot:
        hist = rec["bootstrap"]["histogram"]
        if bins is not None:
            values = [v for v in rec["bootstrap"]["values"] if v is not None]
            h = histogram_bins(values, bins)
            hist = {"edges": h.edges.tolist(), "counts": h.counts.tolist()}
        edges, counts = hist["edges"], hist["counts"]
        lines = ["left,right,count"] + [
            f"{edges[i]!r},{edges[i + 1]!r},{counts[i]}" for i in range(len(counts))
        ]
        target = out_dir / f"{rec['measure_id']}.hist.csv"
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(target)
    return written


def _parse_measures(text: str) -> list[str]:
    if text == "all":
        return list(MEASURE_IDS)
    return _split_columns(text)


def _add_input_args(p):
    p.add_argument("--input", required=True, help="CSV: header row, subject id first")
    p.add_argument("--group-a", required=True, help="comma-separated group A columns")
    p.add_argument("--group-b", required=True, help="comma-separated group B columns")
    p.add_argument("--scale", required=True, help="category range, e.g. 1..5")
    p.add_argument("--nominal", action="store_true", help="treat categories as unordered")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intergroup", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="point estimates, jackknife and bootstrap")
    _add_input_args(p)
    p.add_argument("--measures", default="all", help=f"'all' or a list from: {', '.join(ALL_MEASURES)}")
    p.add_argument("--bootstrap", type=int, default=0, metavar="B", help="bootstrap replicates (0 = skip)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inverse", choices=("pseudo", "drop", "strict"), default="pseudo")
    p.add_argument("--alpha-metric", choices=("ordinal", "interval", "nominal"), default="ordinal")
    p.add_argument("--agreement", choices=("alpha", "fleiss"), default="alpha", help="within-group Agr for crpm")
    p.add_argument("--mode-ties", choices=("drop", "median"), default="drop")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="report path (default: stdout)")

    p = sub.add_parser("scatter", help="cross-group rating pair counts")
    _add_input_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("hist", help="histogram files from a bootstrap report")
    p.add_argument("--report", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--bins", type=int, help="re-bin the stored replicates")
    return parser


def _load(args) -> tuple[GroupedRatings, str]:
    scale = RatingScale.parse(args.scale, ordered=not args.nominal)
    g = parse_ratings_csv(args.input, args.group_a, args.group_b, scale)
    digest = hashlib.sha256(Path(args.input).read_bytes()).hexdigest()
    return g, digest


def run(args) -> None:
    if args.command == "analyze":
        g, digest = _load(args)
        options = MeasureOptions(
            inverse=args.inverse,
            agreement=args.agreement,
            alpha_metric=args.alpha_metric,
            mode_ties=args.mode_ties,
        )
        report = analyze(
            g,
            _parse_measures(args.measures),
            options,
            b=args.bootstrap,
            seed=args.seed,
            bins=args.bins,
            workers=args.workers,
            metadata={"input_sha256": digest},
        )
        text = report.render()
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    elif args.command == "scatter":
        g, _ = _load(args)
        write_scatter(g, args.out)
    elif args.command == "hist":
        report = AnalysisReport.from_text(Path(args.report).read_text(encoding="utf-8"))
        emit_histograms(report, args.out_dir, args.bins)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run(args)
    except (InputError, OSError) as exc:
        print(f"error kind=input type={type(exc).__name__} message={exc}", file=sys.stderr)
        return 1
    except AgreementError as exc:
        print(f"error kind=numerical type={type(exc).__name__} message={exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
