"""Validated data model for two groups of raters scoring the same subjects."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    EmptyGroup,
    InputError,
    InvalidK,
    MissingValue,
    OutOfScaleCode,
    TooFewSubjects,
)

MEASURE_IDS = (
    "pam",
    "crpm",
    "pairwise",
    "pooled",
    "proportion",
    "vanbelle",
    "consensus_median",
    "consensus_mode",
)


@dataclass(frozen=True)
class RatingScale:
    """Ordered category codes 1..k.

    ``labels`` holds the values used in the raw data for codes 1..k, so a
    scale written as ``0..4`` still computes on codes 1..5.
    """

    k: int
    ordered: bool = True
    labels: tuple[int, ...] | None = None

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise InvalidK(f"a rating scale needs at least 2 categories, got k={self.k}")
        labels = tuple(range(1, self.k + 1)) if self.labels is None else tuple(self.labels)
        if len(labels) != self.k or len(set(labels)) != self.k:
            raise InvalidK(f"scale labels {labels!r} do not name {self.k} distinct categories")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_range(cls, lo: int, hi: int, ordered: bool = True) -> "RatingScale":
        return cls(hi - lo + 1, ordered, tuple(range(lo, hi + 1)))

    @classmethod
    def parse(cls, text: str, ordered: bool = True) -> "RatingScale":
        """Parse ``"lo..hi"``."""
        try:
            lo, hi = (int(part) for part in text.split(".."))
        except ValueError:
            raise InvalidK(f"scale must look like 'lo..hi', got {text!r}") from None
        return cls.from_range(lo, hi, ordered)

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(range(1, self.k + 1))

    @property
    def is_identity(self) -> bool:
        return self.labels == self.codes

    def describe(self) -> str:
        if self.is_identity:
            return f"codes 1..{self.k}"
        return "labels " + ",".join(map(str, self.labels)) + f" -> codes 1..{self.k}"


@dataclass(frozen=True, eq=False)
class GroupedRatings:
    """``a[k, i]`` is the code given to subject k by rater i of group A; ``b`` likewise.

    Arrays are read-only; use :meth:`take` or :meth:`swapped` to derive new
    instances.
    """

    a: np.ndarray
    b: np.ndarray
    scale: RatingScale
    rater_labels: tuple[str, ...] = ()
    subject_ids: tuple[str, ...] = ()
    conventions: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("a", "b"):
            arr = np.array(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not self.rater_labels:
            labels = tuple(f"A{i + 1}" for i in range(self.m1)) + tuple(
                f"B{j + 1}" for j in range(self.m2)
            )
            object.__setattr__(self, "rater_labels", labels)
        if not self.subject_ids:
            object.__setattr__(self, "subject_ids", tuple(str(i + 1) for i in range(self.n)))

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m1(self) -> int:
        return self.a.shape[1]

    @property
    def m2(self) -> int:
        return self.b.shape[1]

    @property
    def k(self) -> int:
        return self.scale.k

    @property
    def combined(self) -> np.ndarray:
        """All m1 + m2 raters side by side (the union group)."""
        return np.hstack([self.a, self.b])

    def take(self, rows) -> "GroupedRatings":
        """Subjects selected (with possible repeats) by row index."""
        rows = np.asarray(rows, dtype=np.intp)
        return GroupedRatings(
            self.a[rows],
            self.b[rows],
            self.scale,
            self.rater_labels,
            tuple(self.subject_ids[r] for r in rows),
            self.conventions,
        )

    def swapped(self) -> "GroupedRatings":
        labels = self.rater_labels[self.m1:] + self.rater_labels[: self.m1]
        return GroupedRatings(self.b, self.a, self.scale, labels, self.subject_ids, self.conventions)

    def __eq__(self, other):
        if not isinstance(other, GroupedRatings):
            return NotImplemented
        return (
            np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
            and self.scale == other.scale
            and self.rater_labels == other.rater_labels
            and self.subject_ids == other.subject_ids
            and self.conventions == other.conventions
        )

    __hash__ = None


@dataclass(frozen=True)
class MeasureResult:
    measure_id: str
    value: float
    conventions: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"{self.measure_id}: non-finite value {self.value!r}")


def _is_missing(cell) -> bool:
    if cell is None:
        return True
    if isinstance(cell, str):
        return cell.strip() == ""
    try:
        return bool(np.isnan(cell))
    except TypeError:
        return False


def validate_grouped_ratings(
    raw,
    group_a: Sequence[int] | None = None,
    group_b: Sequence[int] | None = None,
    scale: RatingScale | None = None,
    rater_labels: Sequence[str] | None = None,
    subject_ids: Sequence[str] | None = None,
) -> GroupedRatings:
    """Check a raw rating matrix and split it into two rater groups.

    ``raw`` is an n x (m1 + m2) table of values drawn from ``scale.labels``;
    ``group_a``/``group_b`` are column indices.  Passing an existing
    :class:`GroupedRatings` re-checks it and returns it unchanged.
    """
    if isinstance(raw, GroupedRatings):
        g = raw
        _check_shape(g.n, g.m1, g.m2)
        codes = np.hstack([g.a, g.b])
        if codes.min() < 1 or codes.max() > g.k:
            raise OutOfScaleCode(f"codes must lie in 1..{g.k}")
        return g

    if scale is None:
        raise InputError("a rating scale is required")
    rows = [list(r) for r in raw]
    if not rows:
        raise TooFewSubjects("no subjects given")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InputError("rating matrix is not rectangular")
    if group_a is None and group_b is None:
        raise InputError("group partition is required")
    group_a = list(group_a or [])
    group_b = list(group_b or [])
    if not group_a or not group_b:
        raise EmptyGroup("both groups need at least one rater")
    cols = group_a + group_b
    if len(set(cols)) != len(cols):
        raise InputError("a column is assigned to both groups or twice")
    if any(c < 0 or c >= width for c in cols):
        raise InputError(f"column index out of range for a {width}-column matrix")

    lookup = {label: code for code, label in enumerate(scale.labels, start=1)}
    coded = np.empty((len(rows), len(cols)), dtype=np.int64)
    for r, row in enumerate(rows):
        for out_c, c in enumerate(cols):
            cell = row[c]
            if _is_missing(cell):
                raise MissingValue(f"missing rating at row {r + 1}, column {c + 1}")
            try:
                value = int(cell)
                if value != cell and not isinstance(cell, str):
                    raise ValueError
            except (TypeError, ValueError):
                raise OutOfScaleCode(
                    f"non-integer rating {cell!r} at row {r + 1}, column {c + 1}"
                ) from None
            if value not in lookup:
                raise OutOfScaleCode(
                    f"rating {value} at row {r + 1}, column {c + 1} is outside {scale.describe()}"
                )
            coded[r, out_c] = lookup[value]

    m1 = len(group_a)
    _check_shape(coded.shape[0], m1, len(group_b))
    if rater_labels is None:
        labels = ()
    else:
        labels = tuple(str(rater_labels[c]) for c in cols)
    conventions = () if scale.is_identity else (f"scale: {scale.describe()}",)
    return GroupedRatings(
        coded[:, :m1],
        coded[:, m1:],
        scale,
        labels,
        tuple(str(s) for s in subject_ids) if subject_ids is not None else (),
        conventions,
    )


def _check_shape(n, m1, m2):
    if m1 < 1 or m2 < 1:
        raise EmptyGroup("both groups need at least one rater")
    if n < 2:
        raise TooFewSubjects(f"need at least 2 subjects, got {n}")
