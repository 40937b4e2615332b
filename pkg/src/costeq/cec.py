"""Cost equivalent curves: compose the treatment's inverse curve with the control curve.

For every control cost ``x`` the control fit gives a benefit ``b``; the
treatment's inverse fit (cost regressed on benefit) turns ``b`` into the
treatment cost reaching the same benefit. Benefits outside the treatment's
fitted range are clamped to the range boundary and flagged.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import FormatError, MissingColumnError, ParseError, ValidationError
from .isotonic import INCREASING, Flag, IsotonicFit, MonotoneSample, fit_inverse, fit_isotonic

CSV_COLUMNS = ("grid", "equivalent_cost", "benefit", "flag")
DENSE_POINTS = 200


@dataclass(frozen=True)
class CostEquivalentCurve:
    grid: tuple[float, ...]
    equivalent_costs: tuple[float, ...]
    benefits: tuple[float, ...]
    flags: tuple[Flag, ...]
    label: str = ""

    def __post_init__(self) -> None:
        n = len(self.grid)
        if n == 0:
            raise ValidationError("cost equivalent curve needs at least one grid point")
        if not (len(self.equivalent_costs) == len(self.benefits) == len(self.flags) == n):
            raise ValidationError("grid, equivalent_costs, benefits and flags must have equal length")
        object.__setattr__(self, "flags", tuple(Flag(f) for f in self.flags))

    def __len__(self) -> int:
        return len(self.grid)

    def rows(self) -> list[tuple[float, float, float, Flag]]:
        return list(zip(self.grid, self.equivalent_costs, self.benefits, self.flags))

    def with_label(self, label: str) -> CostEquivalentCurve:
        return CostEquivalentCurve(self.grid, self.equivalent_costs, self.benefits, self.flags, label)


@dataclass(frozen=True)
class CurvePair:
    """The three fits behind a curve, kept for plotting and diagnostics."""

    control: IsotonicFit
    treatment: IsotonicFit
    treatment_inverse: IsotonicFit


def dense_grid(fit: IsotonicFit, n: int = DENSE_POINTS) -> list[float]:
    lo, hi = fit.x_range
    if n < 2:
        return [lo]
    step = (hi - lo) / (n - 1)
    grid = [lo + i * step for i in range(n - 1)]
    grid.append(hi)
    return grid


def fit_pair(
    control: Sequence[MonotoneSample],
    treatment: Sequence[MonotoneSample],
    direction: str = INCREASING,
) -> CurvePair:
    return CurvePair(
        control=fit_isotonic(control, direction),
        treatment=fit_isotonic(treatment, direction),
        treatment_inverse=fit_inverse(treatment, direction),
    )


def _resolve_grid(grid: str | Iterable[float], control: IsotonicFit) -> list[float]:
    if isinstance(grid, str):
        if grid == "auto":
            return list(control.knots)
        if grid == "dense":
            return dense_grid(control)
        raise ValidationError(f"grid must be 'auto', 'dense' or a list of costs, got {grid!r}")
    points = [float(g) for g in grid]
    if not points:
        raise ValidationError("grid is empty")
    for g in points:
        if not math.isfinite(g):
            raise ValidationError(f"grid point {g!r} is not finite")
    return sorted(set(points))


def compose(pair: CurvePair, grid: Iterable[float], label: str = "") -> CostEquivalentCurve:
    lo, hi = pair.treatment.y_range
    costs, benefits, flags = [], [], []
    for x in grid:
        b = pair.control.predict(x)
        if b < lo:
            flag, query = Flag.CLAMPED_LOW, lo
        elif b > hi:
            flag, query = Flag.CLAMPED_HIGH, hi
        else:
            flag, query = Flag.IN_RANGE, b
        costs.append(pair.treatment_inverse.predict(query))
        benefits.append(b)
        flags.append(flag)
    return CostEquivalentCurve(tuple(grid), tuple(costs), tuple(benefits), tuple(flags), label)


def compute_cec(
    control: Sequence[MonotoneSample],
    treatment: Sequence[MonotoneSample],
    grid: str | Iterable[float] = "auto",
    *,
    direction: str = INCREASING,
    label: str = "",
) -> CostEquivalentCurve:
    """Map control costs to the treatment costs achieving the same benefit.

    ``grid`` is ``"auto"`` (the distinct control costs), ``"dense"``
    (:data:`DENSE_POINTS` evenly spaced control costs) or explicit costs.
    """
    pair = fit_pair(control, treatment, direction)
    points = _resolve_grid(grid, pair.control)
    return compose(pair, points, label)


def benefit_axis(cec: CostEquivalentCurve) -> list[tuple[float, float]]:
    return list(zip(cec.grid, cec.benefits))


@dataclass(frozen=True)
class SavingsSummary:
    """Per-point cost ratios ``g(x) / x``; below 1 the treatment needs fewer examples.

    ``aggregate`` is the geometric mean over in-range points, or ``None``
    when no point is in range (``comparable`` is then false).
    """

    ratios: tuple[float, ...]
    in_range: tuple[bool, ...]
    aggregate: float | None = field(default=None)

    @property
    def comparable(self) -> bool:
        return self.aggregate is not None


def savings_summary(cec: CostEquivalentCurve) -> SavingsSummary:
    if any(x <= 0 for x in cec.grid):
        raise ValidationError("savings ratios need strictly positive grid costs")
    ratios = tuple(g / x for x, g in zip(cec.grid, cec.equivalent_costs))
    mask = tuple(f is Flag.IN_RANGE for f in cec.flags)
    usable = [r for r, ok in zip(ratios, mask) if ok]
    if not usable:
        return SavingsSummary(ratios, mask, None)
    if any(r <= 0 for r in usable):
        # zero treatment cost makes the log undefined; report the plain limit
        return SavingsSummary(ratios, mask, 0.0)
    agg = math.exp(math.fsum(math.log(r) for r in usable) / len(usable))
    return SavingsSummary(ratios, mask, agg)


# serialization


def to_records(cec: CostEquivalentCurve) -> list[dict]:
    out = []
    for x, g, b, f in cec.rows():
        row = {"grid": x, "equivalent_cost": g, "benefit": b, "flag": f.value}
        if cec.label:
            row = {"label": cec.label, **row}
        out.append(row)
    return out


def to_csv(curves: CostEquivalentCurve | Sequence[CostEquivalentCurve]) -> str:
    """Render one or more curves as a flat CSV table.

    A leading ``label`` column is added when any curve carries a label.
    """
    if isinstance(curves, CostEquivalentCurve):
        curves = [curves]
    labelled = any(c.label for c in curves)
    columns = (("label",) if labelled else ()) + CSV_COLUMNS
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for cec in curves:
        for x, g, b, f in cec.rows():
            row = [repr(float(x)), repr(float(g)), repr(float(b)), f.value]
            writer.writerow(([cec.label] if labelled else []) + row)
    return buf.getvalue()


def to_json(curves: CostEquivalentCurve | Sequence[CostEquivalentCurve]) -> str:
    if isinstance(curves, CostEquivalentCurve):
        curves = [curves]
    doc = [
        {
            "label": c.label,
            "grid": list(c.grid),
            "equivalent_cost": list(c.equivalent_costs),
            "benefit": list(c.benefits),
            "flag": [f.value for f in c.flags],
        }
        for c in curves
    ]
    return json.dumps(doc, indent=2)


def _float(text: str, row: int, column: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"column {column!r}: {text!r} is not a number", row=row) from None
    if not math.isfinite(v):
        raise ParseError(f"column {column!r}: {text!r} is not finite", row=row)
    return v


def from_csv(text: str, default_label: str = "") -> list[CostEquivalentCurve]:
    """Parse a CEC table; rows are grouped by ``label`` in order of first appearance."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("empty CEC table", row=1) from None
    for col in CSV_COLUMNS:
        if col not in header:
            raise MissingColumnError(col)
    idx = {name: header.index(name) for name in header}
    groups: dict[str, list[tuple[float, float, float, Flag]]] = {}
    for rownum, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", row=rownum)
        label = row[idx["label"]].strip() if "label" in idx else default_label
        try:
            flag = Flag(row[idx["flag"]].strip())
        except ValueError:
            raise ParseError(f"unknown flag {row[idx['flag']]!r}", row=rownum) from None
        groups.setdefault(label, []).append(
            (
                _float(row[idx["grid"]], rownum, "grid"),
                _float(row[idx["equivalent_cost"]], rownum, "equivalent_cost"),
                _float(row[idx["benefit"]], rownum, "benefit"),
                flag,
            )
        )
    if not groups:
        raise ParseError("CEC table has no data rows", row=2)
    curves = []
    for label, rows in groups.items():
        rows.sort(key=lambda r: r[0])
        grid, costs, benefits, flags = zip(*rows)
        curves.append(CostEquivalentCurve(grid, costs, benefits, flags, label))
    return curves


def from_json(text: str) -> list[CostEquivalentCurve]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", offset=exc.pos) from None
    if isinstance(doc, dict):
        doc = [doc]
    curves = []
    try:
        for item in doc:
            curves.append(
                CostEquivalentCurve(
                    tuple(float(v) for v in item["grid"]),
                    tuple(float(v) for v in item["equivalent_cost"]),
                    tuple(float(v) for v in item["benefit"]),
                    tuple(Flag(f) for f in item["flag"]),
                    item.get("label", ""),
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed CEC JSON: {exc}") from None
    return curves


__all__ = [
    "CostEquivalentCurve",
    "CurvePair",
    "SavingsSummary",
    "benefit_axis",
    "compose",
    "compute_cec",
    "dense_grid",
    "fit_pair",
    "from_csv",
    "from_json",
    "savings_summary",
    "to_csv",
    "to_json",
    "to_records",
]
