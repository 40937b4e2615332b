"""Ingest experiment result tables and reduce them to learning curves.

The results CSV has one row per (run, metric). Required columns are listed
in :data:`REQUIRED_COLUMNS`; any other column is treated as a hyperparameter
and kept verbatim as a string.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import MissingColumnError, ParseError, ValidationError
from .isotonic import MonotoneSample

REQUIRED_COLUMNS = ("task", "method", "source", "model_size", "train_size", "metric", "value")
KEY_FIELDS = ("task", "method", "source", "model_size", "metric")
AGGREGATIONS = ("best", "mean", "max-with-count")
ANY = "*"


@dataclass(frozen=True)
class RunRecord:
    task: str
    method: str
    source: str
    model_size: str
    train_size: int
    metric: str
    value: float
    hyperparams: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.train_size < 1:
            raise ValidationError(f"train_size must be >= 1, got {self.train_size}")
        if not math.isfinite(self.value):
            raise ValidationError(f"value must be finite, got {self.value}")
        object.__setattr__(self, "hyperparams", dict(self.hyperparams))

    def __hash__(self) -> int:
        return hash(self.identity)

    @property
    def identity(self) -> tuple:
        return (
            self.task,
            self.method,
            self.source,
            self.model_size,
            self.train_size,
            tuple(sorted(self.hyperparams.items())),
        )


@dataclass(frozen=True)
class SeriesKey:
    task: str
    method: str
    source: str
    model_size: str
    metric: str

    def __str__(self) -> str:
        return ",".join(f"{f}={getattr(self, f)}" for f in KEY_FIELDS)

    def matches(self, selector: Mapping[str, str]) -> bool:
        return all(getattr(self, k) == v for k, v in selector.items())


@dataclass(frozen=True)
class LearningCurveSeries:
    """Best (or mean) value per training size for one series key.

    ``counts`` holds how many records fed each point.
    """

    key: SeriesKey
    points: tuple[tuple[int, float], ...]
    counts: tuple[int, ...] = ()

    @property
    def sizes(self) -> list[int]:
        return [s for s, _ in self.points]

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.points]


def _int_field(text: str, rownum: int, column: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise ParseError(f"column {column!r}: {text!r} is not an integer", row=rownum) from None
    if v < 1:
        raise ParseError(f"column {column!r}: {v} must be >= 1", row=rownum)
    return v


def _float_field(text: str, rownum: int, column: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"column {column!r}: {text!r} is not a number", row=rownum) from None
    if not math.isfinite(v):
        raise ParseError(f"column {column!r}: {text!r} is not finite", row=rownum)
    return v


def parse_results_csv(text: str) -> list[RunRecord]:
    """Parse a results table into records; errors carry the 1-based row number."""
    if text.startswith("\ufeff"):
        text = text[1:]
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("empty results file", row=1) from None
    if not any(header):
        raise ParseError("empty header row", row=1)
    for col in REQUIRED_COLUMNS:
        if col not in header:
            raise MissingColumnError(col)
    if len(set(header)) != len(header):
        raise ParseError("duplicate column names in header", row=1)
    extra = [h for h in header if h not in REQUIRED_COLUMNS]

    records = []
    for rownum, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", row=rownum)
        cells = {h: c.strip() for h, c in zip(header, row)}
        records.append(
            RunRecord(
                task=cells["task"],
                method=cells["method"],
                source=cells["source"],
                model_size=cells["model_size"],
                train_size=_int_field(cells["train_size"], rownum, "train_size"),
                metric=cells["metric"],
                value=_float_field(cells["value"], rownum, "value"),
                hyperparams={h: cells[h] for h in extra if cells[h] != ""},
            )
        )
    return records


def _key_for(record: RunRecord, group_by: Sequence[str]) -> SeriesKey:
    return SeriesKey(*(getattr(record, f) if f in group_by else ANY for f in KEY_FIELDS))


def aggregate_best(
    records: Iterable[RunRecord],
    group_by: Sequence[str] = KEY_FIELDS,
    how: str = "best",
) -> list[LearningCurveSeries]:
    """Group records by ``group_by`` + train_size and reduce each group.

    ``how="best"`` keeps the maximum value, i.e. the best dev score over
    hyperparameter settings. ``"mean"`` averages instead. ``"max-with-count"``
    yields the same points as ``"best"``; every series records per-size counts
    regardless. Series come back sorted by key.
    """
    unknown = set(group_by) - set(KEY_FIELDS)
    if unknown:
        raise ValidationError(f"cannot group by {sorted(unknown)}; choose from {KEY_FIELDS}")
    if how not in AGGREGATIONS:
        raise ValidationError(f"aggregation must be one of {AGGREGATIONS}, got {how!r}")
    records = list(records)
    if not records:
        raise ValidationError("no records to aggregate")

    grouped: dict[SeriesKey, dict[int, list[float]]] = {}
    for r in records:
        grouped.setdefault(_key_for(r, group_by), {}).setdefault(r.train_size, []).append(r.value)

    series = []
    for key in sorted(grouped, key=lambda k: tuple(getattr(k, f) for f in KEY_FIELDS)):
        by_size = grouped[key]
        sizes = sorted(by_size)
        if how == "mean":
            vals = [statistics.fmean(by_size[s]) for s in sizes]
        else:
            vals = [max(by_size[s]) for s in sizes]
        series.append(
            LearningCurveSeries(key, tuple(zip(sizes, vals)), tuple(len(by_size[s]) for s in sizes))
        )
    return series


def to_samples(series: LearningCurveSeries) -> list[MonotoneSample]:
    return [MonotoneSample(float(size), float(value), 1.0) for size, value in series.points]


def parse_selector(text: str) -> dict[str, str]:
    """Parse ``"method=sequential,task=csqa"`` into a field map."""
    selector = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or name not in KEY_FIELDS:
            raise ValidationError(f"bad selector term {part!r}; expected FIELD=VALUE with FIELD in {KEY_FIELDS}")
        selector[name] = value.strip()
    if not selector:
        raise ValidationError(f"empty selector {text!r}")
    return selector


def select_series(series: Sequence[LearningCurveSeries], selector: Mapping[str, str]) -> LearningCurveSeries:
    """Return the single series matching ``selector``.

    Raises ``LookupError`` listing the available keys when nothing or more
    than one series matches.
    """
    hits = [s for s in series if s.key.matches(selector)]
    if len(hits) == 1:
        return hits[0]
    available = "\n".join(f"  {s.key}" for s in series)
    what = "no series matches" if not hits else f"{len(hits)} series match"
    sel = ",".join(f"{k}={v}" for k, v in selector.items())
    raise LookupError(f"{what} {sel!r}; available keys:\n{available}")


def series_to_csv(series: Iterable[LearningCurveSeries]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REQUIRED_COLUMNS)
    for s in series:
        for size, value in s.points:
            writer.writerow(
                [s.key.task, s.key.method, s.key.source, s.key.model_size, size, s.key.metric, repr(float(value))]
            )
    return buf.getvalue()


def series_to_json(series: Iterable[LearningCurveSeries]) -> str:
    doc = [
        {
            "key": {f: getattr(s.key, f) for f in KEY_FIELDS},
            "points": [[size, value] for size, value in s.points],
            "counts": list(s.counts),
        }
        for s in series
    ]
    return json.dumps(doc, indent=2)
