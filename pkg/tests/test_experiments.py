import json
import random

import pytest

from costeq.errors import MissingColumnError, ParseError, ValidationError
from costeq.experiments import (
    RunRecord,
    SeriesKey,
    aggregate_best,
    parse_results_csv,
    parse_selector,
    select_series,
    series_to_csv,
    series_to_json,
    to_samples,
)
from costeq.isotonic import MonotoneSample

HEADER = "task,method,source,model_size,train_size,metric,value"


def rec(task="csqa", method="single-task", size=100, value=0.5, **hp):
    return RunRecord(task, method, "", "large", size, "accuracy", value, hp)


def test_parse_two_rows():
    text = f"{HEADER}\ncsqa,single-task,,large,100,accuracy,0.5\ncsqa,single-task,,large, 200 ,accuracy, 0.6\n"
    records = parse_results_csv(text)
    assert len(records) == 2
    assert records[1].train_size == 200 and records[1].value == 0.6


def test_parse_bad_train_size_names_row():
    text = f"{HEADER}\ncsqa,single-task,,large,abc,accuracy,0.5\n"
    with pytest.raises(ParseError) as err:
        parse_results_csv(text)
    assert err.value.row == 2
    assert "row 2" in str(err.value)


def test_extra_columns_become_hyperparams():
    text = f"{HEADER},lr\ncsqa,single-task,,large,100,accuracy,0.5,4e-3\n"
    (r,) = parse_results_csv(text)
    assert r.hyperparams == {"lr": "4e-3"}


@pytest.mark.parametrize(
    "text, exc",
    [
        ("", ParseError),
        ("task,method,source,model_size,train_size,metric\n", MissingColumnError),
        (f"{HEADER}\ncsqa,st,,large,100,accuracy,high\n", ParseError),
        (f"{HEADER}\ncsqa,st,,large,0,accuracy,0.5\n", ParseError),
        (f"{HEADER}\ncsqa,st,,large,100\n", ParseError),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_results_csv(text)


def test_aggregate_keeps_best():
    (s,) = aggregate_best([rec(value=0.62, lr="1e-3"), rec(value=0.65, lr="4e-3")])
    assert s.points == ((100, 0.65),)
    assert s.counts == (2,)


def test_aggregate_single_record():
    (s,) = aggregate_best([rec()])
    assert s.points == ((100, 0.5),)


def test_aggregate_groups_by_task():
    series = aggregate_best([rec(task="a"), rec(task="b"), rec(task="a", size=50, value=0.4)])
    assert [s.key.task for s in series] == ["a", "b"]
    assert series[0].points == ((50, 0.4), (100, 0.5))


def test_aggregate_mean_and_subset_grouping():
    records = [rec(value=0.6), rec(value=0.7), rec(method="multitask", value=0.9)]
    (s,) = aggregate_best(records, group_by=("task",), how="mean")
    assert s.key.method == "*"
    assert s.points[0][1] == pytest.approx((0.6 + 0.7 + 0.9) / 3)


def test_aggregate_rejects_bad_options():
    with pytest.raises(ValidationError):
        aggregate_best([rec()], group_by=("train_size",))
    with pytest.raises(ValidationError):
        aggregate_best([rec()], how="median")
    with pytest.raises(ValidationError):
        aggregate_best([])


def test_permutation_invariant():
    rng = random.Random(3)
    records = [
        rec(task=rng.choice("ab"), size=rng.choice([16, 64, 256]), value=rng.random(), seed=str(i))
        for i in range(60)
    ]
    reference = aggregate_best(records)
    for _ in range(10):
        rng.shuffle(records)
        assert aggregate_best(records) == reference


def test_best_never_decreases_with_more_records():
    rng = random.Random(5)
    records = []
    previous = None
    for i in range(40):
        records.append(rec(value=rng.random(), seed=str(i)))
        (s,) = aggregate_best(records)
        if previous is not None:
            assert s.points[0][1] >= previous
        previous = s.points[0][1]


def test_csv_round_trip_is_fixpoint():
    records = [rec(task=t, size=n, value=v) for t in "ab" for n, v in ((16, 0.31), (64, 0.4), (256, 0.55))]
    series = aggregate_best(records)
    again = aggregate_best(parse_results_csv(series_to_csv(series)))
    assert [s.points for s in again] == [s.points for s in series]
    assert [s.key for s in again] == [s.key for s in series]


def test_to_samples():
    series = aggregate_best([rec(size=16, value=0.3), rec(size=64, value=0.4)])
    assert to_samples(series[0]) == [MonotoneSample(16.0, 0.3, 1.0), MonotoneSample(64.0, 0.4, 1.0)]


def test_selector_and_lookup():
    series = aggregate_best([rec(method="single-task"), rec(method="sequential")])
    assert select_series(series, parse_selector("method=sequential")).key.method == "sequential"
    with pytest.raises(LookupError) as err:
        select_series(series, parse_selector("method=nope"))
    assert "available keys" in str(err.value)
    with pytest.raises(LookupError):
        select_series(series, parse_selector("task=csqa"))
    with pytest.raises(ValidationError):
        parse_selector("colour=red")


def test_series_json_export():
    series = aggregate_best([rec()])
    doc = json.loads(series_to_json(series))
    assert doc == [{"key": {"task": "csqa", "method": "single-task", "source": "", "model_size": "large",
                            "metric": "accuracy"}, "points": [[100, 0.5]], "counts": [1]}]
    assert str(SeriesKey("t", "m", "s", "l", "acc")) == "task=t,method=m,source=s,model_size=l,metric=acc"
