"""Declarative transfer-training plans and their expansion into jobs.

A plan never runs anything. It fixes which datasets each stage trains on,
how they are mixed, the update/checkpoint schedule and the hyperparameter
grid; :func:`plan_to_jobs` crosses it with grid assignments and
learning-curve sizes to give one job document per training run.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .errors import PlanError, ValidationError
from .mixing import EQUAL, SIZE_WEIGHTED, MixtureSpec, mixture_rates

SCHEMA_VERSION = 1

SINGLE_TASK = "single-task"
MULTITASK = "multitask"
SEQUENTIAL = "sequential"
MULTITASK_FINE_TUNE = "multitask-fine-tune"
METHODS = (SINGLE_TASK, MULTITASK, SEQUENTIAL, MULTITASK_FINE_TUNE)
TWO_STAGE = (SEQUENTIAL, MULTITASK_FINE_TUNE)

RAINBOW = ("anli", "cosmosqa", "hellaswag", "physicaliqa", "socialiqa", "winogrande")


@dataclass(frozen=True)
class Schedule:
    gradient_updates: int
    checkpoint_every: int
    keep_last: int


@dataclass(frozen=True)
class Preset:
    name: str
    schedule: Schedule
    axes: Mapping[str, tuple]


PRESETS = {
    "investigatory": Preset(
        "investigatory",
        Schedule(gradient_updates=50_000, checkpoint_every=5_000, keep_last=10),
        {"learning_rate": (4e-3, 1e-3, 2.5e-4), "batch_size": (16,)},
    ),
    "leaderboard": Preset(
        "leaderboard",
        Schedule(gradient_updates=25_000, checkpoint_every=2_500, keep_last=10),
        {"learning_rate": (4e-3, 2e-3, 1e-3, 5e-4), "batch_size": (16, 32)},
    ),
}


@dataclass(frozen=True)
class HyperparamGrid:
    axes: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self) -> None:
        axes = {str(k): tuple(v) for k, v in dict(self.axes).items()}
        for name, values in axes.items():
            if not values:
                raise ValidationError(f"grid axis {name!r} is empty")
            if len(set(values)) != len(values):
                raise ValidationError(f"grid axis {name!r} has duplicate values")
        object.__setattr__(self, "axes", axes)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.axes.items())))

    def size(self) -> int:
        n = 1
        for values in self.axes.values():
            n *= len(values)
        return n


@dataclass(frozen=True)
class Stage:
    datasets: tuple[str, ...]
    mixture: MixtureSpec
    gradient_updates: int
    checkpoint_every: int
    keep_last: int
    hyperparams: HyperparamGrid = field(default_factory=HyperparamGrid)

    def __post_init__(self) -> None:
        object.__setattr__(self, "datasets", tuple(sorted(set(self.datasets))))
        if not self.datasets:
            raise ValidationError("a stage needs at least one dataset")
        if set(self.mixture.task_ids) != set(self.datasets):
            raise ValidationError("stage mixture must cover exactly the stage datasets")
        if self.gradient_updates < 1 or self.checkpoint_every < 1:
            raise ValidationError("gradient_updates and checkpoint_every must be positive")
        if self.checkpoint_every > self.gradient_updates:
            raise ValidationError("checkpoint_every cannot exceed gradient_updates")
        if self.keep_last < 1:
            raise ValidationError("keep_last must be >= 1")


@dataclass(frozen=True)
class TransferPlan:
    method: str
    target: str
    sources: tuple[str, ...]
    stages: tuple[Stage, ...]
    grid: HyperparamGrid
    preset: str = ""
    selection: str = "best-dev"

    def __post_init__(self) -> None:
        object.__setattr__(self, "sources", tuple(sorted(set(self.sources))))
        object.__setattr__(self, "stages", tuple(self.stages))
        if self.method not in METHODS:
            raise ValidationError(f"method must be one of {METHODS}, got {self.method!r}")
        expected = 2 if self.method in TWO_STAGE else 1
        if len(self.stages) != expected:
            raise ValidationError(f"{self.method} plans have {expected} stage(s), got {len(self.stages)}")
        if expected == 2 and self.stages[1].datasets != (self.target,):
            raise ValidationError("the second stage must train on the target dataset alone")


def _stage(datasets: Iterable[str], schedule: Schedule, grid: HyperparamGrid, policy: str,
           sizes: Mapping[str, int] | None, seed: int) -> Stage:
    datasets = sorted(set(datasets))
    if policy == SIZE_WEIGHTED:
        missing = [d for d in datasets if not sizes or d not in sizes]
        if missing:
            raise PlanError(f"size-weighted mixing needs dataset sizes for {missing}")
        tasks = tuple((d, sizes[d]) for d in datasets)
    else:
        tasks = tuple((d, (sizes or {}).get(d, 1)) for d in datasets)
    return Stage(
        datasets=tuple(datasets),
        mixture=MixtureSpec(tasks, policy, seed),
        gradient_updates=schedule.gradient_updates,
        checkpoint_every=schedule.checkpoint_every,
        keep_last=schedule.keep_last,
        hyperparams=grid,
    )


def build_plan(
    method: str,
    sources: Iterable[str],
    target: str,
    preset: str = "investigatory",
    *,
    policy: str = EQUAL,
    sizes: Mapping[str, int] | None = None,
    seed: int = 0,
) -> TransferPlan:
    """Build a plan for one transfer method.

    Sequential training multitasks on the sources only, then trains on the
    target. Multitask trains once on sources plus target. Multitask
    fine-tune does the same and then continues on the target alone. The
    second stage reuses the first stage's hyperparameter grid.
    """
    if method not in METHODS:
        raise PlanError(f"method must be one of {METHODS}, got {method!r}")
    if preset not in PRESETS:
        raise PlanError(f"preset must be one of {tuple(PRESETS)}, got {preset!r}")
    if not target:
        raise PlanError("target dataset id is empty")
    sources = set(sources)
    if target in sources:
        raise PlanError(f"target {target!r} must not be among the sources")
    if method != SINGLE_TASK and not sources:
        raise PlanError(f"{method} needs at least one source dataset")

    p = PRESETS[preset]
    grid = HyperparamGrid(p.axes)

    def stage(datasets: Iterable[str]) -> Stage:
        return _stage(datasets, p.schedule, grid, policy, sizes, seed)

    if method == SINGLE_TASK:
        stages = [stage({target})]
        sources = set()
    elif method == MULTITASK:
        stages = [stage(sources | {target})]
    elif method == SEQUENTIAL:
        first = stage(sources)
        stages = [first, stage({target})]
    else:
        first = stage(sources | {target})
        stages = [first, stage({target})]
    return TransferPlan(method, target, tuple(sources), tuple(stages), grid, preset)


def enumerate_grid(grid: HyperparamGrid) -> list[dict[str, Any]]:
    """Cartesian product of the axes, axis names in lexicographic order."""
    names = sorted(grid.axes)
    return [dict(zip(names, combo)) for combo in itertools.product(*(grid.axes[n] for n in names))]


def _fmt_value(v: Any) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def plan_to_jobs(plan: TransferPlan, sizes: Sequence[int]) -> list[dict[str, Any]]:
    """One job per (grid assignment, target training size)."""
    jobs = []
    assignments = enumerate_grid(plan.grid)
    for a_index, assignment in enumerate(assignments):
        tag = "-".join(f"{k}={_fmt_value(v)}" for k, v in assignment.items()) or "default"
        for size in sizes:
            jobs.append(
                {
                    "schema_version": SCHEMA_VERSION,
                    "id": f"{plan.target}.{plan.method}.a{a_index:03d}.n{size}",
                    "method": plan.method,
                    "target": plan.target,
                    "train_size": int(size),
                    "hyperparams": dict(assignment),
                    "hyperparams_tag": tag,
                    "selection": plan.selection,
                    "stages": [
                        {
                            "datasets": list(st.datasets),
                            "mixture": {
                                "policy": st.mixture.policy,
                                "seed": st.mixture.seed,
                                "rates": dict(mixture_rates(st.mixture)),
                            },
                            "gradient_updates": st.gradient_updates,
                            "checkpoint_every": st.checkpoint_every,
                            "keep_last": st.keep_last,
                            # the same assignment drives every stage
                            "hyperparams": dict(assignment),
                        }
                        for st in plan.stages
                    ],
                }
            )
    return jobs


# JSON documents


def _grid_to_dict(grid: HyperparamGrid) -> dict[str, list]:
    return {k: list(v) for k, v in sorted(grid.axes.items())}


def plan_to_dict(plan: TransferPlan) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "method": plan.method,
        "target": plan.target,
        "sources": list(plan.sources),
        "preset": plan.preset,
        "selection": plan.selection,
        "grid": _grid_to_dict(plan.grid),
        "assignments": enumerate_grid(plan.grid),
        "stages": [
            {
                "datasets": list(st.datasets),
                "mixture": st.mixture.to_dict(),
                "gradient_updates": st.gradient_updates,
                "checkpoint_every": st.checkpoint_every,
                "keep_last": st.keep_last,
                "hyperparams": _grid_to_dict(st.hyperparams),
            }
            for st in plan.stages
        ],
    }


def plan_from_dict(doc: Mapping[str, Any]) -> TransferPlan:
    """Rebuild a plan; the derived ``assignments`` list is ignored."""
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValidationError(f"unsupported plan schema_version {version!r}")
    try:
        stages = tuple(
            Stage(
                datasets=tuple(st["datasets"]),
                mixture=MixtureSpec.from_dict(st["mixture"]),
                gradient_updates=int(st["gradient_updates"]),
                checkpoint_every=int(st["checkpoint_every"]),
                keep_last=int(st["keep_last"]),
                hyperparams=HyperparamGrid(st.get("hyperparams", {})),
            )
            for st in doc["stages"]
        )
        return TransferPlan(
            method=doc["method"],
            target=doc["target"],
            sources=tuple(doc["sources"]),
            stages=stages,
            grid=HyperparamGrid(doc["grid"]),
            preset=doc.get("preset", ""),
            selection=doc.get("selection", "best-dev"),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed plan document: {exc}") from None


def plan_to_json(plan: TransferPlan) -> str:
    return json.dumps(plan_to_dict(plan), indent=2)


def plan_from_json(text: str) -> TransferPlan:
    return plan_from_dict(json.loads(text))


def expand_sources(spec: str, target: str) -> set[str]:
    """``"rainbow"`` means the other RAINBOW tasks; otherwise a comma list."""
    if spec.strip().lower() == "rainbow":
        return {t for t in RAINBOW if t != target}
    return {s.strip() for s in spec.split(",") if s.strip()}
