"""Multitask mixing rates, seeded task-sampling streams and learning-curve size grids."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError

EQUAL = "equal"
SIZE_WEIGHTED = "size-weighted"
POLICIES = (EQUAL, SIZE_WEIGHTED)

_TWO_POW_53 = float(2**53)


@dataclass(frozen=True)
class MixtureSpec:
    tasks: tuple[tuple[str, int], ...]
    policy: str = EQUAL
    seed: int = 0

    def __post_init__(self) -> None:
        tasks = tuple((str(t), int(n)) for t, n in self.tasks)
        object.__setattr__(self, "tasks", tasks)
        if not tasks:
            raise ValidationError("a mixture needs at least one task")
        ids = [t for t, _ in tasks]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"duplicate task ids in mixture: {ids}")
        if any(n < 1 for _, n in tasks):
            raise ValidationError("dataset sizes must be >= 1")
        if self.policy not in POLICIES:
            raise ValidationError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must fit in an unsigned 64-bit integer")

    @property
    def task_ids(self) -> list[str]:
        return [t for t, _ in self.tasks]

    def to_dict(self) -> dict:
        return {
            "tasks": [{"id": t, "size": n} for t, n in self.tasks],
            "policy": self.policy,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> MixtureSpec:
        try:
            tasks = tuple((t["id"], t["size"]) for t in doc["tasks"])
            return cls(tasks, doc.get("policy", EQUAL), int(doc.get("seed", 0)))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed mixture spec: {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> MixtureSpec:
        return cls.from_dict(json.loads(text))


def mixture_rates(spec: MixtureSpec) -> list[tuple[str, float]]:
    """Per-example sampling probability for each task."""
    if spec.policy == EQUAL:
        k = len(spec.tasks)
        return [(t, 1.0 / k) for t, _ in spec.tasks]
    total = sum(n for _, n in spec.tasks)
    return [(t, n / total) for t, n in spec.tasks]


def _uniforms(seed: int, n: int) -> np.ndarray:
    # Raw PCG64 output is stable across numpy releases, unlike Generator methods.
    raw = np.random.PCG64(seed).random_raw(n)
    return (raw >> np.uint64(11)).astype(np.float64) / _TWO_POW_53


def sample_stream(spec: MixtureSpec, n: int) -> list[str]:
    """Draw ``n`` task ids i.i.d. from the mixture rates.

    Uniforms come from PCG64 seeded with ``spec.seed`` and are mapped through
    the cumulative rates, so a given (spec, n) always yields the same stream
    and a longer stream extends a shorter one.
    """
    if n < 0:
        raise ValidationError(f"stream length must be >= 0, got {n}")
    if n == 0:
        return []
    rates = mixture_rates(spec)
    cum = np.cumsum([p for _, p in rates])
    cum[-1] = 1.0
    idx = np.searchsorted(cum, _uniforms(spec.seed, n), side="right")
    ids = spec.task_ids
    return [ids[i] for i in idx]


def spawn_seeds(seed: int, n: int) -> list[int]:
    """Independent child seeds for parallel consumers of one mixture."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def subsample_sizes(full_size: int, start: int = 16, ratio: float = 4) -> list[int]:
    """Geometric training-set sizes ``start, start*ratio, ...`` ending at ``full_size``."""
    if full_size < 1:
        raise ValidationError(f"full_size must be >= 1, got {full_size}")
    if start < 1:
        raise ValidationError(f"start must be >= 1, got {start}")
    if not ratio > 1:
        raise ValidationError(f"ratio must be > 1, got {ratio}")
    if start >= full_size:
        return [full_size]
    sizes: list[int] = []
    k = 0
    while True:
        size = int(math.floor(start * ratio**k + 0.5))
        if size >= full_size:
            break
        if not sizes or size > sizes[-1]:
            sizes.append(size)
        k += 1
    sizes.append(full_size)
    return sizes


def parse_tasks(text: str, default_size: int = 1) -> tuple[tuple[str, int], ...]:
    """Parse ``"3"`` (three anonymous tasks) or ``"a:100,b:300"``/``"a,b"``."""
    text = text.strip()
    if text.isdigit():
        k = int(text)
        if k < 1:
            raise ValidationError("need at least one task")
        return tuple((f"task{i}", default_size) for i in range(k))
    tasks = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, size = part.partition(":")
        try:
            tasks.append((name.strip(), int(size) if size else default_size))
        except ValueError:
            raise ValidationError(f"bad task size in {part!r}") from None
    return tuple(tasks)


def check_rates(rates: Sequence[tuple[str, float]], tol: float = 1e-12) -> None:
    total = math.fsum(p for _, p in rates)
    if abs(total - 1.0) > tol or any(p <= 0 for _, p in rates):
        raise ValidationError(f"rates must be positive and sum to 1, got sum {total}")
