"""Seeded random grid spaces and hub families for property suites and fixtures."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .family import SpaceFamily
from .space import MetricSpace, restrict


def _admissible_values(space: MetricSpace, grid: Sequence[Fraction], rng: random.Random):
    """A random grid vector that keeps ``space`` plus one point metric, or ``None``."""
    pts = list(space.points)
    for _ in range(50):
        f: dict[str, Fraction] = {}
        ok = True
        for p in pts:
            lo = max((abs(f[q] - space.d(p, q)) for q in f), default=Fraction(0))
            hi = min((f[q] + space.d(p, q) for q in f), default=None)
            choices = [v for v in grid if v >= lo and (hi is None or v <= hi)]
            if not choices:
                ok = False
                break
            f[p] = rng.choice(choices)
        if ok:
            return f
    return None


def add_point(space: MetricSpace, label: str, grid: Sequence[Fraction], rng: random.Random) -> MetricSpace | None:
    f = _admissible_values(space, grid, rng)
    if f is None:
        return None
    pts = list(space.points) + [label]
    n = len(pts)
    mat = space.fraction_matrix()
    mat = [row + [f[p]] for row, p in zip(mat, space.points)] + [[f[p] for p in space.points] + [Fraction(0)]]
    assert len(mat) == n
    return MetricSpace.from_fraction_matrix(pts, mat)


def random_grid_space(
    n: int, grid: Sequence[Fraction], rng: random.Random, prefix: str = "p"
) -> MetricSpace:
    """``n`` points with distances from ``grid``, grown one admissible point at a time."""
    grid = sorted(Fraction(v) for v in grid)
    while True:
        X = MetricSpace.discrete(()) if n == 0 else MetricSpace.discrete((f"{prefix}0",))
        for i in range(1, n):
            X = add_point(X, f"{prefix}{i}", grid, rng)
            if X is None:
                break
        if X is not None:
            return X


def random_hub_family(
    rng: random.Random,
    grid: Sequence[Fraction] = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)),
    max_points: int = 10,
    hub_size: int | None = None,
    spokes: int | None = None,
) -> SpaceFamily:
    """A hub plus spokes that meet the hub in a nonempty subset and each other only inside it."""
    grid = sorted(Fraction(v) for v in grid)
    h = hub_size if hub_size is not None else rng.randint(1, max(1, max_points // 2))
    hub = random_grid_space(h, grid, rng, "h")
    budget = max_points - h
    k = spokes if spokes is not None else rng.randint(1, max(1, min(4, budget or 1)))
    members = [hub]
    counter = 0
    for s in range(k):
        base = rng.sample(hub.points, rng.randint(1, len(hub)))
        sp = restrict(hub, base)
        extra = rng.randint(0, max(0, min(3, budget)))
        for _ in range(extra):
            nxt = add_point(sp, f"s{s}_{counter}", grid, rng)
            counter += 1
            if nxt is not None:
                sp = nxt
                budget -= 1
        members.append(sp)
    return SpaceFamily(tuple(members), hub=0)
