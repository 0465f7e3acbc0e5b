"""Isometries, embeddings and partial-isometry extension by exhaustive search."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .space import MetricError, MetricSpace, restrict

Mapping_ = dict[str, str]  # a point map, source label -> target label


class NotAnIsometryError(MetricError):
    def __init__(self, x: str, y: str, source: Fraction, image: Fraction):
        self.witness = (x, y)
        super().__init__(f"map does not preserve d({x},{y}): {source} vs {image}")


def _common(A: MetricSpace, B: MetricSpace) -> tuple[np.ndarray, np.ndarray]:
    den = math.lcm(A.denom, B.denom)
    a, b = A.rescaled(den), B.rescaled(den)
    if a.dtype != np.int64 or b.dtype != np.int64:
        a, b = a.astype(object), b.astype(object)
    return a, b


def _refine(D: np.ndarray, colors: list) -> list:
    """Colour refinement: split points by the multiset of (distance, colour) to the rest."""
    n = len(colors)
    rows = D.tolist()
    while True:
        sig = [
            (colors[i], tuple(sorted((rows[i][j], colors[j]) for j in range(n))))
            for i in range(n)
        ]
        table = {s: k for k, s in enumerate(sorted(set(sig)))}
        new = [table[s] for s in sig]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _joint_colors(a: np.ndarray, b: np.ndarray) -> tuple[list, list]:
    """Refined colours for two spaces computed in one shared palette."""
    n = a.shape[0]
    m = b.shape[0]
    big = np.full((n + m, n + m), -1, dtype=object)
    big[:n, :n] = a
    big[n:, n:] = b
    # -1 never equals a real distance, so cross entries only pad the profiles
    colors = _refine(big, [0] * (n + m))
    return colors[:n], colors[n:]


def _search(
    A: MetricSpace,
    B: MetricSpace,
    fixed: Mapping[str, str] | None = None,
    limit: int = -1,
    order_by_label: bool = False,
) -> list[Mapping_]:
    a, b = _common(A, B)
    n, m = len(A), len(B)
    if n == 0:
        return [{}]
    if len(A) == len(B):
        ca, cb = _joint_colors(a, b)
        cand = np.array([[ca[i] == cb[j] for j in range(m)] for i in range(n)], dtype=bool)
    else:
        # embeddings: only the distance multiset restricted to the image is comparable
        rows_a = [sorted(r) for r in a.tolist()]
        cand = np.ones((n, m), dtype=bool)
        setb = [set(r) for r in b.tolist()]
        for i in range(n):
            need = set(rows_a[i])
            for j in range(m):
                cand[i, j] = need <= setb[j]
    fixed = dict(fixed or {})
    for x, y in fixed.items():
        i, j = A.index(x), B.index(y)
        row = np.zeros(m, dtype=bool)
        if cand[i, j]:
            row[j] = True
        cand[i] = row
    counts = cand.sum(axis=1)
    if order_by_label:
        free = sorted((i for i in range(n) if A.points[i] not in fixed), key=lambda i: A.points[i])
        order = [A.index(x) for x in fixed] + free
    else:
        order = sorted(range(n), key=lambda i: (A.points[i] not in fixed, int(counts[i]), A.points[i]))
    rows = _kernels.search_embeddings(a, b, cand, np.array(order, dtype=np.int64), limit)
    return [{A.points[i]: B.points[int(r[i])] for i in range(n)} for r in rows]


def _sort_key(A: MetricSpace, B: MetricSpace):
    src = sorted(A.points)
    pos = {p: i for i, p in enumerate(B.points)}
    return lambda f: [pos[f[x]] for x in src]


def enumerate_isometries(A: MetricSpace, B: MetricSpace, limit: int | None = None) -> list[Mapping_]:
    """All distance-preserving bijections ``A -> B``.

    Sorted lexicographically by the images of ``A``'s labels in sorted
    order (image compared by position in ``B``).  With ``limit`` the search
    stops after that many maps and the returned prefix is sorted the same
    way but need not be the least ones.
    """
    if len(A) != len(B):
        return []
    maps = _search(A, B, limit=-1 if limit is None else limit)
    maps.sort(key=_sort_key(A, B))
    return maps


def enumerate_embeddings(A: MetricSpace, B: MetricSpace, limit: int | None = None) -> list[Mapping_]:
    """All distance-preserving injections ``A -> B``, sorted like :func:`enumerate_isometries`."""
    if len(A) > len(B):
        return []
    maps = _search(A, B, limit=-1 if limit is None else limit)
    maps.sort(key=_sort_key(A, B))
    return maps


def enumerate_isometries_bruteforce(A: MetricSpace, B: MetricSpace) -> list[Mapping_]:
    """Reference: filter every bijection (tiny spaces only)."""
    if len(A) != len(B):
        return []
    out = []
    for perm in itertools.permutations(B.points):
        f = dict(zip(A.points, perm))
        if all(A.d(x, y) == B.d(f[x], f[y]) for x, y in A.pairs()):
            out.append(f)
    out.sort(key=_sort_key(A, B))
    return out


# {{{ groups


def isometry_group(X: MetricSpace, limit: int | None = None) -> list[Mapping_]:
    return enumerate_isometries(X, X, limit)


def is_identity(f: Mapping[str, str]) -> bool:
    return all(k == v for k, v in f.items())


def is_rigid(X: MetricSpace) -> bool:
    return len(isometry_group(X, limit=2)) == 1


def compose(f: Mapping[str, str], g: Mapping[str, str]) -> Mapping_:
    """``f`` after ``g``."""
    return {x: f[g[x]] for x in g}


def inverse(f: Mapping[str, str]) -> Mapping_:
    return {v: k for k, v in f.items()}


def group_axiom_failures(group: Sequence[Mapping[str, str]]) -> list[str]:
    """Closure under composition and inverse, and presence of the identity."""
    keys = {tuple(sorted(f.items())) for f in group}
    out = []
    if not any(is_identity(f) for f in group):
        out.append("identity missing")
    for f in group:
        if tuple(sorted(inverse(f).items())) not in keys:
            out.append(f"inverse of {dict(f)} missing")
    for f, g in itertools.product(group, repeat=2):
        if tuple(sorted(compose(f, g).items())) not in keys:
            out.append(f"composition {dict(f)} o {dict(g)} missing")
            break
    return out


def generators(group: Sequence[Mapping[str, str]]) -> list[Mapping_]:
    """A small generating set, chosen greedily in the group's order."""
    gens: list[Mapping_] = []
    span: set[tuple] = set()
    if group:
        span = {tuple(sorted((p, p) for p in group[0]))}
    for f in group:
        key = tuple(sorted(f.items()))
        if key in span:
            continue
        gens.append(dict(f))
        frontier = [dict(k) for k in span]
        while frontier:
            nxt = []
            for h in frontier:
                for g in gens:
                    c = compose(g, h)
                    ck = tuple(sorted(c.items()))
                    if ck not in span:
                        span.add(ck)
                        nxt.append(c)
            frontier = nxt
    return gens


# }}}

# {{{ partial isometries


@dataclass(frozen=True)
class PartialIsometry:
    source: MetricSpace
    target: MetricSpace
    mapping: dict[str, str] = field(default_factory=dict)

    def check(self) -> None:
        seen: dict[str, str] = {}
        for x, y in self.mapping.items():
            self.source.index(x)
            self.target.index(y)
            if y in seen:
                raise MetricError(f"{seen[y]!r} and {x!r} both map to {y!r}")
            seen[y] = x
        for x, y in itertools.combinations(self.mapping, 2):
            ds = self.source.d(x, y)
            dt = self.target.d(self.mapping[x], self.mapping[y])
            if ds != dt:
                raise NotAnIsometryError(x, y, ds, dt)


def extend_partial_isometry(f0: PartialIsometry) -> PartialIsometry | None:
    """Lexicographically least total extension of ``f0`` over its source, or ``None``.

    Free source points are assigned in label order, each to the earliest
    target point that works.
    """
    f0.check()
    maps = _search(f0.source, f0.target, fixed=f0.mapping, limit=1, order_by_label=True)
    if not maps:
        return None
    return PartialIsometry(f0.source, f0.target, maps[0])


# }}}

# {{{ superuniversality


@dataclass(frozen=True)
class Probe:
    space: MetricSpace
    sub: tuple[str, ...]


@dataclass(frozen=True)
class ProbeOutcome:
    probe: Probe
    status: str  # "pass", "fail", "out-of-contract"
    embeddings_checked: int
    stuck: dict[str, str] | None = None


@dataclass(frozen=True)
class SuperuniversalityReport:
    outcomes: tuple[ProbeOutcome, ...]

    @property
    def failures(self) -> list[ProbeOutcome]:
        return [o for o in self.outcomes if o.status == "fail"]

    @property
    def holds(self) -> bool:
        return not self.failures


def grid_spaces(grid: Iterable[Fraction], max_points: int, prefix: str = "y") -> list[MetricSpace]:
    """Every metric space on ``y0 .. y{k-1}``, ``1 <= k <= max_points``, with distances from ``grid``."""
    vals = sorted({Fraction(v) for v in grid})
    out = []
    for k in range(1, max_points + 1):
        pts = [f"{prefix}{i}" for i in range(k)]
        pairs = list(itertools.combinations(range(k), 2))
        for assign in itertools.product(vals, repeat=len(pairs)):
            d = dict(zip(pairs, assign))

            def dist(i: int, j: int) -> Fraction:
                return Fraction(0) if i == j else d[(min(i, j), max(i, j))]

            if all(
                dist(i, k2) <= dist(i, j) + dist(j, k2)
                for i, j, k2 in itertools.permutations(range(k), 3)
            ):
                mat = [[dist(i, j) for j in range(k)] for i in range(k)]
                out.append(MetricSpace.from_fraction_matrix(pts, mat))
    return out


def grid_probes(grid: Iterable[Fraction], max_points: int) -> list[Probe]:
    """Each grid space paired with each of its subsets (empty and full included)."""
    out = []
    for Y in grid_spaces(grid, max_points):
        for r in range(len(Y) + 1):
            for sub in itertools.combinations(Y.points, r):
                out.append(Probe(Y, sub))
    return out


def _on_grid(space: MetricSpace, grid: set[Fraction]) -> bool:
    return all(space.d(x, y) in grid for x, y in space.pairs())


def superuniversality_check(
    target: MetricSpace,
    probes: Sequence[Probe],
    grid: Iterable[Fraction],
    core: Iterable[str] | None = None,
) -> SuperuniversalityReport:
    """Every embedding of each probe's ``sub`` into ``core`` must extend over the probe into ``target``."""
    gset = {Fraction(v) for v in grid}
    core_space = target if core is None else restrict(target, core)
    outcomes = []
    for probe in probes:
        Y = probe.space
        if not _on_grid(Y, gset):
            outcomes.append(ProbeOutcome(probe, "out-of-contract", 0))
            continue
        Y0 = restrict(Y, probe.sub)
        stuck = None
        count = 0
        for f0 in enumerate_embeddings(Y0, core_space):
            count += 1
            if extend_partial_isometry(PartialIsometry(Y, target, dict(f0))) is None:
                stuck = dict(f0)
                break
        outcomes.append(ProbeOutcome(probe, "pass" if stuck is None else "fail", count, stuck))
    return SuperuniversalityReport(tuple(outcomes))


# }}}
