"""Discrete attachments, middle points and the discrete character."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .amalgam import AmalgamResult, amalgamate
from .family import SpaceFamily
from .space import MetricError, MetricSpace, restrict

HALF = Fraction(1, 2)

MIDDLE = "middle"
WEAK = "weak"


class NotDiscreteError(MetricError):
    def __init__(self, x: str, y: str, d: Fraction):
        self.witness = (x, y)
        super().__init__(f"set is not discrete: d({x},{y}) = {d}")


class ScheduleError(MetricError):
    pass


class SearchBudgetError(MetricError):
    pass


def require_discrete(space: MetricSpace, subset: Iterable[str]) -> tuple[str, ...]:
    pts = tuple(dict.fromkeys(subset))
    for p in pts:
        space.index(p)
    for x, y in itertools.combinations(pts, 2):
        if space.d(x, y) != 1:
            raise NotDiscreteError(x, y, space.d(x, y))
    return pts


@dataclass
class Registry:
    """Attached discrete sets ``D_x`` and the sets each S-added point sits over."""

    attachments: dict[str, tuple[str, ...]] = field(default_factory=dict)
    middles: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def merged_with(self, other: "Registry") -> "Registry":
        clash = set(self.attachments) & set(other.attachments)
        if clash:
            raise ScheduleError(f"point {sorted(clash)[0]!r} is attached twice")
        return Registry(
            {**self.attachments, **other.attachments}, {**self.middles, **other.middles}
        )

    def sizes(self) -> dict[str, int]:
        return {x: len(D) for x, D in self.attachments.items()}


# {{{ A operator


def attach_discrete(
    X: MetricSpace,
    skip: Iterable[str],
    schedule: Mapping[str, int],
    *,
    stage: int = 0,
    threshold: int | None = None,
    distinct: bool = True,
    taken: Iterable[str] = (),
) -> tuple[AmalgamResult, Registry]:
    """Attach a fresh discrete set of size ``schedule[x]`` through each ``x`` of ``X`` minus ``skip``.

    New points are ``disc:<stage>:<x>:<k>``.  With ``threshold`` set every
    size must exceed ``|X| * threshold``; ``distinct=False`` drops the
    pairwise-distinct requirement (used only for ablations).
    """
    skipped = set(skip)
    for p in skipped:
        X.index(p)
    need = [p for p in X.points if p not in skipped]
    for p in schedule:
        if p in skipped:
            raise ScheduleError(f"schedule touches skipped point {p!r}")
        if p not in X:
            raise ScheduleError(f"schedule names unknown point {p!r}")
    missing = [p for p in need if p not in schedule]
    if missing:
        raise ScheduleError(f"no size scheduled for {missing[0]!r}")
    sizes = [int(schedule[p]) for p in need]
    for p, s in zip(need, sizes):
        if s < 2:
            raise ScheduleError(f"size for {p!r} must be at least 2, got {s}")
        if threshold is not None and s <= len(X) * threshold:
            raise ScheduleError(
                f"size {s} for {p!r} does not exceed |X|*m = {len(X)}*{threshold}"
            )
    if distinct and len(set(sizes)) != len(sizes):
        dup = next(s for s in sizes if sizes.count(s) > 1)
        raise ScheduleError(f"size {dup} is scheduled twice")

    used = set(X.points) | set(taken)
    members = [X]
    registry = Registry()
    for p, s in zip(need, sizes):
        tips = [f"disc:{stage}:{p}:{k}" for k in range(s - 1)]
        for t in tips:
            if t in used:
                raise MetricError(f"label {t!r} collides with an existing point")
            used.add(t)
        blob = (p, *tips)
        members.append(MetricSpace.discrete(blob))
        registry.attachments[p] = blob
    return amalgamate(SpaceFamily(tuple(members), hub=0)), registry


# }}}

# {{{ middle points


def find_middle_points(
    ambient: MetricSpace, target: Sequence[str], mode: str = MIDDLE
) -> list[str]:
    """Points outside ``target`` at one common distance from all of it.

    ``middle`` asks for distance exactly 1/2, ``weak`` for any common
    distance below 1.
    """
    if mode not in (MIDDLE, WEAK):
        raise MetricError(f"unknown mode {mode!r}")
    tg = require_discrete(ambient, target)
    if not tg:
        raise MetricError("target must be nonempty")
    cols = [ambient.index(y) for y in tg]
    S = ambient.scaled[:, cols]
    first = S[:, :1]
    same = np.all(S == first, axis=1)
    if mode == MIDDLE:
        ok = same & (2 * first[:, 0] == ambient.denom)
    else:
        ok = same & (first[:, 0] < ambient.denom)
    inside = set(tg)
    return [p for p, flag in zip(ambient.points, ok.tolist()) if flag and p not in inside]


def _half_incidence(space: MetricSpace) -> np.ndarray:
    """``H[z, y]``: ``d(z, y) == 1/2``."""
    return 2 * space.scaled == space.denom


def hereditarily_without_middle_points(
    X: MetricSpace, Y: Sequence[str], m: int
) -> tuple[bool, tuple[tuple[str, ...], str] | None]:
    """No ``m``-point subset of ``Y`` has a middle point in ``X``.

    A point ``z`` is a middle point of some ``m``-subset exactly when at
    least ``m`` points of ``Y`` lie at distance 1/2 from it, so the check is
    a count per ``z``.  On failure the witness is the first ``m`` such
    points together with ``z``.
    """
    if m < 1:
        raise MetricError("threshold must be at least 1")
    ys = require_discrete(X, Y)
    if m > len(ys):
        return True, None
    H = _half_incidence(X)
    cols = [X.index(y) for y in ys]
    counts = H[:, cols].sum(axis=1)
    for zi in np.nonzero(counts >= m)[0].tolist():
        hits = [y for y, c in zip(ys, H[zi, cols].tolist()) if c][:m]
        return False, (tuple(hits), X.points[zi])
    return True, None


def hereditarily_without_middle_points_bruteforce(X: MetricSpace, Y: Sequence[str], m: int) -> bool:
    """Reference check straight from the definition: every ``m``-subset, every point."""
    ys = require_discrete(X, Y)
    for Z in itertools.combinations(ys, m):
        if find_middle_points(X, Z, MIDDLE):
            return False
    return True


class _CliqueSearch:
    """Discrete subsets under per-point capacity limits, as bitsets over point indices.

    ``adj[v]`` is the set of points at distance 1 from ``v``; ``half[z]``
    the set at distance 1/2 from ``z``.  A set is admissible when it is a
    clique of ``adj``, meets every ``half[z]`` in fewer than ``m`` points,
    and meets every ``caps`` set in fewer than ``m`` points.
    """

    def __init__(self, space: MetricSpace, m: int, caps: Sequence[Iterable[str]] = ()):
        n = len(space)
        one = (space.scaled == space.denom).tolist()
        half = _half_incidence(space).tolist()
        self.n = n
        self.m = m
        self.adj = [sum(1 << j for j in range(n) if one[i][j]) for i in range(n)]
        limits = [sum(1 << j for j in range(n) if half[z][j]) for z in range(n)]
        for c in caps:
            limits.append(sum(1 << space.index(p) for p in c))
        self.limits = [L for L in limits if bin(L).count("1") >= m]

    def admissible_add(self, chosen: int, v: int) -> bool:
        bit = 1 << v
        for L in self.limits:
            if L & bit and bin(L & chosen).count("1") + 1 >= self.m:
                return False
        return True

    def max_clique_through(self, v: int, budget: int) -> int:
        if not self.admissible_add(0, v):
            return 0
        best = 1
        nodes = 0

        def rec(chosen: int, size: int, cand: int) -> None:
            nonlocal best, nodes
            nodes += 1
            if nodes > budget:
                raise SearchBudgetError("clique search exceeded its node budget")
            if size > best:
                best = size
            while cand:
                if size + bin(cand).count("1") <= best:
                    return
                u = cand.bit_length() - 1
                cand &= ~(1 << u)
                if self.admissible_add(chosen, u):
                    rec(chosen | (1 << u), size + 1, cand & self.adj[u])

        rec(1 << v, 1, self.adj[v])
        return best

    def maximal_sets(self, min_size: int, budget: int) -> list[int]:
        """Every inclusion-maximal admissible set with at least ``min_size`` points."""
        out = []
        nodes = 0

        def extendable(chosen: int) -> bool:
            common = (1 << self.n) - 1
            for v in range(self.n):
                if chosen >> v & 1:
                    common &= self.adj[v]
            while common:
                u = common.bit_length() - 1
                common &= ~(1 << u)
                if self.admissible_add(chosen, u):
                    return True
            return False

        def rec(chosen: int, size: int, cand: int) -> None:
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise SearchBudgetError("maximal-set search exceeded its node budget")
            if size >= min_size and not extendable(chosen):
                out.append(chosen)
            while cand:
                u = (cand & -cand).bit_length() - 1
                cand &= ~(1 << u)
                if self.admissible_add(chosen, u):
                    rec(chosen | (1 << u), size + 1, cand & self.adj[u])

        for v in range(self.n):
            if self.admissible_add(0, v):
                rec(1 << v, 1, self.adj[v] & ~((1 << (v + 1)) - 1))
        return out


def discrete_character(X: MetricSpace, x: str, m: int, *, budget: int = 2_000_000) -> int:
    """Largest discrete ``Y`` through ``x`` that is hereditarily without middle points.

    Returns 0 when even ``{x}`` fails (possible only for ``m == 1``).
    """
    if m < 1:
        raise MetricError("threshold must be at least 1")
    v = X.index(x)
    return _CliqueSearch(X, m).max_clique_through(v, budget)


def discrete_character_bruteforce(X: MetricSpace, x: str, m: int) -> int:
    """Reference by enumerating every subset through ``x`` (small spaces only)."""
    X.index(x)
    others = [p for p in X.points if p != x]
    best = 0
    for r in range(len(others) + 1):
        for rest in itertools.combinations(others, r):
            Y = (x, *rest)
            if not all(X.d(a, b) == 1 for a, b in itertools.combinations(Y, 2)):
                continue
            if hereditarily_without_middle_points_bruteforce(X, Y, m):
                best = max(best, len(Y))
    return best


# }}}

# {{{ S operator


def middle_candidates(
    X: MetricSpace, protected: Sequence[Iterable[str]], m: int, *, budget: int = 2_000_000
) -> list[tuple[str, ...]]:
    """Maximal discrete sets, hereditarily without middle points, meeting each protected set in < m points.

    Only sets with at least ``m`` points are returned; listed in point order.
    """
    if m < 1:
        raise MetricError("threshold must be at least 1")
    groups = [require_discrete(X, G) for G in protected]
    search = _CliqueSearch(X, m, groups)
    sets = search.maximal_sets(m, budget)
    out = [tuple(p for i, p in enumerate(X.points) if s >> i & 1) for s in sets]
    order = {p: i for i, p in enumerate(X.points)}
    out.sort(key=lambda Y: [order[p] for p in Y])
    return out


def add_middle_points(
    X: MetricSpace,
    protected: Sequence[Iterable[str]],
    m: int,
    *,
    stage: int = 0,
    taken: Iterable[str] = (),
    budget: int = 2_000_000,
) -> tuple[AmalgamResult, Registry]:
    """Add a point at distance 1/2 from every set listed by :func:`middle_candidates`.

    New points are ``mid:<stage>:<k>`` in candidate order.
    """
    cands = middle_candidates(X, protected, m, budget=budget)
    used = set(X.points) | set(taken)
    counter = itertools.count()
    members = [X]
    registry = Registry()
    for Y in cands:
        label = f"mid:{stage}:{next(counter)}"
        while label in used:
            label = f"mid:{stage}:{next(counter)}"
        used.add(label)
        pts = (*Y, label)
        k = len(Y)
        mat = [[Fraction(0)] * (k + 1) for _ in range(k + 1)]
        for i in range(k):
            for j in range(k):
                if i != j:
                    mat[i][j] = Fraction(1)
            mat[i][k] = mat[k][i] = HALF
        members.append(MetricSpace.from_fraction_matrix(pts, mat))
        registry.middles[label] = Y
    return amalgamate(SpaceFamily(tuple(members), hub=0)), registry


# }}}


# {{{ postconditions


@dataclass(frozen=True)
class OperatorFailure:
    rule: str
    witness: tuple[str, ...]
    detail: str


def attachment_failures(
    X: MetricSpace, result: AmalgamResult, registry: Registry, *, distinct: bool = True
) -> list[OperatorFailure]:
    """Exact check of the attachment rules on an :func:`attach_discrete` output."""
    Y = result.space
    out = []
    if restrict(Y, X.points) != X:
        out.append(OperatorFailure("A4", (), "base is not embedded isometrically"))
    sizes = registry.sizes()
    if distinct and len(set(sizes.values())) != len(sizes):
        out.append(OperatorFailure("A2", tuple(sizes), f"sizes not distinct: {sizes}"))
    for x, D in registry.attachments.items():
        if D[0] != x or any(p in X for p in D[1:]):
            out.append(OperatorFailure("A1", D, "attached set meets the base outside its root"))
        for a, b in itertools.combinations(D, 2):
            if Y.d(a, b) != 1:
                out.append(OperatorFailure("A1", (a, b), f"d = {Y.d(a, b)} inside D_{x}"))
        for t in D[1:]:
            for y in X.points:
                if Y.d(t, y) != 1 + Y.d(x, y):
                    out.append(
                        OperatorFailure("A3", (t, x, y), f"{Y.d(t, y)} != 1 + {Y.d(x, y)}")
                    )
    return out


def middle_failures(
    X: MetricSpace,
    result: AmalgamResult,
    registry: Registry,
    protected: Sequence[Iterable[str]],
    m: int,
) -> list[OperatorFailure]:
    """Exact check of the middle-point rules on an :func:`add_middle_points` output."""
    Y = result.space
    out = []
    if restrict(Y, X.points) != X:
        out.append(OperatorFailure("S0", (), "base is not embedded isometrically"))
    added = list(registry.middles)
    for z, base in registry.middles.items():
        if len(base) < m:
            out.append(OperatorFailure("S1", (z, *base), "set smaller than the threshold"))
        for y in base:
            if Y.d(z, y) != HALF:
                out.append(OperatorFailure("S1", (z, y), f"d = {Y.d(z, y)}, expected 1/2"))
        for x in Y.points:
            if x == z or x in base:
                continue
            relay = min(Y.d(z, y) + Y.d(y, x) for y in base)
            if Y.d(z, x) != relay:
                out.append(OperatorFailure("S2", (z, x), f"{Y.d(z, x)} != relayed {relay}"))
    for a, b in itertools.combinations(added, 2):
        if Y.d(a, b) < HALF:
            out.append(OperatorFailure("separation", (a, b), f"d = {Y.d(a, b)} < 1/2"))
    for G in protected:
        ok, wit = hereditarily_without_middle_points(Y, tuple(G), m)
        if not ok:
            out.append(OperatorFailure("protection", (*wit[0], wit[1]), "protected set gained a middle point"))
    for Yset in middle_candidates(X, protected, m):
        if not any(set(base) <= set(Yset) and len(base) >= m for base in registry.middles.values()):
            out.append(OperatorFailure("S1", Yset, "qualifying set received no middle point"))
    return out


# }}}
