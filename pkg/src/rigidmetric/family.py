"""Families of spaces, the graph they span, and the amalgamation hypotheses."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx

from .space import MetricError, MetricSpace, UnknownPointError


class IncompatibleFamilyError(MetricError):
    def __init__(self, conflicts: Sequence["Conflict"]):
        self.conflicts = list(conflicts)
        c = self.conflicts[0]
        super().__init__(
            f"members {c.s} and {c.t} disagree on d({c.x},{c.y}): {c.ds} vs {c.dt}"
            + (f" (+{len(self.conflicts) - 1} more)" if len(self.conflicts) > 1 else "")
        )


class HubConditionError(MetricError):
    def __init__(self, violations: Sequence["HubViolation"]):
        self.violations = list(violations)
        super().__init__("; ".join(v.describe() for v in self.violations[:5]))


@dataclass(frozen=True)
class SpaceFamily:
    members: tuple[MetricSpace, ...]
    hub: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(self.members))
        if self.hub is not None and not 0 <= self.hub < len(self.members):
            raise MetricError(f"hub index {self.hub} out of range")

    def __len__(self) -> int:
        return len(self.members)

    def union_points(self) -> tuple[str, ...]:
        """All points, in order of first appearance."""
        return tuple(dict.fromkeys(p for m in self.members for p in m.points))

    def containing(self, label: str) -> list[int]:
        return [s for s, m in enumerate(self.members) if label in m]


@dataclass(frozen=True)
class Conflict:
    s: int
    t: int
    x: str
    y: str
    ds: Fraction
    dt: Fraction


def check_compatibility(family: SpaceFamily) -> list[Conflict]:
    """Every pair of members that disagrees on a shared pair of points."""
    found = []
    for s, t in itertools.combinations(range(len(family)), 2):
        a, b = family.members[s], family.members[t]
        shared = [p for p in a.points if p in b]
        for x, y in itertools.combinations(shared, 2):
            ds, dt = a.d(x, y), b.d(x, y)
            if ds != dt:
                found.append(Conflict(s, t, x, y, ds, dt))
    return found


@dataclass(frozen=True)
class FamilyGraph:
    vertices: tuple[str, ...]
    witness: dict[frozenset, tuple[int, ...]] = field(repr=False)
    weight: dict[frozenset, Fraction] = field(repr=False)

    def __post_init__(self) -> None:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.witness:
            x, y = tuple(e)
            adj[x].append(y)
            adj[y].append(x)
        order = {v: i for i, v in enumerate(self.vertices)}
        for v in adj:
            adj[v].sort(key=order.__getitem__)
        object.__setattr__(self, "adjacency", adj)

    def has_edge(self, x: str, y: str) -> bool:
        return frozenset((x, y)) in self.witness

    def edge_weight(self, x: str, y: str) -> Fraction:
        try:
            return self.weight[frozenset((x, y))]
        except KeyError:
            raise MetricError(f"{x}{y} is not an edge") from None

    def neighbors(self, v: str) -> list[str]:
        return self.adjacency[v]  # type: ignore[attr-defined]

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        todo = deque(seen)
        while todo:
            v = todo.popleft()
            for u in self.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
        return len(seen) == len(self.vertices)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(tuple(e) for e in self.witness)
        return g


def build_graph(family: SpaceFamily) -> FamilyGraph:
    conflicts = check_compatibility(family)
    if conflicts:
        raise IncompatibleFamilyError(conflicts)
    witness: dict[frozenset, list[int]] = {}
    weight: dict[frozenset, Fraction] = {}
    for s, m in enumerate(family.members):
        for x, y in m.pairs():
            e = frozenset((x, y))
            witness.setdefault(e, []).append(s)
            weight.setdefault(e, m.d(x, y))
    return FamilyGraph(
        family.union_points(), {e: tuple(w) for e, w in witness.items()}, weight
    )


# {{{ paths


def _check_path(graph: FamilyGraph, path: Sequence[str]) -> None:
    if not path:
        raise MetricError("a path has at least one vertex")
    for v in path:
        if v not in graph.adjacency:  # type: ignore[attr-defined]
            raise UnknownPointError(f"vertex {v!r} is not in the graph")
    for a, b in zip(path, path[1:]):
        if a != b and not graph.has_edge(a, b):
            raise MetricError(f"{a}{b} is not an edge")


def path_weight(graph: FamilyGraph, path: Sequence[str]) -> Fraction:
    _check_path(graph, path)
    return sum(
        (graph.edge_weight(a, b) for a, b in zip(path, path[1:]) if a != b), Fraction(0)
    )


def reduce_path(graph: FamilyGraph, path: Sequence[str]) -> list[str]:
    """Cut every closed detour out of a walk, keeping the endpoints.

    The result is a subsequence of ``path`` with distinct vertices whose
    consecutive pairs are consecutive somewhere in the input, so it is a
    path and weighs no more than the input.
    """
    _check_path(graph, path)
    if path[0] == path[-1]:
        raise MetricError("endpoints must differ")
    out: list[str] = []
    where: dict[str, int] = {}
    for v in path:
        if v in where:
            cut = where[v] + 1
            for dropped in out[cut:]:
                del where[dropped]
            del out[cut:]
        else:
            where[v] = len(out)
            out.append(v)
    return out


def simple_paths(graph: FamilyGraph, x: str, y: str) -> Iterable[list[str]]:
    """Every path from ``x`` to ``y`` with pairwise distinct vertices."""
    if x == y:
        yield [x]
        return
    stack = [x]
    on = {x}

    def rec(v: str):
        for u in graph.neighbors(v):
            if u in on:
                continue
            if u == y:
                yield stack + [y]
                continue
            stack.append(u)
            on.add(u)
            yield from rec(u)
            stack.pop()
            on.discard(u)

    yield from rec(x)


# }}}

# {{{ hypotheses


@dataclass(frozen=True)
class CycleCheck:
    holds: bool
    counterexample: tuple[str, ...] | None
    exhaustive: bool
    cycles_checked: int


def _canonical_cycle(cycle: Sequence[str]) -> tuple[str, ...]:
    k = min(range(len(cycle)), key=lambda i: cycle[i])
    fwd = tuple(cycle[k:]) + tuple(cycle[:k])
    back = (fwd[0],) + tuple(reversed(fwd[1:]))
    return min(fwd, back)


def induced_cycle_condition(
    family: SpaceFamily, graph: FamilyGraph | None = None, max_cycle_len: int | None = None
) -> CycleCheck:
    """Look for an induced cycle of the family graph lying in no single member.

    Cycles up to ``max_cycle_len`` vertices are scanned (all of them when it
    is ``None``).  The reported counterexample is the lexicographically least
    offending cycle in canonical rotation.
    """
    if graph is None:
        graph = build_graph(family)
    n = len(graph.vertices)
    bound = n if max_cycle_len is None else max_cycle_len
    member_sets = [frozenset(m.points) for m in family.members]
    bad = []
    count = 0
    if bound >= 3:
        for cyc in nx.chordless_cycles(graph.to_networkx(), length_bound=bound):
            if len(cyc) < 3:
                continue
            count += 1
            cs = frozenset(cyc)
            if not any(cs <= ms for ms in member_sets):
                bad.append(_canonical_cycle(cyc))
    worst = min(bad) if bad else None
    return CycleCheck(worst is None, worst, bound >= n, count)


@dataclass(frozen=True)
class HubViolation:
    condition: str
    members: tuple[int, ...]
    witness: tuple[str, ...]
    detail: str = ""

    def describe(self) -> str:
        return f"({self.condition}) members {self.members} at {self.witness}: {self.detail}"


def check_hub_condition(family: SpaceFamily) -> list[HubViolation]:
    """Nonempty hub overlaps, spoke overlaps inside the hub, hub agreement."""
    if family.hub is None:
        raise MetricError("family has no hub")
    h = family.hub
    hub = family.members[h]
    out = []
    for s, m in enumerate(family.members):
        if s == h:
            continue
        if not any(p in hub for p in m.points):
            out.append(HubViolation("i", (s,), (), "member does not meet the hub"))
    for s, t in itertools.combinations(range(len(family)), 2):
        if h in (s, t):
            continue
        tm = family.members[t]
        for p in family.members[s].points:
            if p in tm and p not in hub:
                out.append(HubViolation("ii", (s, t), (p,), "shared point outside the hub"))
    for s, m in enumerate(family.members):
        if s == h:
            continue
        shared = [p for p in m.points if p in hub]
        for x, y in itertools.combinations(shared, 2):
            if m.d(x, y) != hub.d(x, y):
                out.append(
                    HubViolation("iii", (h, s), (x, y), f"{hub.d(x, y)} vs {m.d(x, y)}")
                )
    return out


# }}}
