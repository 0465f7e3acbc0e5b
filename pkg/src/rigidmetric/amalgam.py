"""Amalgams of compatible families: shortest-path pseudometric, metric quotient, hub checks."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import _kernels
from .family import (
    FamilyGraph,
    HubConditionError,
    SpaceFamily,
    build_graph,
    check_hub_condition,
    simple_paths,
    path_weight,
)
from .space import METRIC, PSEUDOMETRIC, MetricError, MetricSpace


class DisconnectedFamilyError(MetricError):
    pass


class QuotientError(MetricError):
    pass


@dataclass(frozen=True)
class AmalgamResult:
    space: MetricSpace
    embeddings: dict[int, dict[str, str]]
    hub_preserved: bool
    quotient_classes: dict[str, tuple[str, ...]]
    family: SpaceFamily | None = field(default=None, repr=False)

    @property
    def merged(self) -> dict[str, tuple[str, ...]]:
        """Only the classes with more than one point."""
        return {r: c for r, c in self.quotient_classes.items() if len(c) > 1}

    def image(self, s: int) -> list[str]:
        return list(dict.fromkeys(self.embeddings[s].values()))


def _weight_matrix(family: SpaceFamily, graph: FamilyGraph) -> tuple[np.ndarray, int, int]:
    den = 1
    for m in family.members:
        den = math.lcm(den, m.denom)
    n = len(graph.vertices)
    total = 0
    for m in family.members:
        total += int(np.abs(m.scaled).sum()) * (den // m.denom)
    inf = total + 1
    pos = {v: i for i, v in enumerate(graph.vertices)}
    use_int64 = 2 * inf < _kernels.INT64_SAFE
    W = np.full((n, n), inf, dtype=np.int64 if use_int64 else object)
    np.fill_diagonal(W, 0)
    for m in family.members:
        idx = np.array([pos[p] for p in m.points], dtype=np.intp)
        block = m.rescaled(den)
        if use_int64:
            W[np.ix_(idx, idx)] = block
        else:
            for a, i in enumerate(idx.tolist()):
                for b, j in enumerate(idx.tolist()):
                    W[i, j] = int(block[a, b])
    return W, den, inf


def amalgamate_pseudometric(
    family: SpaceFamily, graph: FamilyGraph | None = None
) -> MetricSpace:
    """Least path weight between every pair of points of the union.

    The result is always a pseudometric.  It restricts to each member only
    when the induced-cycle hypothesis holds; that is not checked here.
    """
    if graph is None:
        graph = build_graph(family)
    if not graph.is_connected():
        raise DisconnectedFamilyError("family graph is not connected")
    W, den, inf = _weight_matrix(family, graph)
    D = _kernels.floyd_warshall(W, inf)
    return MetricSpace.from_scaled(graph.vertices, D, den, PSEUDOMETRIC)


def pair_distance(graph: FamilyGraph, x: str, y: str) -> Fraction:
    """Single-pair version of the amalgam distance (Dijkstra over exact weights)."""
    if x == y:
        return Fraction(0)
    best = {x: Fraction(0)}
    tie = itertools.count()
    heap = [(Fraction(0), next(tie), x)]
    done = set()
    while heap:
        c, _, v = heapq.heappop(heap)
        if v in done:
            continue
        if v == y:
            return c
        done.add(v)
        for u in graph.neighbors(v):
            nc = c + graph.edge_weight(v, u)
            if u not in best or nc < best[u]:
                best[u] = nc
                heapq.heappush(heap, (nc, next(tie), u))
    raise DisconnectedFamilyError(f"no path from {x} to {y}")


def oracle_pseudometric(family: SpaceFamily, graph: FamilyGraph | None = None) -> MetricSpace:
    """Reference amalgam by brute force over all simple paths (small families only)."""
    if graph is None:
        graph = build_graph(family)
    verts = graph.vertices
    n = len(verts)
    mat = [[Fraction(0)] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        weights = [path_weight(graph, p) for p in simple_paths(graph, verts[i], verts[j])]
        if not weights:
            raise DisconnectedFamilyError(f"no path from {verts[i]} to {verts[j]}")
        mat[i][j] = mat[j][i] = min(weights)
    return MetricSpace.from_fraction_matrix(verts, mat, PSEUDOMETRIC)


def quotient_to_metric(
    pseudo: MetricSpace,
    preferred: Iterable[str] = (),
    family: SpaceFamily | None = None,
) -> AmalgamResult:
    """Merge zero-distance classes, keeping preferred points as representatives.

    Classes without a preferred point are represented by their
    lexicographically least label.  When ``family`` is given the member
    embeddings are filled in as well.
    """
    pref = set(preferred)
    n = len(pseudo)
    zero = pseudo.scaled == 0
    rep_of: dict[str, str] = {}
    classes: dict[str, tuple[str, ...]] = {}
    seen = np.zeros(n, dtype=bool)
    for i in range(n):
        if seen[i]:
            continue
        members_idx = np.nonzero(zero[i])[0].tolist()
        seen[members_idx] = True
        members = [pseudo.points[j] for j in members_idx]
        chosen = [p for p in members if p in pref]
        if len(chosen) > 1:
            raise QuotientError(
                f"preferred points {sorted(chosen)} are at distance 0 and cannot all be kept"
            )
        rep = chosen[0] if chosen else min(members)
        classes[rep] = tuple(sorted(members))
        for p in members:
            rep_of[p] = rep
    keep = [p for p in pseudo.points if rep_of[p] == p]
    idx = [pseudo.index(p) for p in keep]
    sub = pseudo.scaled[np.ix_(idx, idx)] if idx else np.zeros((0, 0), dtype=np.int64)
    space = MetricSpace.from_scaled(keep, sub, pseudo.denom, METRIC)
    embeddings: dict[int, dict[str, str]] = {}
    if family is not None:
        for s, m in enumerate(family.members):
            embeddings[s] = {p: rep_of[p] for p in m.points}
    hub_ok = all(rep_of.get(p) == p for p in pref)
    return AmalgamResult(space, embeddings, hub_ok, classes, family)


def amalgamate(family: SpaceFamily, *, oracle: bool = False) -> AmalgamResult:
    """The hub amalgam: a metric space containing the hub and a copy of every member."""
    if family.hub is None:
        raise MetricError("amalgamate needs a hub member")
    problems = check_hub_condition(family)
    if problems:
        raise HubConditionError(problems)
    graph = build_graph(family)
    if oracle:
        if not graph.is_connected():
            raise DisconnectedFamilyError("family graph is not connected")
        pseudo = oracle_pseudometric(family, graph)
    else:
        pseudo = amalgamate_pseudometric(family, graph)
    return quotient_to_metric(pseudo, family.members[family.hub].points, family)


# {{{ verification


def _minplus(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``C[i, j] = min_k A[i, k] + B[k, j]``."""
    return (A[:, :, None] + B[None, :, :]).min(axis=1)


@dataclass(frozen=True)
class FormulaFailure:
    formula: str
    s: int
    t: int
    x: str
    y: str
    actual: Fraction
    relayed: Fraction


def verify_hub_formulas(result: AmalgamResult, family: SpaceFamily | None = None) -> list[FormulaFailure]:
    """Recompute every cross-member distance through the hub overlaps.

    For members ``s != t``, points ``x`` of the copy of ``s`` and ``y`` of the
    copy of ``t``: ``d(x, y)`` must equal the least weight of a path
    ``x -> (hub ∩ s) -> (hub ∩ t) -> y``, and for ``z`` in the hub or the copy
    of ``t``, ``d(x, z)`` must equal the least weight through ``hub ∩ s``.
    The relay minima are min-plus products over the finished distance
    table, independent of the shortest-path kernel that produced it.
    """
    family = family if family is not None else result.family
    if family is None or family.hub is None:
        raise MetricError("hub formulas need the hub family")
    h = family.hub
    hub = family.members[h]
    Y = result.space
    D = Y.scaled
    emb = result.embeddings
    pos = {p: i for i, p in enumerate(Y.points)}
    overlap = {
        s: [pos[emb[s][p]] for p in m.points if p in hub] for s, m in enumerate(family.members)
    }
    images = {s: [pos[p] for p in result.image(s)] for s in range(len(family))}
    hub_idx = [pos[p] for p in hub.points]
    failures = []
    for s, t in itertools.permutations(range(len(family)), 2):
        xs, hs, ht = images[s], overlap[s], overlap[t]
        ys = images[t]
        zs = list(dict.fromkeys(hub_idx + ys))
        to_hs = D[np.ix_(xs, hs)]
        two = _minplus(_minplus(to_hs, D[np.ix_(hs, ht)]), D[np.ix_(ht, ys)])
        one = _minplus(to_hs, D[np.ix_(hs, zs)])
        for a, b in zip(*np.nonzero(two != D[np.ix_(xs, ys)])):
            x, y = Y.points[xs[a]], Y.points[ys[b]]
            failures.append(
                FormulaFailure("two-stop", s, t, x, y, Y.d(x, y), Fraction(int(two[a, b]), Y.denom))
            )
        for a, b in zip(*np.nonzero(one != D[np.ix_(xs, zs)])):
            x, z = Y.points[xs[a]], Y.points[zs[b]]
            failures.append(
                FormulaFailure("one-stop", s, t, x, z, Y.d(x, z), Fraction(int(one[a, b]), Y.denom))
            )
    return failures


def restriction_failures(rho: MetricSpace, family: SpaceFamily) -> list[tuple[int, str, str, Fraction, Fraction]]:
    """Pairs where the amalgam distance differs from a member's own distance."""
    out = []
    for s, m in enumerate(family.members):
        for x, y in m.pairs():
            if rho.d(x, y) != m.d(x, y):
                out.append((s, x, y, m.d(x, y), rho.d(x, y)))
    return out


def delta_separation(family: SpaceFamily) -> Fraction | None:
    """Least spoke distance from a non-hub point to a hub point (``None`` if no such pair)."""
    if family.hub is None:
        raise MetricError("family has no hub")
    hub = family.members[family.hub]
    best = None
    for s, m in enumerate(family.members):
        if s == family.hub:
            continue
        for x in m.points:
            if x in hub:
                continue
            for y in m.points:
                if y in hub:
                    v = m.d(x, y)
                    best = v if best is None else min(best, v)
    return best


# }}}
