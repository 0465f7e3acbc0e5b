"""One-point extensions and the extension operator built from a finite catalog of them."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .amalgam import AmalgamResult, amalgamate
from .family import SpaceFamily
from .space import MetricError, MetricSpace, restrict


@dataclass(frozen=True)
class KatetovViolation:
    x: str
    y: str
    bound: str  # "lower": |f(x)-f(y)| > d(x,y); "upper": d(x,y) > f(x)+f(y)
    detail: str


def katetov_admissible(
    base: MetricSpace, f: Mapping[str, Fraction]
) -> tuple[bool, KatetovViolation | None]:
    """Whether ``base`` plus a new point at distances ``f`` is still a metric space."""
    missing = [p for p in base.points if p not in f]
    if missing:
        raise MetricError(f"extension vector has no value at {missing[0]!r}")
    extra = [p for p in f if p not in base]
    if extra:
        raise MetricError(f"extension vector mentions unknown point {extra[0]!r}")
    for p in base.points:
        if Fraction(f[p]) <= 0:
            raise MetricError(f"extension distance to {p!r} must be positive, got {f[p]}")
    for x, y in base.pairs():
        fx, fy, dxy = Fraction(f[x]), Fraction(f[y]), base.d(x, y)
        if abs(fx - fy) > dxy:
            return False, KatetovViolation(x, y, "lower", f"|{fx} - {fy}| > {dxy}")
        if dxy > fx + fy:
            return False, KatetovViolation(x, y, "upper", f"{dxy} > {fx} + {fy}")
    return True, None


@dataclass(frozen=True)
class ExtensionVector:
    base: tuple[str, ...]
    values: dict[str, Fraction]
    label: str


@dataclass(frozen=True)
class ExtensionCatalog:
    grid: tuple[Fraction, ...]
    entries: tuple[ExtensionVector, ...]

    def __len__(self) -> int:
        return len(self.entries)


def _admissible_vectors(
    space: MetricSpace, subset: Sequence[str], grid: Sequence[Fraction]
) -> Iterable[tuple[Fraction, ...]]:
    # depth-first over the subset, pruning as soon as a pair fails
    k = len(subset)
    dist = [[space.d(a, b) for b in subset] for a in subset]
    chosen: list[Fraction] = []

    def rec(i: int):
        if i == k:
            yield tuple(chosen)
            return
        for v in grid:
            if all(abs(v - chosen[j]) <= dist[i][j] <= v + chosen[j] for j in range(i)):
                chosen.append(v)
                yield from rec(i + 1)
                chosen.pop()

    yield from rec(0)


def enumerate_extensions(
    base: MetricSpace,
    grid: Iterable[Fraction],
    subset_size_cap: int,
    *,
    stage: int = 0,
    taken: Iterable[str] = (),
) -> ExtensionCatalog:
    """Every grid-valued admissible one-point extension of every small nonempty subset.

    Subsets are visited by size, then in point order; vectors in grid order.
    Labels are ``ext:<stage>:<counter>``, skipping any label in ``taken``
    or in ``base``.
    """
    values = tuple(sorted({Fraction(v) for v in grid}))
    if not values:
        raise MetricError("empty grid")
    if values[0] <= 0:
        raise MetricError("grid values must be positive")
    if subset_size_cap < 1:
        raise MetricError("subset size cap must be at least 1")
    used = set(taken) | set(base.points)
    counter = itertools.count()
    entries = []
    for size in range(1, min(subset_size_cap, len(base)) + 1):
        for subset in itertools.combinations(base.points, size):
            for vec in _admissible_vectors(base, subset, values):
                label = f"ext:{stage}:{next(counter)}"
                while label in used:
                    label = f"ext:{stage}:{next(counter)}"
                used.add(label)
                entries.append(ExtensionVector(subset, dict(zip(subset, vec)), label))
    return ExtensionCatalog(values, tuple(entries))


def count_admissible_bruteforce(
    base: MetricSpace, grid: Iterable[Fraction], subset: Sequence[str]
) -> int:
    """Count admissible grid vectors on ``subset`` by checking all of grid^|subset|."""
    sub = restrict(base, subset)
    vals = sorted({Fraction(v) for v in grid})
    return sum(
        katetov_admissible(sub, dict(zip(subset, vec)))[0]
        for vec in itertools.product(vals, repeat=len(subset))
    )


def extension_space(base: MetricSpace, entry: ExtensionVector) -> MetricSpace:
    """``base``-subset plus the new point, as a standalone metric space."""
    sub = restrict(base, entry.base)
    pts = list(entry.base) + [entry.label]
    n = len(pts)
    mat = [[Fraction(0)] * n for _ in range(n)]
    for i, x in enumerate(entry.base):
        for j, y in enumerate(entry.base):
            mat[i][j] = sub.d(x, y)
        mat[i][n - 1] = mat[n - 1][i] = Fraction(entry.values[x])
    return MetricSpace.from_fraction_matrix(pts, mat)


def f_extend(X: MetricSpace, catalog: ExtensionCatalog) -> AmalgamResult:
    """Amalgamate ``X`` with every cataloged one-point extension, ``X`` as the hub."""
    members = [X]
    seen = set(X.points)
    for entry in catalog.entries:
        if entry.label in seen:
            raise MetricError(f"label {entry.label!r} collides with an existing point")
        seen.add(entry.label)
        for p in entry.base:
            if p not in X:
                raise MetricError(f"catalog entry {entry.label} uses unknown point {p!r}")
        ok, why = katetov_admissible(restrict(X, entry.base), entry.values)
        if not ok:
            raise MetricError(f"catalog entry {entry.label} is not admissible: {why.detail}")
        members.append(extension_space(X, entry))
    return amalgamate(SpaceFamily(tuple(members), hub=0))


def added_points(result: AmalgamResult, base: MetricSpace) -> list[str]:
    return [p for p in result.space.points if p not in base]


def added_point_distances(
    result: AmalgamResult, base: MetricSpace, x: str, y: str
) -> tuple[Fraction, Fraction, Fraction]:
    """``(inf_form, sup_form, actual)`` for two points added over ``base``.

    ``inf_form`` is the least ``d(x,z) + d(z,y)`` over ``z`` in the base,
    ``sup_form`` the largest ``|d(x,z) - d(y,z)|``.
    """
    Y = result.space
    for p in (x, y):
        if p in base or p not in Y:
            raise MetricError(f"{p!r} is not a point added over the base")
    if x == y:
        return Fraction(0), Fraction(0), Fraction(0)
    inf_form = min(Y.d(x, z) + Y.d(z, y) for z in base.points)
    sup_form = max(abs(Y.d(x, z) - Y.d(y, z)) for z in base.points)
    return inf_form, sup_form, Y.d(x, y)


# {{{ weak middle points


def is_weak_middle(space: MetricSpace, x: str, D: Sequence[str]) -> bool:
    if not D:
        return False
    ds = {space.d(x, y) for y in D}
    return len(ds) == 1 and next(iter(ds)) < 1


def spoke_base(result: AmalgamResult, x: str) -> tuple[str, ...]:
    """Hub points of the (first) member whose copy contains ``x``."""
    fam = result.family
    if fam is None or fam.hub is None:
        raise MetricError("result carries no hub family")
    hub = fam.members[fam.hub]
    for s, m in enumerate(fam.members):
        if s != fam.hub and x in result.embeddings[s].values():
            return tuple(result.embeddings[s][p] for p in m.points if p in hub)
    raise MetricError(f"{x!r} was not added by this amalgam")


def find_base_weak_middle(
    result: AmalgamResult, D: Sequence[str], x: str, eps: Fraction
) -> tuple[str, tuple[str, ...]]:
    """Move a weak middle point of ``D`` into the hub.

    ``x`` relays to the hub through its base ``Z``.  Each ``y`` in ``D`` is
    sent to its first minimizing relay ``z`` in ``Z``; the largest class
    ``D'`` (ties: earlier ``z``) has ``|D'| >= ceil(|D|/|Z|)`` and the
    common relay is a weak middle point of ``D'`` inside the hub.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise MetricError("epsilon must be positive")
    Y = result.space
    if not is_weak_middle(Y, x, D):
        raise MetricError(f"{x!r} is not a weak middle point of the given set")
    Z = spoke_base(result, x)
    fibers: dict[str, list[str]] = {z: [] for z in Z}
    for y in D:
        target = Y.d(x, y)
        z = next(z for z in Z if Y.d(x, z) + Y.d(z, y) == target)
        fibers[z].append(y)
    z_best = max(Z, key=lambda z: (len(fibers[z]), -Z.index(z)))
    D_prime = tuple(fibers[z_best])
    assert len(D_prime) >= math.ceil(len(D) / len(Z))
    assert is_weak_middle(Y, z_best, D_prime)
    lhs = Y.d(x, z_best) + min(Y.d(z_best, y) for y in D_prime)
    assert lhs < min(Y.d(x, y) for y in D) + eps
    return z_best, D_prime


# }}}
