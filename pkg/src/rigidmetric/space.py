"""Finite metric and pseudometric spaces with exact rational distances."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import _kernels
from .rational import common_denominator

METRIC = "metric"
PSEUDOMETRIC = "pseudometric"
KINDS = (METRIC, PSEUDOMETRIC)


class MetricError(ValueError):
    """Base class for contract violations raised by this package."""


class UnknownPointError(MetricError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class InvalidSpaceError(MetricError):
    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        head = "; ".join(v.describe() for v in self.violations[:5])
        more = len(self.violations) - 5
        super().__init__(head + (f" (+{more} more)" if more > 0 else ""))


def pair_key(x: str, y: str) -> str:
    a, b = sorted((x, y))
    return f"{a}|{b}"


def _int_matrix(values: list[list[int]]) -> np.ndarray:
    n = len(values)
    biggest = max((abs(v) for row in values for v in row), default=0)
    if biggest * 4 * max(n, 1) < _kernels.INT64_SAFE:
        arr = np.array(values, dtype=np.int64).reshape(n, n)
    else:
        arr = np.empty((n, n), dtype=object)
        for i, row in enumerate(values):
            for j, v in enumerate(row):
                arr[i, j] = int(v)
    return arr


def _canonical(scaled: np.ndarray, denom: int) -> tuple[np.ndarray, int]:
    """Divide out the gcd of all entries and the denominator."""
    g = denom
    if scaled.size and scaled.dtype == np.int64:
        g = math.gcd(g, int(np.gcd.reduce(scaled.ravel())))
    else:
        for v in scaled.ravel().tolist():
            g = math.gcd(g, int(v))
            if g == 1:
                break
    if g > 1:
        if scaled.dtype == object:
            scaled = scaled // g
        else:
            scaled = scaled // np.int64(g)
        denom //= g
    if scaled.dtype == object:
        scaled = _int_matrix(scaled.tolist())
    return scaled, denom


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """An immutable finite (pseudo)metric space.

    Distances are ``scaled[i, j] / denom`` with integer ``scaled``.  Use
    :func:`validate_space` to build one from untrusted data; the
    ``from_*`` constructors trust their input.
    """

    points: tuple[str, ...]
    scaled: np.ndarray = field(repr=False)
    denom: int = 1
    kind: str = METRIC

    def __post_init__(self) -> None:
        self.scaled.setflags(write=False)
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.points)})

    # {{{ construction

    @classmethod
    def from_fraction_matrix(
        cls, points: Sequence[str], matrix: Sequence[Sequence[Fraction]], kind: str = METRIC
    ) -> "MetricSpace":
        flat = [Fraction(v) for row in matrix for v in row]
        den = common_denominator(flat)
        values = [[int(Fraction(v) * den) for v in row] for row in matrix]
        scaled, den = _canonical(_int_matrix(values), den)
        return cls(tuple(points), scaled, den, kind)

    @classmethod
    def from_pairs(
        cls,
        points: Sequence[str],
        dist: Mapping[tuple[str, str], Fraction],
        kind: str = METRIC,
    ) -> "MetricSpace":
        """Build from a ``(x, y) -> d`` mapping covering every unordered pair."""
        pts = tuple(points)
        n = len(pts)
        mat = [[Fraction(0)] * n for _ in range(n)]
        for i, j in itertools.combinations(range(n), 2):
            x, y = pts[i], pts[j]
            v = dist[(x, y)] if (x, y) in dist else dist[(y, x)]
            mat[i][j] = mat[j][i] = Fraction(v)
        return cls.from_fraction_matrix(pts, mat, kind)

    @classmethod
    def from_scaled(
        cls, points: Sequence[str], scaled: np.ndarray, denom: int, kind: str = METRIC
    ) -> "MetricSpace":
        scaled, denom = _canonical(np.array(scaled, copy=True), int(denom))
        return cls(tuple(points), scaled, denom, kind)

    @classmethod
    def discrete(cls, points: Sequence[str]) -> "MetricSpace":
        n = len(points)
        scaled = np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64)
        return cls(tuple(points), scaled, 1, METRIC)

    @classmethod
    def empty(cls, kind: str = METRIC) -> "MetricSpace":
        return cls((), np.zeros((0, 0), dtype=np.int64), 1, kind)

    # }}}

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[str]:
        return iter(self.points)

    def __contains__(self, label: object) -> bool:
        return label in self._index  # type: ignore[attr-defined]

    def index(self, label: str) -> int:
        try:
            return self._index[label]  # type: ignore[attr-defined]
        except KeyError:
            raise UnknownPointError(f"point {label!r} is not in the space") from None

    def d(self, x: str, y: str) -> Fraction:
        return Fraction(int(self.scaled[self.index(x), self.index(y)]), self.denom)

    def fraction_matrix(self) -> list[list[Fraction]]:
        return [[Fraction(int(v), self.denom) for v in row] for row in self.scaled.tolist()]

    def pairs(self) -> Iterator[tuple[str, str]]:
        return itertools.combinations(self.points, 2)

    def distance_table(self) -> dict[tuple[str, str], Fraction]:
        """Distances keyed by label pairs in lexicographic order."""
        out = {}
        for x, y in self.pairs():
            a, b = sorted((x, y))
            out[(a, b)] = self.d(x, y)
        return out

    def rescaled(self, denom: int) -> np.ndarray:
        """Integer matrix over a multiple ``denom`` of this space's denominator."""
        if denom % self.denom:
            raise ValueError(f"{denom} is not a multiple of {self.denom}")
        factor = denom // self.denom
        if self.scaled.dtype == np.int64 and int(np.abs(self.scaled).max(initial=0)) * factor * 4 * max(
            len(self), 1
        ) < _kernels.INT64_SAFE:
            return self.scaled * np.int64(factor)
        return _int_matrix([[int(v) * factor for v in row] for row in self.scaled.tolist()])

    def with_kind(self, kind: str) -> "MetricSpace":
        return MetricSpace(self.points, self.scaled, self.denom, kind)

    def same_as(self, other: "MetricSpace") -> bool:
        """Equal point sets and equal distances (point order ignored)."""
        if set(self.points) != set(other.points) or self.kind != other.kind:
            return False
        return all(self.d(x, y) == other.d(x, y) for x, y in self.pairs())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MetricSpace):
            return NotImplemented
        return self.same_as(other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"MetricSpace(kind={self.kind!r}, points={list(self.points)!r})"


# {{{ validation


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple[str, ...]
    detail: str = ""
    slack: Fraction | None = None

    def describe(self) -> str:
        return f"{self.axiom} at ({', '.join(self.witness)}): {self.detail}"


@dataclass
class Validation:
    space: MetricSpace | None
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations


def _split_key(key: object) -> tuple[str, str]:
    if isinstance(key, str):
        parts = key.split("|")
        if len(parts) != 2:
            raise MetricError(f"malformed pair key {key!r}")
        return parts[0], parts[1]
    x, y = key  # type: ignore[misc]
    return str(x), str(y)


def _as_fraction(value: object) -> Fraction:
    if isinstance(value, bool):
        raise MetricError(f"not a distance: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise MetricError(f"malformed distance {value!r}") from None
    raise MetricError(f"not a distance: {value!r}")


def validate_space(
    points: Iterable[str], table: Mapping[object, object], kind: str = METRIC
) -> Validation:
    """Check a raw point list and distance table against the (pseudo)metric axioms.

    ``table`` keys are ``"a|b"`` strings or label pairs; values are
    rationals or their text form.  Every problem found is reported, not just
    the first.  The triangle scan only runs once the table is complete and
    nonnegative.
    """
    if kind not in KINDS:
        raise MetricError(f"unknown kind {kind!r}")
    pts = list(points)
    bad: list[Violation] = []
    seen: set[str] = set()
    for p in pts:
        if not isinstance(p, str) or "|" in p or p == "":
            bad.append(Violation("bad-label", (str(p),), "labels are nonempty strings without '|'"))
        if p in seen:
            bad.append(Violation("duplicate-point", (p,), "label listed twice"))
        seen.add(p)

    values: dict[frozenset, Fraction] = {}
    raw_order: dict[frozenset, tuple[str, str]] = {}
    for key, raw in table.items():
        x, y = _split_key(key)
        unknown = [p for p in (x, y) if p not in seen]
        if unknown:
            bad.append(Violation("unknown-point", (x, y), f"{unknown[0]!r} is not a listed point"))
            continue
        v = _as_fraction(raw)
        if x == y:
            if v != 0:
                bad.append(Violation("self-distance", (x, x), f"d({x},{x}) = {v} != 0"))
            continue
        k = frozenset((x, y))
        if k in values and values[k] != v:
            bad.append(
                Violation(
                    "asymmetric",
                    (x, y),
                    f"d({raw_order[k][0]},{raw_order[k][1]}) = {values[k]} but d({x},{y}) = {v}",
                )
            )
            continue
        values[k] = v
        raw_order[k] = (x, y)
        if v < 0:
            bad.append(Violation("negative", tuple(sorted((x, y))), f"value {v} < 0"))
        elif v == 0 and kind == METRIC:
            bad.append(Violation("identity", tuple(sorted((x, y))), "zero distance between distinct points"))

    uniq = list(dict.fromkeys(pts))
    complete = True
    for x, y in itertools.combinations(uniq, 2):
        if frozenset((x, y)) not in values:
            complete = False
            bad.append(Violation("missing-pair", tuple(sorted((x, y))), "no distance given"))
    if any(v.axiom in ("negative", "asymmetric", "duplicate-point", "bad-label") for v in bad):
        complete = False
    if not complete:
        return Validation(None, bad)

    space = MetricSpace.from_pairs(
        uniq, {tuple(raw_order[k]): v for k, v in values.items()}, kind  # type: ignore[misc]
    )
    for i, j, k in _kernels.triangle_violations(space.scaled).tolist():
        x, y, z = space.points[i], space.points[j], space.points[k]
        lhs, a, b = space.d(x, z), space.d(x, y), space.d(y, z)
        bad.append(
            Violation(
                "triangle",
                (x, y, z),
                f"d({x},{z}) = {lhs} > d({x},{y}) + d({y},{z}) = {a + b}",
                slack=lhs - a - b,
            )
        )
    return Validation(None if bad else space, bad)


def check_space(space: MetricSpace) -> Validation:
    """Re-run every axiom on an existing space."""
    return validate_space(space.points, space.distance_table(), space.kind)


def make_space(
    points: Iterable[str], table: Mapping[object, object], kind: str = METRIC
) -> MetricSpace:
    """Like :func:`validate_space` but raises :class:`InvalidSpaceError`."""
    result = validate_space(points, table, kind)
    if not result.ok:
        raise InvalidSpaceError(result.violations)
    assert result.space is not None
    return result.space


# }}}

# {{{ basic operations


def restrict(space: MetricSpace, members: Iterable[str]) -> MetricSpace:
    """The subspace on ``members``, in the order given."""
    labels = list(dict.fromkeys(members))
    idx = [space.index(p) for p in labels]
    sub = space.scaled[np.ix_(idx, idx)] if idx else np.zeros((0, 0), dtype=space.scaled.dtype)
    return MetricSpace.from_scaled(labels, sub, space.denom, space.kind)


def is_discrete(space: MetricSpace) -> bool:
    n = len(space)
    if n < 2:
        return True
    off = ~np.eye(n, dtype=bool)
    return bool(np.all(space.scaled[off] == space.denom))


def relayed_distance(
    space: MetricSpace, x: str, stops: Sequence[Iterable[str]], y: str
) -> Fraction:
    """Least weight of ``x z_1 ... z_n y`` with each ``z_i`` drawn from ``stops[i]``."""
    ix, iy = space.index(x), space.index(y)
    layers = []
    for k, stop in enumerate(stops):
        layer = [space.index(z) for z in dict.fromkeys(stop)]
        if not layer:
            raise MetricError(f"stop set {k} is empty")
        layers.append(layer)
    D = space.scaled
    best = {ix: 0}
    for layer in layers:
        best = {z: min(c + int(D[u, z]) for u, c in best.items()) for z in layer}
    total = min(c + int(D[u, iy]) for u, c in best.items())
    return Fraction(total, space.denom)


def set_distance(space: MetricSpace, x: str, targets: Iterable[str]) -> Fraction:
    """``min`` of ``d(x, t)`` over a nonempty target set."""
    tg = list(targets)
    if not tg:
        raise MetricError("distance to the empty set is undefined")
    return min(space.d(x, t) for t in tg)


# }}}
