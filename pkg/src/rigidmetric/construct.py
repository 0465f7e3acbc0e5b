"""The staged construction X_k = F(S(A(X_{k-1}, X_{k-2}))) and its rigidity report."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .discrete import Registry, SearchBudgetError, ScheduleError, add_middle_points, attach_discrete, discrete_character
from .extension import enumerate_extensions, f_extend
from .isometry import generators, is_identity, isometry_group
from .space import MetricError, MetricSpace, relayed_distance

SEED = "seed"
A_OP, S_OP, F_OP = "A", "S", "F"


class ChainError(MetricError):
    def __init__(self, message: str, witness: tuple = ()):
        self.witness = witness
        super().__init__(message)


class BudgetExceeded(MetricError):
    pass


@dataclass(frozen=True)
class ConstructionConfig:
    """Parameters of one run.

    ``schedule[k][x]`` is the size of the discrete set attached to ``x``
    while building stage ``k`` (so ``x`` is a point new in stage ``k-1``).
    Without a schedule, sizes are assigned automatically: consecutive
    integers in label order, each above every earlier size and above
    ``|X_{k-1}| * threshold``.  ``distinct_sizes=False`` gives every point
    of a stage the same automatic size and lifts the distinctness checks.
    """

    stages: int
    threshold: int
    grid: tuple[Fraction, ...]
    cap: int
    schedule: Mapping[int, Mapping[str, int]] | None = None
    seed: MetricSpace | None = None
    distinct_sizes: bool = True
    budget: int = 2000
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "grid", tuple(sorted({Fraction(v) for v in self.grid})))
        if self.stages < 1:
            raise MetricError("stages must be at least 1")
        if self.threshold < 1:
            raise MetricError("threshold must be at least 1")
        if self.cap < 1:
            raise MetricError("cap must be at least 1")
        if not self.grid or self.grid[0] <= 0:
            raise MetricError("grid must be nonempty and positive")
        if self.schedule is not None and self.distinct_sizes:
            sizes = [s for k in sorted(self.schedule) for s in self.schedule[k].values()]
            dup = [s for s in sizes if sizes.count(s) > 1]
            if dup:
                raise ScheduleError(f"size {dup[0]} is scheduled twice")

    def seed_space(self) -> MetricSpace:
        return self.seed if self.seed is not None else MetricSpace.discrete(("0",))


@dataclass(frozen=True)
class StageTrace:
    config: ConstructionConfig
    spaces: tuple[MetricSpace, ...]
    registries: tuple[Registry, ...]  # cumulative, one per space
    provenance: dict[str, tuple[str, int]]  # point -> (operator, stage)

    @property
    def final(self) -> MetricSpace:
        return self.spaces[-1]

    @property
    def registry(self) -> Registry:
        return self.registries[-1]

    def ranks(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for k, X in enumerate(self.spaces):
            for p in X.points:
                out.setdefault(p, k)
        return out

    def stage_sizes(self) -> list[int]:
        return [len(X) for X in self.spaces]


def is_subspace(small: MetricSpace, big: MetricSpace) -> tuple[bool, tuple]:
    for p in small.points:
        if p not in big:
            return False, (p,)
    for x, y in small.pairs():
        if small.d(x, y) != big.d(x, y):
            return False, (x, y)
    return True, ()


def union_chain(chain: Sequence[MetricSpace]) -> MetricSpace:
    """Union of an increasing chain; every member must be a subspace of the next."""
    if not chain:
        return MetricSpace.empty()
    for k, (a, b) in enumerate(zip(chain, chain[1:])):
        ok, wit = is_subspace(a, b)
        if not ok:
            kind = "point missing" if len(wit) == 1 else "distance disagrees"
            raise ChainError(f"chain step {k}->{k + 1}: {kind} at {wit}", wit)
    return chain[-1]


def _auto_sizes(points: Sequence[str], floor: int, used: set[int], distinct: bool) -> dict[str, int]:
    out = {}
    s = floor
    for p in sorted(points):
        while distinct and s in used:
            s += 1
        out[p] = s
        if distinct:
            used.add(s)
    return out


def _provenance_of(label: str, stage: int) -> tuple[str, int]:
    head = label.split(":", 1)[0]
    op = {"disc": A_OP, "mid": S_OP, "ext": F_OP}.get(head)
    if op is None:
        raise MetricError(f"cannot tell which operator added {label!r}")
    return op, stage


def build_stages(config: ConstructionConfig) -> StageTrace:
    m = config.threshold
    seed = config.seed_space()
    spaces = [MetricSpace.empty(), seed]
    registries = [Registry(), Registry()]
    provenance = {p: (SEED, 1) for p in seed.points}
    used_sizes: set[int] = set()
    for k in range(2, config.stages + 1):
        prev, older = spaces[-1], spaces[-2]
        fresh = [p for p in prev.points if p not in older]
        floor = max([len(prev) * m + 1, 2, *(s + 1 for s in used_sizes)])
        if config.schedule is not None:
            sizes = dict(config.schedule.get(k, {}))
            if config.distinct_sizes:
                clash = used_sizes & set(sizes.values())
                if clash:
                    raise ScheduleError(f"size {min(clash)} was already used")
                used_sizes |= set(sizes.values())
        else:
            if config.distinct_sizes:
                sizes = _auto_sizes(fresh, floor, used_sizes, True)
            else:
                sizes = {p: len(prev) * m + 1 for p in fresh}
        A, reg_a = attach_discrete(
            prev, older.points, sizes, stage=k, threshold=m, distinct=config.distinct_sizes
        )
        if len(A.space) > config.budget:
            raise BudgetExceeded(f"stage {k}: {len(A.space)} points after A exceed budget {config.budget}")
        cumulative = registries[-1].merged_with(reg_a)
        S, reg_s = add_middle_points(
            A.space, list(cumulative.attachments.values()), m, stage=k
        )
        cumulative = cumulative.merged_with(reg_s)
        catalog = enumerate_extensions(S.space, config.grid, config.cap, stage=k)
        if len(S.space) + len(catalog) > config.budget:
            raise BudgetExceeded(
                f"stage {k}: {len(S.space)} points plus {len(catalog)} extensions exceed budget {config.budget}"
            )
        F = f_extend(S.space, catalog)
        X = F.space
        for p in X.points:
            if p not in provenance:
                provenance[p] = _provenance_of(p, k)
        spaces.append(X)
        registries.append(cumulative)
    union_chain(spaces)
    return StageTrace(config, tuple(spaces), tuple(registries), provenance)


# {{{ checks


@dataclass(frozen=True)
class TraceFailure:
    rule: str
    witness: tuple
    detail: str


def trace_failures(trace: StageTrace) -> list[TraceFailure]:
    """Chain, provenance, rank and registry-intersection checks on a finished trace."""
    out = []
    for k, (a, b) in enumerate(zip(trace.spaces, trace.spaces[1:])):
        ok, wit = is_subspace(a, b)
        if not ok:
            out.append(TraceFailure("subspace", (k, *wit), f"X_{k} is not a subspace of X_{k + 1}"))
    ranks = trace.ranks()
    X = trace.final
    for p in X.points:
        if p not in trace.provenance:
            out.append(TraceFailure("provenance", (p,), "no operator recorded"))
            continue
        op, st = trace.provenance[p]
        if ranks[p] != st:
            out.append(TraceFailure("rank", (p,), f"rank {ranks[p]} but added at stage {st}"))
    atts = trace.registry.attachments
    for x, y in itertools.combinations(atts, 2):
        common = set(atts[x]) & set(atts[y])
        if len(common) > 1:
            out.append(TraceFailure("intersection", (x, y), f"|D_x ∩ D_y| = {len(common)}"))
    for x, D in atts.items():
        for t in X.points:
            for y in D:
                if X.d(t, y) != relayed_distance(X, t, [D], y):
                    out.append(TraceFailure("relay", (x, t, y), "distance not realized through D_x"))
    return out


def minimal_relay_set(X: MetricSpace, t: str, D: Sequence[str]) -> tuple[str, ...]:
    """Shrink ``D`` greedily while every ``d(t, y)``, ``y`` in ``D``, is still realized through it."""
    Z = list(D)
    for z in list(D):
        trial = [w for w in Z if w != z]
        if trial and all(X.d(t, y) == relayed_distance(X, t, [trial], y) for y in D):
            Z = trial
    return tuple(Z)


@dataclass
class RigidityReport:
    size: int
    group_size: int
    group_truncated: bool
    generators: list[dict[str, str]]
    tau: dict[str, int | None]
    attachment_sizes: dict[str, int]
    tau_matches_size: bool
    tau_distinct: bool
    rigid: bool
    unattached: list[str]
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def rigidity_report(
    trace: StageTrace,
    *,
    full_tau: bool = False,
    group_limit: int | None = 100_000,
    tau_budget: int = 2_000_000,
) -> RigidityReport:
    """Isometry group of the final space and the discrete characters of its attached points.

    The claims checked are: each attached point has character equal to the
    size of its attached set, those characters are pairwise distinct, and
    the group is trivial.  The last one is decided by enumeration only.
    """
    X = trace.final
    m = trace.config.threshold
    group = isometry_group(X, limit=group_limit)
    truncated = group_limit is not None and len(group) >= group_limit
    sizes = trace.registry.sizes()
    who = list(X.points) if full_tau else list(sizes)
    tau: dict[str, int | None] = {}
    for x in who:
        try:
            tau[x] = discrete_character(X, x, m, budget=tau_budget)
        except SearchBudgetError:
            tau[x] = None
    failures = []
    match = all(tau.get(x) == s for x, s in sizes.items())
    for x, s in sizes.items():
        if tau.get(x) != s:
            failures.append(f"tau({x}) = {tau.get(x)} but |D_{x}| = {s}")
    reg_tau = [tau[x] for x in sizes]
    distinct = len(set(reg_tau)) == len(reg_tau) and None not in reg_tau
    if not distinct:
        failures.append(f"characters of attached points collide: {dict(zip(sizes, reg_tau))}")
    rigid = len(group) == 1
    if not rigid:
        witness = next(f for f in group if not is_identity(f))
        moved = {k: v for k, v in witness.items() if k != v}
        failures.append(f"non-identity isometry moves {moved}")
    for f in group:
        for x, t in tau.items():
            if t is not None and f[x] in tau and tau[f[x]] is not None and tau[f[x]] != t:
                failures.append(f"isometry sends {x} to {f[x]} but their characters differ")
    unattached = [p for p in X.points if p not in sizes]
    return RigidityReport(
        size=len(X),
        group_size=len(group),
        group_truncated=truncated,
        generators=generators(group) if len(group) <= 5000 else [],
        tau=tau,
        attachment_sizes=sizes,
        tau_matches_size=match,
        tau_distinct=distinct,
        rigid=rigid,
        unattached=unattached,
        failures=failures,
    )


# }}}
