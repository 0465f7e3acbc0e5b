import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidmetric.discrete import (
    WEAK,
    NotDiscreteError,
    Registry,
    ScheduleError,
    SearchBudgetError,
    add_middle_points,
    attach_discrete,
    attachment_failures,
    discrete_character,
    discrete_character_bruteforce,
    find_middle_points,
    hereditarily_without_middle_points,
    hereditarily_without_middle_points_bruteforce,
    middle_candidates,
    middle_failures,
)
from rigidmetric.space import MetricError, MetricSpace, make_space
from strategies import grid_spaces

F = Fraction
HALF_ONE = (F(1, 2), F(1))
# dense in distance-1 cliques and in points at distance 1/2
half_one_spaces = grid_spaces(min_size=2, max_size=7, grid=HALF_ONE, prefix="q")


def test_single_blob():
    X = MetricSpace.discrete(["x"])
    res, reg = attach_discrete(X, (), {"x": 3})
    assert reg.attachments == {"x": ("x", "disc:0:x:0", "disc:0:x:1")}
    assert len(res.space) == 3
    assert all(res.space.d(a, b) == 1 for a, b in res.space.pairs())


def test_tips_of_different_blobs():
    X = make_space(["x", "y"], {"x|y": "1/3"})
    res, reg = attach_discrete(X, (), {"x": 3, "y": 4}, stage=1)
    Y = res.space
    assert Y.d("disc:1:x:0", "disc:1:y:0") == F(7, 3)
    assert attachment_failures(X, res, reg) == []


def test_skip_everything():
    X = make_space(["x", "y"], {"x|y": 1})
    res, reg = attach_discrete(X, X.points, {})
    assert res.space == X and reg.attachments == {}


@pytest.mark.parametrize(
    "skip, schedule, kwargs",
    [
        ((), {"x": 3, "y": 3}, {}),
        (("x",), {"x": 3, "y": 4}, {}),
        ((), {"x": 3}, {}),
        ((), {"x": 1, "y": 3}, {}),
        ((), {"x": 4, "y": 5}, {"threshold": 2}),
        ((), {"x": 3, "y": 4, "z": 5}, {}),
    ],
)
def test_schedule_errors(skip, schedule, kwargs):
    X = make_space(["x", "y"], {"x|y": 1})
    with pytest.raises(ScheduleError):
        attach_discrete(X, skip, schedule, **kwargs)


def test_equal_sizes_allowed_for_ablation():
    X = make_space(["x", "y"], {"x|y": 1})
    res, reg = attach_discrete(X, (), {"x": 3, "y": 3}, distinct=False)
    assert attachment_failures(X, res, reg, distinct=False) == []
    assert [f.rule for f in attachment_failures(X, res, reg)] == ["A2"]


def test_label_collision():
    X = MetricSpace.discrete(["x"])
    with pytest.raises(MetricError):
        attach_discrete(X, (), {"x": 3}, taken={"disc:0:x:1"})


@given(grid_spaces(max_size=5), st.integers(1, 3))
def test_attach_postconditions(X, m):
    sizes = {p: len(X) * m + 1 + i for i, p in enumerate(X.points)}
    res, reg = attach_discrete(X, (), sizes, stage=2, threshold=m)
    assert attachment_failures(X, res, reg) == []
    for x, D in reg.attachments.items():
        # only the root can sit at 1/2 from a point, so m = 1 depends on the base
        if m >= 2:
            assert hereditarily_without_middle_points(res.space, D, m)[0]
        for t in D[1:]:
            assert not set(find_middle_points(res.space, [t])) & set(X.points)


def test_find_middle_points():
    X = make_space(
        ["a", "b", "z", "w"],
        {"a|b": 1, "a|z": "1/2", "b|z": "1/2", "a|w": "3/4", "b|w": "3/4", "w|z": "1/4"},
    )
    assert find_middle_points(X, ["a", "b"]) == ["z"]
    assert find_middle_points(X, ["a", "b"], WEAK) == ["z", "w"]
    assert find_middle_points(X, ["a"]) == ["z"]
    with pytest.raises(NotDiscreteError):
        find_middle_points(X, ["a", "z"])
    with pytest.raises(MetricError):
        find_middle_points(X, [])
    with pytest.raises(MetricError):
        find_middle_points(X, ["a"], "strong")


def test_hereditary_examples():
    D = MetricSpace.discrete(["a", "b", "c"])
    S, reg = add_middle_points(D, [], 2)
    [z] = reg.middles
    ok, wit = hereditarily_without_middle_points(S.space, ["a", "b", "c"], 2)
    assert not ok and wit == (("a", "b"), z)
    assert hereditarily_without_middle_points(S.space, ["a", "b", "c"], 4) == (True, None)
    assert hereditarily_without_middle_points(D, ["a", "b", "c"], 2) == (True, None)
    with pytest.raises(MetricError):
        hereditarily_without_middle_points(D, ["a"], 0)


@given(half_one_spaces, st.integers(1, 3), st.data())
def test_hereditary_matches_bruteforce(X, m, data):
    v = data.draw(st.sampled_from(X.points))
    Y = [v] + [p for p in X.points if X.d(p, v) == 1]
    Y = [p for i, p in enumerate(Y) if all(X.d(p, q) == 1 for q in Y[:i])]
    assert hereditarily_without_middle_points(X, Y, m)[0] == hereditarily_without_middle_points_bruteforce(X, Y, m)


def test_tau_examples():
    assert discrete_character(MetricSpace.discrete("abcd"), "a", 2) == 4
    iso = make_space(["a", "b"], {"a|b": 2})
    assert discrete_character(iso, "a", 1) == 1
    with pytest.raises(MetricError):
        discrete_character(iso, "z", 1)


def test_tau_zero_when_a_singleton_has_a_middle_point():
    X = make_space(["a", "z"], {"a|z": "1/2"})
    assert discrete_character(X, "a", 1) == 0
    assert discrete_character(X, "a", 2) == 1


@given(half_one_spaces, st.integers(1, 3))
def test_tau_matches_bruteforce(X, m):
    for x in X.points:
        assert discrete_character(X, x, m) == discrete_character_bruteforce(X, x, m)


def test_tau_budget():
    X = MetricSpace.discrete([f"p{i}" for i in range(12)])
    with pytest.raises(SearchBudgetError):
        discrete_character(X, "p0", 2, budget=3)


def _candidates_bruteforce(X, protected, m):
    def admissible(Y):
        if not all(X.d(a, b) == 1 for a, b in itertools.combinations(Y, 2)):
            return False
        if not hereditarily_without_middle_points_bruteforce(X, Y, m):
            return False
        return all(len(set(Y) & set(G)) < m for G in protected)

    good = [set(Y) for r in range(len(X) + 1) for Y in itertools.combinations(X.points, r) if admissible(Y)]
    maximal = [Y for Y in good if not any(Y < Z for Z in good)]
    return sorted(tuple(p for p in X.points if p in Y) for Y in maximal if len(Y) >= m)


@given(half_one_spaces, st.integers(1, 3))
def test_candidates_match_bruteforce(X, m):
    assert sorted(middle_candidates(X, [], m)) == _candidates_bruteforce(X, [], m)


@given(grid_spaces(max_size=3), st.integers(1, 2))
def test_candidates_with_protection_match_bruteforce(X, m):
    sizes = {p: len(X) * m + 1 + i for i, p in enumerate(X.points)}
    A, reg = attach_discrete(X, (), sizes, threshold=m)
    if len(A.space) > 11:
        return
    protected = list(reg.attachments.values())
    got = sorted(middle_candidates(A.space, protected, m))
    assert got == _candidates_bruteforce(A.space, protected, m)


def test_s_on_discrete_space():
    D = MetricSpace.discrete(["a", "b"])
    S, reg = add_middle_points(D, [], 2, stage=5)
    assert reg.middles == {"mid:5:0": ("a", "b")}
    assert S.space.d("mid:5:0", "a") == F(1, 2)
    assert middle_failures(D, S, reg, [], 2) == []


def test_s_respects_protection():
    X = MetricSpace.discrete(["x"])
    A, reg = attach_discrete(X, (), {"x": 4}, threshold=2)
    protected = list(reg.attachments.values())
    S, sreg = add_middle_points(A.space, protected, 2)
    assert sreg.middles == {}
    assert middle_failures(A.space, S, sreg, protected, 2) == []
    S2, sreg2 = add_middle_points(A.space, [], 2)
    assert list(sreg2.middles.values()) == [reg.attachments["x"]]


def test_s_separation_between_added_points():
    X = make_space(
        ["a", "b", "c", "d"],
        {"a|b": 1, "c|d": 1, "a|c": 2, "a|d": 2, "b|c": 2, "b|d": 2},
    )
    S, reg = add_middle_points(X, [], 2)
    assert len(reg.middles) == 2
    z1, z2 = reg.middles
    assert S.space.d(z1, z2) == F(1, 2) + 2 + F(1, 2)
    assert middle_failures(X, S, reg, [], 2) == []


def test_registry_merge_rejects_double_attachment():
    a = Registry({"x": ("x", "t")})
    with pytest.raises(ScheduleError):
        a.merged_with(Registry({"x": ("x", "u")}))
    assert a.merged_with(Registry({}, {"z": ("x",)})).middles == {"z": ("x",)}
