import itertools
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidmetric.family import (
    HubConditionError,
    IncompatibleFamilyError,
    SpaceFamily,
    build_graph,
    check_compatibility,
    check_hub_condition,
    induced_cycle_condition,
    path_weight,
    reduce_path,
    simple_paths,
)
from rigidmetric.amalgam import amalgamate
from rigidmetric.space import MetricError, MetricSpace, UnknownPointError, make_space
from strategies import hub_families


def _seg(a, b, d):
    return make_space([a, b], {f"{min(a, b)}|{max(a, b)}": d})


def test_incompatible_members_are_named():
    fam = SpaceFamily((_seg("a", "b", 1), _seg("a", "b", 2)))
    [c] = check_compatibility(fam)
    assert (c.s, c.t, c.x, c.y, c.ds, c.dt) == (0, 1, "a", "b", 1, 2)
    with pytest.raises(IncompatibleFamilyError):
        build_graph(fam)


def test_graph_edges_weights_and_witnesses():
    fam = SpaceFamily((_seg("a", "b", 1), _seg("b", "c", "1/2"), _seg("a", "b", 1)))
    g = build_graph(fam)
    assert g.vertices == ("a", "b", "c")
    assert g.edge_weight("b", "c") == Fraction(1, 2)
    assert g.witness[frozenset("ab")] == (0, 2)
    assert not g.has_edge("a", "c")
    assert g.is_connected()
    with pytest.raises(MetricError):
        g.edge_weight("a", "c")


def test_disconnected_graph():
    fam = SpaceFamily((_seg("a", "b", 1), _seg("c", "d", 1)))
    assert not build_graph(fam).is_connected()


def test_path_weight_and_errors():
    g = build_graph(SpaceFamily((_seg("a", "b", 1), _seg("b", "c", 2))))
    assert path_weight(g, ["a", "b", "c"]) == 3
    assert path_weight(g, ["a"]) == 0
    with pytest.raises(MetricError):
        path_weight(g, ["a", "c"])
    with pytest.raises(UnknownPointError):
        path_weight(g, ["a", "z"])
    with pytest.raises(MetricError):
        path_weight(g, [])


def test_reduce_path_cuts_detours():
    fam = SpaceFamily((MetricSpace.discrete("abcd"),))
    g = build_graph(fam)
    assert reduce_path(g, list("abcbd")) == list("abd")
    assert reduce_path(g, list("abcad")) == list("ad")
    with pytest.raises(MetricError):
        reduce_path(g, list("aba"))


@given(hub_families(max_points=8), st.data())
def test_reduce_path_properties(fam, data):
    g = build_graph(fam)
    if len(g.vertices) < 2:
        return
    start = data.draw(st.sampled_from(g.vertices))
    walk = [start]
    for _ in range(data.draw(st.integers(1, 10))):
        walk.append(data.draw(st.sampled_from(g.neighbors(walk[-1]))))
    if walk[0] == walk[-1]:
        return
    red = reduce_path(g, walk)
    assert red[0] == walk[0] and red[-1] == walk[-1]
    assert len(set(red)) == len(red)
    assert path_weight(g, red) <= path_weight(g, walk)
    assert reduce_path(g, red) == red
    it = iter(walk)
    assert all(v in it for v in red)


def test_simple_paths_matches_networkx(fixtures_dir):
    from rigidmetric import formats

    for p in sorted(fixtures_dir.glob("hub_0*.family.json")):
        g = build_graph(formats.family_from_json(formats.load(p)))
        G = g.to_networkx()
        for x, y in itertools.combinations(g.vertices[:4], 2):
            ours = sorted(map(tuple, simple_paths(g, x, y)))
            theirs = sorted(map(tuple, nx.all_simple_paths(G, x, y)))
            assert ours == theirs


def test_triangle_cycle_counterexample():
    fam = SpaceFamily((_seg("0", "1", 1), _seg("0", "2", 1), _seg("1", "2", 3)))
    c = induced_cycle_condition(fam)
    assert not c.holds and c.counterexample == ("0", "1", "2")
    assert c.exhaustive and c.cycles_checked == 1
    assert not induced_cycle_condition(fam, max_cycle_len=2).exhaustive


def test_cycle_inside_a_member_is_fine():
    tri = make_space(["a", "b", "c"], {"a|b": 1, "b|c": 1, "a|c": 1})
    fam = SpaceFamily((tri, _seg("a", "b", 1)))
    assert induced_cycle_condition(fam).holds


def test_square_with_chord_is_not_induced():
    square = SpaceFamily(
        (_seg("a", "b", 1), _seg("b", "c", 1), _seg("c", "d", 1), _seg("a", "d", 1), _seg("a", "c", 2))
    )
    c = induced_cycle_condition(square)
    # the two triangles through the chord are induced and uncovered
    assert not c.holds and c.counterexample == ("a", "b", "c")


@given(hub_families())
def test_hub_families_satisfy_the_cycle_hypothesis(fam):
    assert check_hub_condition(fam) == []
    assert induced_cycle_condition(fam).holds


def test_hub_condition_violations():
    hub = _seg("h", "k", 1)
    far = _seg("a", "b", 1)
    fam = SpaceFamily((hub, far), hub=0)
    assert [v.condition for v in check_hub_condition(fam)] == ["i"]

    s1 = make_space(["h", "x"], {"h|x": 1})
    s2 = make_space(["k", "x"], {"k|x": 1})
    fam = SpaceFamily((hub, s1, s2), hub=0)
    [v] = check_hub_condition(fam)
    assert v.condition == "ii" and v.witness == ("x",)
    with pytest.raises(HubConditionError):
        amalgamate(fam)

    fam = SpaceFamily((hub, _seg("h", "k", 2)), hub=0)
    [v] = check_hub_condition(fam)
    assert v.condition == "iii" and v.witness == ("h", "k")


def test_hub_index_range():
    with pytest.raises(MetricError):
        SpaceFamily((MetricSpace.discrete("a"),), hub=3)
