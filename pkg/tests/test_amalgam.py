from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given

from rigidmetric import formats
from rigidmetric.amalgam import (
    DisconnectedFamilyError,
    QuotientError,
    amalgamate,
    amalgamate_pseudometric,
    delta_separation,
    oracle_pseudometric,
    pair_distance,
    quotient_to_metric,
    restriction_failures,
    verify_hub_formulas,
)
from rigidmetric.family import SpaceFamily, build_graph
from rigidmetric.space import PSEUDOMETRIC, MetricError, check_space, make_space
from strategies import hub_families


def _load(fixtures_dir, name):
    return formats.family_from_json(formats.load(fixtures_dir / name))


def test_hedgehog(fixtures_dir):
    res = amalgamate(_load(fixtures_dir, "hedgehog.family.json"))
    assert res.space.d("a", "b") == 2
    assert res.hub_preserved and res.merged == {}
    assert verify_hub_formulas(res) == []


def test_triangle_counterexample_distances(fixtures_dir):
    fam = _load(fixtures_dir, "triangle.family.json")
    rho = amalgamate_pseudometric(fam)
    assert rho.d("1", "2") == 2
    assert restriction_failures(rho, fam) == [(2, "1", "2", Fraction(3), Fraction(2))]
    with pytest.raises(MetricError):
        amalgamate(fam)


def test_pseudometric_member_is_merged_onto_hub():
    hub = make_space(["h", "k"], {"h|k": 1})
    spoke = make_space(["a", "h", "k"], {"a|h": 0, "a|k": 1, "h|k": 1}, PSEUDOMETRIC)
    res = amalgamate(SpaceFamily((hub, spoke), hub=0))
    assert res.space.points == ("h", "k")
    assert res.merged == {"h": ("a", "h")}
    assert res.embeddings[1] == {"a": "h", "h": "h", "k": "k"}
    assert res.hub_preserved


def test_quotient_refuses_two_preferred_points():
    P = make_space(["a", "b"], {"a|b": 0}, PSEUDOMETRIC)
    with pytest.raises(QuotientError):
        quotient_to_metric(P, ["a", "b"])
    assert quotient_to_metric(P).space.points == ("a",)


def test_disconnected():
    fam = SpaceFamily((make_space(["a", "b"], {"a|b": 1}), make_space(["c", "d"], {"c|d": 1})))
    with pytest.raises(DisconnectedFamilyError):
        amalgamate_pseudometric(fam)
    with pytest.raises(DisconnectedFamilyError):
        pair_distance(build_graph(fam), "a", "c")


def test_delta_separation():
    hub = make_space(["h"], {})
    fam = SpaceFamily((hub, make_space(["a", "h"], {"a|h": "1/2"}), make_space(["b", "h"], {"b|h": 2})), hub=0)
    assert delta_separation(fam) == Fraction(1, 2)
    assert amalgamate(fam).space.d("a", "b") == Fraction(5, 2)
    assert delta_separation(SpaceFamily((hub,), hub=0)) is None


def test_corpus_matches_oracle(fixtures_dir):
    for p in sorted(fixtures_dir.glob("*.family.json")):
        fam = formats.family_from_json(formats.load(p))
        g = build_graph(fam)
        if not g.is_connected():
            continue
        assert amalgamate_pseudometric(fam, g) == oracle_pseudometric(fam, g), p.name


@given(hub_families(max_points=9))
def test_hub_amalgam_properties(fam):
    res = amalgamate(fam)
    Y = res.space
    assert check_space(Y).ok
    assert res.hub_preserved
    for s, m in enumerate(fam.members):
        e = res.embeddings[s]
        assert all(Y.d(e[x], e[y]) == m.d(x, y) for x, y in m.pairs())
    assert verify_hub_formulas(res) == []
    rho = amalgamate_pseudometric(fam)
    assert rho == oracle_pseudometric(fam)


@given(hub_families(max_points=9))
def test_pair_distance_agrees_with_networkx(fam):
    g = build_graph(fam)
    rho = amalgamate_pseudometric(fam, g)
    G = g.to_networkx()
    for e, w in g.weight.items():
        x, y = tuple(e)
        G[x][y]["w"] = w
    src = g.vertices[0]
    lengths = nx.single_source_dijkstra_path_length(G, src, weight="w")
    for v in g.vertices:
        assert pair_distance(g, src, v) == lengths[v] == rho.d(src, v)


def test_verify_detects_tampering(fixtures_dir):
    fam = _load(fixtures_dir, "hedgehog.family.json")
    res = amalgamate(fam)
    bad = make_space(["a", "b", "h"], {"a|b": "3/2", "a|h": 1, "b|h": 1})
    tampered = type(res)(bad, res.embeddings, True, res.quotient_classes, fam)
    fails = verify_hub_formulas(tampered)
    assert fails and fails[0].formula == "two-stop"
    assert {f.actual for f in fails} == {Fraction(3, 2)}
