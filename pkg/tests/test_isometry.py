import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidmetric.extension import enumerate_extensions, f_extend
from rigidmetric.isometry import (
    NotAnIsometryError,
    PartialIsometry,
    Probe,
    compose,
    enumerate_embeddings,
    enumerate_isometries,
    enumerate_isometries_bruteforce,
    extend_partial_isometry,
    generators,
    grid_probes,
    grid_spaces,
    group_axiom_failures,
    inverse,
    is_identity,
    is_rigid,
    isometry_group,
    superuniversality_check,
)
from rigidmetric.space import MetricError, MetricSpace, make_space, restrict
from strategies import grid_spaces as grid_space_strategy

F = Fraction


def test_two_points():
    X = make_space(["a", "b"], {"a|b": 1})
    assert isometry_group(X) == [{"a": "a", "b": "b"}, {"a": "b", "b": "a"}]
    assert not is_rigid(X)


def test_scalene_triangle_is_rigid():
    X = make_space(["a", "b", "c"], {"a|b": 1, "b|c": 2, "a|c": 3})
    assert isometry_group(X) == [{"a": "a", "b": "b", "c": "c"}]
    assert is_rigid(X)


def test_sizes_differ():
    assert enumerate_isometries(MetricSpace.discrete("ab"), MetricSpace.discrete("abc")) == []


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_discrete_group_is_symmetric_group(n):
    G = isometry_group(MetricSpace.discrete([f"p{i}" for i in range(n)]))
    assert len(G) == math.factorial(n)
    assert group_axiom_failures(G) == []
    assert is_rigid(MetricSpace.discrete([f"p{i}" for i in range(n)])) == (n == 1)


def test_isometries_between_relabelled_spaces():
    A = make_space(["a", "b", "c"], {"a|b": 1, "b|c": 2, "a|c": 2})
    B = make_space(["x", "y", "z"], {"x|y": 2, "y|z": 1, "x|z": 2})
    assert enumerate_isometries(A, B) == [{"a": "y", "b": "z", "c": "x"}, {"a": "z", "b": "y", "c": "x"}]


@given(grid_space_strategy(max_size=6), st.randoms(use_true_random=False))
def test_matches_bruteforce(X, rnd):
    perm = list(X.points)
    rnd.shuffle(perm)
    ren = {p: f"r{q}" for p, q in zip(X.points, perm)}
    mat = X.fraction_matrix()
    Y = MetricSpace.from_fraction_matrix([ren[p] for p in X.points], mat)
    assert enumerate_isometries(X, Y) == enumerate_isometries_bruteforce(X, Y)
    assert enumerate_isometries(X, X) == enumerate_isometries_bruteforce(X, X)


@given(grid_space_strategy(max_size=6))
def test_group_axioms_and_generators(X):
    G = isometry_group(X)
    assert group_axiom_failures(G) == []
    assert is_identity(G[0])
    gens = generators(G)
    span = {tuple(sorted(G[0].items()))}
    frontier = list(span)
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                c = tuple(sorted(compose(g, dict(h)).items()))
                if c not in span:
                    span.add(c)
                    nxt.append(c)
        frontier = nxt
    assert span == {tuple(sorted(f.items())) for f in G}


def test_group_axioms_detect_missing_elements():
    f = {"a": "b", "b": "c", "c": "a"}
    assert group_axiom_failures([f]) != []
    assert inverse(f) == {"b": "a", "c": "b", "a": "c"}


@given(grid_space_strategy(min_size=2, max_size=6), st.data())
def test_embeddings_match_filtered_injections(X, data):
    sub = data.draw(st.lists(st.sampled_from(X.points), min_size=1, max_size=3, unique=True))
    A = restrict(X, sub)
    brute = [
        dict(zip(A.points, img))
        for img in itertools.permutations(X.points, len(A))
        if all(A.d(x, y) == X.d(dict(zip(A.points, img))[x], dict(zip(A.points, img))[y]) for x, y in A.pairs())
    ]
    key = lambda f: [X.index(f[x]) for x in sorted(A.points)]
    assert enumerate_embeddings(A, X) == sorted(brute, key=key)


def test_extend_partial_examples():
    Y = make_space(["a", "b"], {"a|b": 1})
    T = MetricSpace.discrete(["t0", "t1", "t2"])
    ext = extend_partial_isometry(PartialIsometry(Y, T, {"a": "t1"}))
    assert ext.mapping == {"a": "t1", "b": "t0"}
    Y3 = make_space(["a", "b"], {"a|b": "1/3"})
    assert extend_partial_isometry(PartialIsometry(Y3, T, {"a": "t0"})) is None


def test_extend_partial_rejects_non_isometry():
    Y = make_space(["a", "b"], {"a|b": 2})
    T = MetricSpace.discrete(["t0", "t1"])
    with pytest.raises(NotAnIsometryError) as exc:
        extend_partial_isometry(PartialIsometry(Y, T, {"a": "t0", "b": "t1"}))
    assert exc.value.witness == ("a", "b")
    with pytest.raises(MetricError):
        PartialIsometry(Y, T, {"a": "t0", "b": "t0"}).check()


def test_grid_spaces_count():
    # one 1-point space, |grid| 2-point spaces, and admissible triangles
    grid = (F(1), F(2))
    spaces = grid_spaces(grid, 3)
    tri = sum(
        1
        for a, b, c in itertools.product(grid, repeat=3)
        if a <= b + c and b <= a + c and c <= a + b
    )
    assert len(spaces) == 1 + 2 + tri


def test_superuniversality_trivial_cases():
    grid = (F(1),)
    single = MetricSpace.discrete(["0"])
    probes = [p for p in grid_probes(grid, 2) if len(p.space) == 2 and len(p.sub) == 1]
    assert not superuniversality_check(single, probes, grid).holds
    full = [p for p in grid_probes(grid, 2) if p.sub == p.space.points]
    assert superuniversality_check(single, full, grid).holds


def test_superuniversality_out_of_contract():
    odd = make_space(["a", "b"], {"a|b": "1/3"})
    rep = superuniversality_check(MetricSpace.discrete(["0"]), [Probe(odd, ("a",))], (F(1),))
    assert rep.outcomes[0].status == "out-of-contract"
    assert rep.holds


def test_one_step_probes_pass_after_one_extension():
    grid = (F(1, 2), F(1))
    X = MetricSpace.discrete(["0"])
    T = f_extend(X, enumerate_extensions(X, grid, 1)).space
    probes = [p for p in grid_probes(grid, 2) if len(p.space) - len(p.sub) == 1]
    assert superuniversality_check(T, probes, grid, core=X.points).holds
