import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import SMALL
from gengraph.caps import caps_override
from gengraph.errors import CapExceeded, PreconditionError, SpecError
from gengraph.group_core import (
    all_subgroups,
    build_group,
    cached_group,
    center,
    chief_series,
    closure,
    conjugacy_classes,
    d_rel,
    frattini,
    is_soluble,
    maximal_subgroups,
    min_generating_set,
    minimal_normal_subgroups,
    normal_subgroups,
    parse_spec,
    quotient,
    spec_order,
)
from gengraph.group_core.group import closure_mask, generates


@pytest.mark.parametrize("text,order", [
    ("Sym(4)", 24), ("Alt(5)", 60), ("Dih(6)", 12), ("Cyc(1)", 1), ("SL2(4)", 60), ("SL2(8)", 504),
    ("Dir(Sym(3),Cyc(4))", 24), ("Pow(Cyc(2),3)", 8), ("KleinCp3(3)", 108), ("KleinCp3(3,5)", 13500),
])
def test_spec_orders(text, order):
    assert spec_order(parse_spec(text)) == order
    assert str(parse_spec(text)) == text


@pytest.mark.parametrize("bad", ["Sym", "Sym(4", "Foo(2)", "SL2(6)", "Dih(1)", "Sym(4))", "Cyc(0)",
                                 "KleinCp3(2)", "KleinCp3(3,3)", "Pow(Cyc(2))"])
def test_spec_errors(bad):
    with pytest.raises(SpecError):
        parse_spec(bad)


def test_order_cap():
    with pytest.raises(CapExceeded):
        build_group("Sym(9)")
    with caps_override(order=10):
        with pytest.raises(CapExceeded):
            build_group("Sym(4)")


@pytest.mark.parametrize("spec", SMALL + ["SL2(4)", "KleinCp3(3)"])
def test_axioms_and_identity(spec):
    G = cached_group(spec)
    G.verify_axioms()
    assert all(G.mul(0, x) == x == G.mul(x, 0) for x in range(G.order))


def test_permutation_product_convention():
    G = cached_group("Sym(3)")
    a, b = G.labels.index("(12)"), G.labels.index("(23)")
    # (a*b)(i) = b(a(i)): 1 -> 2 -> 3, 3 -> 3 -> 2, 2 -> 1 -> 1
    assert G.labels[G.mul(a, b)] == "(132)"


@pytest.mark.parametrize("spec", SMALL + ["SL2(4)"])
def test_closure_matches_oracle(spec):
    G = cached_group(spec)
    rng = np.random.default_rng(1)
    for _ in range(20):
        gens = rng.integers(0, G.order, size=2).tolist()
        assert set(closure(G, gens).members.tolist()) == oracles.closure(G, gens)


@given(st.sampled_from(SMALL + ["SL2(4)", "KleinCp3(3)"]), st.data())
def test_closure_idempotent_and_monotone(spec, data):
    G = cached_group(spec)
    xs = data.draw(st.lists(st.integers(0, G.order - 1), max_size=3))
    H = closure(G, xs)
    assert closure(G, H.members.tolist()) == H
    extra = data.draw(st.integers(0, G.order - 1))
    assert H <= closure(G, xs + [extra])


@given(st.sampled_from(SMALL + ["SL2(4)"]), st.data())
def test_generates_symmetric(spec, data):
    G = cached_group(spec)
    x = data.draw(st.integers(0, G.order - 1))
    y = data.draw(st.integers(0, G.order - 1))
    assert generates(G, (x, y)) == generates(G, (y, x)) == oracles.generates(G, (x, y))


def test_closure_stop_at_half():
    G = cached_group("Sym(4)")
    m = closure_mask(G, (1,), stop_at_half=True)
    assert m.sum() <= G.order


@pytest.mark.parametrize("spec", ["Sym(4)", "Alt(4)", "Dih(6)", "Pow(Cyc(2),2)", "Sym(3)", "Cyc(12)"])
def test_subgroups_match_oracle(spec):
    G = cached_group(spec)
    ours = {frozenset(H.members.tolist()) for H in all_subgroups(G)}
    assert ours == set(oracles.subgroups(G))


def test_subgroup_counts():
    assert len(all_subgroups(cached_group("Sym(4)"))) == 30
    assert len(all_subgroups(cached_group("Alt(5)"))) == 59


@pytest.mark.parametrize("spec", ["Sym(4)", "Dih(4)", "Pow(Cyc(2),3)", "Cyc(12)", "Dir(Alt(4),Cyc(2))"])
def test_frattini_elements_are_non_generators(spec):
    G = cached_group(spec)
    F = frattini(G)
    for H in maximal_subgroups(G):
        assert F <= H
    rng = np.random.default_rng(3)
    for f in F.members.tolist():
        assert d_rel(G, [f]) == d_rel(G)
        for x, y in rng.integers(0, G.order, size=(20, 2)).tolist():
            assert generates(G, (x, y, f)) == generates(G, (x, y))


def test_frattini_values():
    assert frattini(cached_group("Dih(4)")).order == 2
    assert frattini(cached_group("Cyc(12)")).order == 2
    assert frattini(cached_group("Sym(4)")).order == 1


def test_klein_four_normal_in_sym4():
    G = cached_group("Sym(4)")
    mins = minimal_normal_subgroups(G)
    assert [M.order for M in mins] == [4]
    assert sorted(H.order for H in normal_subgroups(G)) == [1, 4, 12, 24]


@pytest.mark.parametrize("spec", ["Sym(4)", "Dih(6)", "Alt(5)", "Dir(Sym(3),Cyc(4))"])
def test_conjugacy_classes(spec):
    G = cached_group(spec)
    cc = conjugacy_classes(G)
    sizes = np.bincount(cc.class_id)
    assert sizes.sum() == G.order
    assert all(G.order % s == 0 for s in sizes)
    assert (sizes == 1).sum() == center(G).order


@pytest.mark.parametrize("spec", ["Sym(4)", "Dih(6)", "KleinCp3(3)", "Dir(Sym(3),Cyc(4))"])
def test_quotient_is_homomorphic_image(spec):
    G = cached_group(spec)
    for N in normal_subgroups(G):
        qt = quotient(G, N)
        Q = qt.group
        assert Q.order * N.order == G.order
        rng = np.random.default_rng(0)
        for a, b in rng.integers(0, G.order, size=(30, 2)):
            assert qt.proj[G.mul(int(a), int(b))] == Q.mul(int(qt.proj[a]), int(qt.proj[b]))


def test_quotient_rejects_non_normal():
    G = cached_group("Sym(3)")
    with pytest.raises(PreconditionError):
        quotient(G, closure(G, [G.labels.index("(12)")]))


@given(st.sampled_from(["Sym(4)", "Dih(6)", "Dir(Sym(3),Cyc(4))", "KleinCp3(3)"]), st.data())
def test_quotient_monotone(spec, data):
    """N <= M normal implies |G/M| divides |G/N|, and d never grows in quotients."""
    G = cached_group(spec)
    normals = normal_subgroups(G)
    N = data.draw(st.sampled_from(normals))
    bigger = [M for M in normals if N <= M]
    M = data.draw(st.sampled_from(bigger))
    assert (G.order // N.order) % (G.order // M.order) == 0
    assert d_rel(quotient(G, M).group) <= d_rel(quotient(G, N).group) <= d_rel(G)


@pytest.mark.parametrize("spec,t", [
    ("Sym(4)", 3), ("Sym(3)", 2), ("Alt(5)", 1), ("Cyc(12)", 3), ("Dih(4)", 3), ("KleinCp3(3)", 5),
    ("Pow(Cyc(2),3)", 3), ("Pow(Sym(3),2)", 4), ("Dir(Alt(4),Cyc(2))", 3),
])
def test_chief_length(spec, t):
    assert chief_series(cached_group(spec)).t == t


@pytest.mark.parametrize("spec", ["Sym(4)", "Dih(6)", "Dir(Sym(3),Cyc(4))", "Pow(Cyc(2),3)"])
def test_chief_length_matches_oracle(spec):
    G = cached_group(spec)
    assert chief_series(G).t == oracles.chief_lengths_by_brute_force(G)


@pytest.mark.parametrize("spec", ["Sym(4)", "KleinCp3(3)", "Pow(Sym(3),2)", "Dir(Sym(3),Cyc(4))"])
def test_chief_length_invariant_over_random_choices(spec):
    G = cached_group(spec)
    base = chief_series(G)
    orders = sorted(base.factor_orders())
    for seed in range(10):
        cs = chief_series(G, rng=np.random.default_rng(seed))
        assert cs.t == base.t
        assert sorted(cs.factor_orders()) == orders


def test_chief_series_klein_order():
    assert chief_series(cached_group("KleinCp3(3)")).factor_orders() == (3, 3, 3, 2, 2)


def test_chief_factor_metadata_sym4():
    f = chief_series(cached_group("Sym(4)")).factors
    assert [x.order for x in f] == [4, 3, 2]
    assert [x.abelian for x in f] == [True, True, True]
    assert not any(x.frattini for x in f)


@pytest.mark.parametrize("spec,d", [
    ("Sym(4)", 2), ("Cyc(6)", 1), ("Cyc(1)", 0), ("Pow(Cyc(2),3)", 3), ("SL2(4)", 2), ("KleinCp3(3)", 2),
])
def test_d_rel(spec, d):
    assert d_rel(cached_group(spec)) == d


def test_d_rel_relative():
    G = cached_group("Sym(4)")
    assert d_rel(G, [G.labels.index("(1234)")]) == 1
    assert d_rel(G, [0]) == 2


@pytest.mark.parametrize("spec,sol", [("Sym(4)", True), ("Alt(5)", False), ("SL2(8)", False),
                                      ("KleinCp3(3)", True), ("Pow(Sym(3),2)", True)])
def test_soluble(spec, sol):
    assert is_soluble(cached_group(spec)) is sol


@pytest.mark.parametrize("spec", ["Sym(4)", "Pow(Cyc(2),3)", "Cyc(1)", "SL2(4)", "KleinCp3(3)"])
def test_min_generating_set(spec):
    G = cached_group(spec)
    gens = min_generating_set(G)
    assert len(gens) == d_rel(G)
    assert len(oracles.closure(G, list(gens))) == G.order
