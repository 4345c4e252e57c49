from fractions import Fraction

import numpy as np
import pytest

import oracles
from gengraph.errors import PreconditionError, SpecError, UnsupportedGroup
from gengraph.gen_graph import generating_pairs, generation_row, non_isolated_mask
from gengraph.group_core import cached_group, klein_coordinates
from gengraph.group_core.autom import automorphisms
from gengraph.profinite_tower import (
    build_tower,
    characterization_count,
    characterization_mask,
    degree_growth,
    delta_p,
    klein_base,
    measure_v,
    monte_carlo_v,
    predicted_density,
    quotient_consistency,
    random_power_tuples_fail,
    tower_report,
    tower_report_csv,
    v_characterization,
    v_consistency,
)

# frozen after the first exact derivation (Moebius count cross-checked below)
DELTA_3 = 142
PHI2_SL2_8 = 214_704


@pytest.fixture(scope="module")
def tower():
    return build_tower("klein-cp3", [3, 5])


def test_predicted_density():
    assert predicted_density([3]) == Fraction(1, 2)
    assert predicted_density([3, 5]) == Fraction(2, 5)
    assert characterization_count([3, 5]) == 5400


def test_level_three_density_by_brute_force(tower):
    G = tower.levels[0].group
    assert G.order == 108
    assert len(oracles.non_isolated(G)) == 54
    rep = measure_v(tower, 0)
    assert rep.method == "brute-force" and rep.count == 54 and rep.matches_prediction


def test_characterization_matches_oracle_at_level_three(tower):
    G = tower.levels[0].group
    V = oracles.non_isolated(G)
    for x in range(G.order):
        assert v_characterization(G, x) == (x in V)
    assert np.flatnonzero(characterization_mask(G)).tolist() == sorted(V)


def test_characterization_matches_generation_at_level_15(tower):
    G = tower.levels[1].group
    assert (characterization_mask(G) == non_isolated_mask(G)).all()
    rep = measure_v(tower, 1)
    assert rep.method == "characterization" and rep.count == 5400 and rep.matches_prediction


def test_characterization_by_coordinates(tower):
    G = tower.levels[1].group
    rng = np.random.default_rng(4)
    for x in rng.integers(0, G.order, size=40).tolist():
        assert v_characterization(tower.levels[1], klein_coordinates(G, x)) == bool(generation_row(G, x).any())


def test_characterization_rejects_other_groups():
    with pytest.raises(SpecError):
        v_characterization(cached_group("Sym(4)"), 1)


def test_monte_carlo_interval_and_determinism(tower):
    G = tower.levels[1].group
    hits, ci = monte_carlo_v(G, 2000, seed=0)
    assert (hits, ci) == monte_carlo_v(G, 2000, seed=0)
    assert ci[0] <= 0.4 <= ci[1]
    # chunking must not change the draw
    assert monte_carlo_v(G, 2000, seed=0, chunk=1000) == monte_carlo_v(G, 2000, seed=0)
    rep = measure_v(tower, 1, samples=2000, seed=0)
    assert rep.hits == hits and rep.interval_contains_prediction


def test_consistency_between_levels(tower):
    rep = v_consistency(tower)
    assert rep.ok and rep.checked == 13500
    assert rep.converse_gaps > 0  # finite levels allow isolated lifts of good images


def test_quotient_consistency(tower):
    for k in (0, 1):
        G = tower.levels[k].group
        N = klein_base(G)
        assert G.order // N.order == 4
        assert quotient_consistency(G, N, level=k).ok


def test_consistency_sample_only(tower):
    rep = v_consistency(tower, elements=range(0, 13500, 7))
    assert rep.ok and rep.checked == len(range(0, 13500, 7))


def test_degree_growth(tower):
    G = tower.levels[1].group
    g = int(np.flatnonzero(non_isolated_mask(G))[0])
    rep = degree_growth(tower, g)
    assert rep.t == [5, 8] and rep.bounds == [8, 64]
    assert rep.monotone and rep.bounds_respected
    assert rep.lifted[1] == rep.degrees[0]


def test_tower_maps_are_projections(tower):
    f = tower.maps[0]
    lo, up = tower.levels[0].group, tower.levels[1].group
    rng = np.random.default_rng(0)
    for a, b in rng.integers(0, up.order, size=(50, 2)).tolist():
        assert f[up.mul(a, b)] == lo.mul(int(f[a]), int(f[b]))
    assert tower.kernel(0).order == 125


@pytest.mark.parametrize("primes", [[], [2, 3], [3, 3], [9]])
def test_bad_klein_primes(primes):
    with pytest.raises(SpecError):
        build_tower("klein-cp3", primes)


def test_custom_tower():
    T = build_tower("custom", groups=["Sym(4)", "Sym(4)"])
    assert v_consistency(T).ok and v_consistency(T).converse_gaps == 0
    with pytest.raises(PreconditionError):
        build_tower("custom", groups=["Sym(3)", "Sym(4)"])
    with pytest.raises(SpecError):
        build_tower("nope")


def test_delta_two():
    rep = delta_p(2)
    assert (rep.pairs, rep.automorphisms, rep.delta) == (2280, 120, 19)
    assert rep.free and rep.integral and rep.ok


def test_delta_two_independent_counts():
    S = cached_group("SL2(4)")
    assert oracles.generating_tuple_count(S) == 2280
    A = automorphisms(S)
    assert len({tuple(a) for a in A.tolist()}) == 120
    # every automorphism fixing a generating pair is the identity
    xs, ys = generating_pairs(S)
    ident = np.arange(S.order)
    for i in range(0, len(xs), 97):
        fixing = [a for a in A if a[xs[i]] == xs[i] and a[ys[i]] == ys[i]]
        assert len(fixing) == 1 and (fixing[0] == ident).all()


def test_delta_three_regression():
    rep = delta_p(3)
    assert rep.pairs == PHI2_SL2_8 and rep.integral and rep.free
    assert rep.delta == DELTA_3 == rep.pairs // rep.automorphisms


@pytest.mark.slow
def test_delta_three_pairs_by_moebius():
    assert oracles.generating_tuple_count(cached_group("SL2(8)")) == PHI2_SL2_8


def test_delta_plus_one_never_adjacent():
    assert random_power_tuples_fail(2, samples=3000) == 0


def test_delta_unsupported():
    with pytest.raises(UnsupportedGroup):
        delta_p(4)
    with pytest.raises(UnsupportedGroup):
        build_tower("sl2-products", [5])


def test_sl2_products_descriptors():
    T = build_tower("sl2-products", [2, 3])
    assert not any(lev.materialized for lev in T.levels)
    rep = tower_report(T)
    assert [lev["t"] for lev in rep["levels"]] == [19, 19 + DELTA_3]
    assert rep["levels"][0]["bound"] == 2**17


def test_tower_report_csv(tower):
    rep = tower_report(tower, samples=500)
    text = tower_report_csv(rep)
    rows = text.strip().splitlines()
    assert rows[0].startswith("level,params,order") and len(rows) == 3
    assert rows[1].split(",")[3] == "54" and rows[2].split(",")[3] == "5400"
