import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import SMALL
from gengraph.caps import caps_override
from gengraph.errors import CapExceeded
from gengraph.gen_graph import (
    adjacent,
    bfs_distances,
    components,
    degree,
    degrees,
    export,
    generating_graph,
    generating_pairs,
    generation_matrix,
    generation_row,
    graph_metrics,
    neighborhood,
    non_isolated,
    non_isolated_mask,
    swap_components,
    swap_graph,
    verify_swap_refinement,
)
from gengraph.group_core import cached_group


@pytest.mark.parametrize("spec", SMALL + ["SL2(4)"])
def test_matrix_matches_oracle(spec):
    G = cached_group(spec)
    A = generation_matrix(G)
    assert A.tolist() == oracles.adjacency(G)


@pytest.mark.parametrize("spec", ["KleinCp3(3)", "Pow(Sym(3),2)", "Dih(8)"])
def test_rows_match_oracle_on_samples(spec):
    G = cached_group(spec)
    rng = np.random.default_rng(5)
    for x in rng.integers(0, G.order, size=12).tolist():
        row = generation_row(G, x)
        want = [oracles.generates(G, (x, y)) for y in range(G.order)]
        assert row.tolist() == want


def test_rows_without_matrix_agree():
    """Rows on a group above the matrix limit agree with direct closure checks."""
    G = cached_group("KleinCp3(3,5)")
    rng = np.random.default_rng(2)
    for x in rng.integers(0, G.order, size=3).tolist():
        row = generation_row(G, x)
        for y in rng.integers(0, G.order, size=25).tolist():
            assert row[y] == adjacent(G, x, y)


def test_sym4_isolated_vertices_are_klein_four():
    G = cached_group("Sym(4)")
    iso = {G.labels[x] for x in np.flatnonzero(~non_isolated_mask(G))}
    assert iso == {"()", "(12)(34)", "(13)(24)", "(14)(23)"}
    assert len(non_isolated(G)) == 20


def test_sym4_degree_of_four_cycle():
    # (1234) lies only in one maximal subgroup (a dihedral group of order 8)
    G = cached_group("Sym(4)")
    assert degree(G, G.labels.index("(1234)")) == 16


def test_loops_only_at_cyclic_generators():
    G = cached_group("Cyc(6)")
    A = generation_matrix(G)
    assert np.flatnonzero(np.diagonal(A)).tolist() == [x for x in range(6) if np.gcd(x, 6) == 1 and x]
    assert not np.diagonal(generation_matrix(cached_group("Sym(3)"))).any()


def test_trivial_and_c2():
    T = cached_group("Cyc(1)")
    assert non_isolated(T).tolist() == [0]
    C2 = cached_group("Cyc(2)")
    assert non_isolated(C2).tolist() == [0, 1]


@pytest.mark.parametrize("spec", SMALL + ["SL2(4)", "KleinCp3(3)"])
def test_degrees_and_neighbourhood_methods(spec):
    G = cached_group(spec)
    degs = degrees(G)
    assert degs.tolist() == generation_matrix(G).sum(axis=1).tolist()
    for v in non_isolated(G)[:6].tolist():
        a = neighborhood(G, v, "row")
        assert a.tolist() == neighborhood(G, v, "scan").tolist() == neighborhood(G, v, "maximal").tolist()
        assert len(a) == degs[v]


@given(st.sampled_from(SMALL + ["SL2(4)"]), st.data())
def test_adjacency_symmetric(spec, data):
    G = cached_group(spec)
    x = data.draw(st.integers(0, G.order - 1))
    y = data.draw(st.integers(0, G.order - 1))
    assert adjacent(G, x, y) == adjacent(G, y, x)


@given(st.sampled_from(["Sym(4)", "SL2(4)", "Dih(6)", "KleinCp3(3)"]), st.data())
def test_adjacency_invariant_under_automorphisms(spec, data):
    """Conjugation is an automorphism, so it preserves adjacency."""
    G = cached_group(spec)
    x, y, g = (data.draw(st.integers(0, G.order - 1)) for _ in range(3))
    assert adjacent(G, x, y) == adjacent(G, G.conj(x, g), G.conj(y, g))


@pytest.mark.parametrize("spec", ["Sym(4)", "Sym(3)", "Dih(4)", "Dih(6)", "Cyc(6)", "Alt(4)", "SL2(4)"])
def test_metrics_match_oracle(spec):
    G = cached_group(spec)
    m = graph_metrics(generating_graph(G))
    count, diams = oracles.components_and_diameters(G)
    assert m.components.count == count
    assert sorted(m.diameters) == sorted(diams)


def test_sl2_4_connected_diameter_two():
    G = cached_group("SL2(4)")
    view = generating_graph(G)
    m = graph_metrics(view)
    assert view.n == 59 and m.connected and m.diameter == 2


def test_bfs_distances_from_symmetry_reps_cover_graph():
    G = cached_group("Sym(4)")
    view = generating_graph(G)
    d = bfs_distances(view, 0)
    assert (d >= 0).all() and d[0] == 0


def test_graph_view_round_trip():
    G = cached_group("Sym(3)")
    view = generating_graph(G)
    for i in range(view.n):
        assert view.position(int(view.vertices[i])) == i
    M = view.materialize()
    assert M.tolist() == M.T.tolist()
    assert len(view.edges()) == int(np.triu(M, 1).sum())


def test_components_of_disconnected_view():
    G = cached_group("Pow(Cyc(2),3)")  # not 2-generated: Gamma has no edges
    view = generating_graph(G, drop_isolated=False)
    assert components(view).count == 8
    assert generating_graph(G).n == 0


def test_export_json_and_dot():
    G = cached_group("Sym(3)")
    view = generating_graph(G)
    doc = json.loads(export(view, "json"))
    assert doc["group"] == "Sym(3)"
    assert len(doc["vertices"]) == 5 and doc["isolated"] == ["()"]
    assert len(doc["edges"]) == 9
    dot = export(view, "dot")
    assert dot.startswith('graph "Sym(3)" {') and dot.count("--") == 9
    assert export(view, "json") == export(generating_graph(G), "json")


def test_export_records_loops():
    doc = json.loads(export(generating_graph(cached_group("Cyc(4)")), "json"))
    assert doc["loops"]


def test_swap_graph_sym4():
    G = cached_group("Sym(4)")
    xs, ys = generating_pairs(G)
    assert len(xs) == 216
    rep = verify_swap_refinement(G)
    assert rep.ok and rep.swap_components == 1 and rep.delta_components == 1


@pytest.mark.parametrize("spec", ["Sym(3)", "Dih(4)", "Cyc(6)", "Alt(4)", "Pow(Cyc(2),2)"])
def test_swap_components_match_explicit_graph(spec):
    """Bipartite component trick agrees with BFS on the explicit swap graph."""
    G = cached_group(spec)
    sg = swap_graph(G)
    explicit = components(sg)
    fast = swap_components(G)
    assert explicit.count == fast.count
    # same partition
    pairs = {}
    for a, b in zip(explicit.labels.tolist(), fast.labels.tolist()):
        assert pairs.setdefault(a, b) == b


def test_swap_cap():
    with caps_override(swap=10):
        with pytest.raises(CapExceeded):
            generating_pairs(cached_group("Sym(4)"))


def test_matrix_cap():
    with pytest.raises(CapExceeded):
        generation_matrix(cached_group("KleinCp3(3,5)"))
