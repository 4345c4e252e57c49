import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from gengraph.errors import ParityObstruction, PreconditionError
from gengraph.gen_graph import bfs_distances, generating_graph
from gengraph.group_core import cached_group
from gengraph.group_core.group import generates
from gengraph.product_graphs import (
    ProductGraph,
    WalkCertificate,
    density_probe,
    lift_path,
    path_with_triangles,
    power_adjacent,
    product_distance,
    separation_witnesses,
    shortest_path,
    validate_walk,
)


@pytest.fixture(scope="module")
def d_s4():
    return generating_graph(cached_group("Sym(4)"))


@pytest.fixture(scope="module")
def d_sl():
    return generating_graph(cached_group("SL2(4)"))


def _paths_of_length(view, start, mu):
    """Shortest paths of length ``mu`` from ``start`` (one per reachable endpoint)."""
    d = bfs_distances(view, view.position(start))
    return [shortest_path(view, start, int(view.vertices[p])) for p in np.flatnonzero(d == mu)[:3]]


def test_product_bfs_matches_oracle(d_s4):
    small = generating_graph(cached_group("Sym(3)"))
    P = ProductGraph([small, small])
    A = oracles.adjacency(cached_group("Sym(3)"))
    verts = [int(v) for v in small.vertices]
    src = (verts[0], verts[1])
    want = oracles.product_bfs([A, A], [verts, verts], src)
    dist = P.bfs(src)
    for a, b in itertools.product(range(small.n), repeat=2):
        key = (verts[a], verts[b])
        assert dist[a, b] == want.get(key, -1)


@pytest.mark.parametrize("pair", [("s4", "s4"), ("s4", "sl"), ("sl", "s4"), ("sl", "sl")])
def test_lifted_walks_validate_and_are_shortest(pair, d_s4, d_sl):
    views = {"s4": d_s4, "sl": d_sl}
    A, B = views[pair[0]], views[pair[1]]
    P = ProductGraph([A, B])
    xa, xb = int(A.vertices[0]), int(B.vertices[0])
    dist = P.bfs((xa, xb))
    for mu1, mu2 in itertools.product([1, 2], repeat=2):
        for pa in _paths_of_length(A, xa, mu1):
            for pb in _paths_of_length(B, xb, mu2):
                for m in range(max(mu1, mu2), 5):
                    cert = lift_path([A, B], [pa, pb], m)
                    assert cert.length == m and validate_walk(P, cert)
                    assert cert.start == (xa, xb) and cert.end == (pa.end, pb.end)
                assert dist[A.position(pa.end), B.position(pb.end)] == max(mu1, mu2)


def test_zero_one_profile(d_s4, d_sl):
    P = ProductGraph([d_sl, d_s4])
    x = (int(d_sl.vertices[0]), int(d_s4.vertices[0]))
    p0 = WalkCertificate([x[0]], x[0], x[0])
    for p1 in _paths_of_length(d_s4, x[1], 1):
        with pytest.raises(ParityObstruction):
            lift_path([d_sl, d_s4], [p0, p1], 1)
        pd = product_distance(P, x, (x[0], p1.end))
        assert pd.exact in (2, 3) and pd.exact != 1
        assert pd.upper == pd.exact
        for m in (2, 3, 4):
            assert validate_walk(P, lift_path([d_sl, d_s4], [p0, p1], m))


def test_loop_allows_length_one_padding():
    D = generating_graph(cached_group("Cyc(5)"))
    x = 1
    assert D.adjacent(x, x)
    cert = lift_path([D, D], [WalkCertificate([x], x, x), shortest_path(D, x, 2)], 1)
    assert cert.length == 1 and validate_walk(ProductGraph([D, D]), cert)


def test_pad_rejects_long_paths(d_s4):
    x = int(d_s4.vertices[0])
    p = _paths_of_length(d_s4, x, 2)[0]
    with pytest.raises(PreconditionError):
        lift_path([d_s4], [p], 1)


@given(st.integers(0, 19), st.integers(0, 19), st.integers(0, 58), st.integers(0, 58))
def test_product_distance_bounds(a1, a2, b1, b2):
    d_s4 = generating_graph(cached_group("Sym(4)"))
    d_sl = generating_graph(cached_group("SL2(4)"))
    P = ProductGraph([d_s4, d_sl])
    x = (int(d_s4.vertices[a1]), int(d_sl.vertices[b1]))
    y = (int(d_s4.vertices[a2]), int(d_sl.vertices[b2]))
    pd = product_distance(P, x, y)
    assert pd.lower <= pd.exact <= pd.upper
    assert validate_walk(P, pd.certificate)


def test_validate_walk_rejects_broken_walks(d_s4):
    P = ProductGraph([d_s4, d_s4])
    x = int(d_s4.vertices[0])
    assert not validate_walk(P, WalkCertificate([(x, x), (x, x)], (x, x), (x, x)))  # no loops in Sym(4)
    assert not validate_walk(P, WalkCertificate([], (x, x), (x, x)))


def test_power_adjacent_matches_closure():
    S = cached_group("SL2(4)")
    G = cached_group("Pow(SL2(4),2)")
    rng = np.random.default_rng(7)
    n = S.order
    agree = 0
    for _ in range(10_000):
        x = rng.integers(0, n, size=2).tolist()
        y = rng.integers(0, n, size=2).tolist()
        want = generates(G, (x[0] * n + x[1], y[0] * n + y[1]))
        agree += power_adjacent(S, 2, x, y) == want
    assert agree == 10_000


def test_power_adjacent_on_generating_pairs():
    """Coordinatewise generating pairs: adjacency fails exactly on Aut-equivalent pairs."""
    S = cached_group("SL2(4)")
    G = cached_group("Pow(SL2(4),2)")
    n = S.order
    rng = np.random.default_rng(8)
    from gengraph.gen_graph import generating_pairs

    xs, ys = generating_pairs(S)
    hits = {True: 0, False: 0}
    for i, j in rng.integers(0, len(xs), size=(400, 2)).tolist():
        x, y = (int(xs[i]), int(xs[j])), (int(ys[i]), int(ys[j]))
        want = generates(G, (x[0] * n + x[1], y[0] * n + y[1]))
        assert power_adjacent(S, 2, x, y) == want
        hits[want] += 1
    assert hits[True] and hits[False]


def test_separation_witnesses_on_paths():
    factors = [path_with_triangles(4) for _ in range(6)]
    rep = separation_witnesses(factors, [0] * 6, [2, 3], 6)
    assert rep.distances[0] == [1 + n // 2 for n in range(1, 7)]
    assert rep.distances[1] == [1 + n // 3 for n in range(1, 7)]
    assert rep.lower_bounds[0][1] == rep.lower_bounds[1][0] == 1
    assert rep.coordinate_max[0][0] == 0
    with pytest.raises(PreconditionError):
        separation_witnesses(factors, [0] * 6, [1], 6)


def test_density_probe(d_sl):
    P = ProductGraph([d_sl, d_sl, d_sl])
    x = tuple(int(d_sl.vertices[i]) for i in (0, 1, 2))
    y = tuple(int(d_sl.vertices[i]) for i in (5, 6, 7))
    for m in range(4):
        z, cert = density_probe(P, x, y, m)
        assert z[:m] == y[:m] and z[m:] == x[m:]
        assert validate_walk(P, cert) and cert.end == z


def test_separation_witnesses_fractional_taus():
    factors = [path_with_triangles(n) for n in range(1, 13)]
    rep = separation_witnesses(factors, [0] * 12, [1.5, 3], 12)
    assert rep.distances[0] == [1 + int(n // 1.5) for n in range(1, 13)]
    assert rep.distances[1] == [1 + n // 3 for n in range(1, 13)]
    assert max(rep.lower_bounds[0][1], rep.lower_bounds[1][0]) == 4
    same = separation_witnesses(factors, [0] * 12, [3, 3], 12)
    assert same.lower_bounds[0][1] == 0
