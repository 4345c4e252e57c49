"""Tensor products of finite graphs, path lifting and separation witnesses.

In a tensor product two tuples are adjacent when every coordinate pair is
adjacent.  A walk in the product therefore needs coordinate walks of one
common length; shorter coordinate paths are padded by oscillating on a
triangle, which exists in every generating graph because ``u*v`` is
adjacent to both ends of an edge ``u - v``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .caps import get_caps
from .errors import ParityObstruction, PreconditionError
from .gen_graph import GraphView, bfs_distances, generation_row
from .group_core.autom import pair_class_ids
from .group_core.group import Group


# -- certificates ------------------------------------------------------------------


@dataclass
class WalkCertificate:
    """A walk ``v_0, ..., v_m`` together with its claimed endpoints."""

    vertices: list
    start: object
    end: object

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    def to_json(self, labeler=None) -> dict:
        lab = labeler or (lambda v: v if isinstance(v, (int, str)) else list(v))
        return {"length": self.length, "walk": [lab(v) for v in self.vertices]}


def validate_walk(graph, cert: WalkCertificate) -> bool:
    """Recheck a certificate using nothing but ``graph.adjacent``."""
    vs = cert.vertices
    if not vs or vs[0] != cert.start or vs[-1] != cert.end:
        return False
    return all(graph.adjacent(a, b) for a, b in zip(vs, vs[1:]))


def shortest_path(view: GraphView, u: int, v: int) -> WalkCertificate | None:
    """A shortest path between vertex ids ``u`` and ``v``, or ``None`` if disconnected."""
    pu, pv = view.position(u), view.position(v)
    dist = bfs_distances(view, pv)
    if dist[pu] < 0:
        return None
    M = view.materialize()
    path = [pu]
    while path[-1] != pv:
        cur = path[-1]
        nxt = np.flatnonzero(M[cur] & (dist == dist[cur] - 1))
        path.append(int(nxt[0]))
    ids = [int(view.vertices[p]) for p in path]
    return WalkCertificate(ids, int(u), int(v))


# -- products ----------------------------------------------------------------------


class ProductGraph:
    """Finite tensor product of :class:`GraphView` factors; vertices are tuples of ids."""

    def __init__(self, factors: Sequence[GraphView]):
        self.factors = list(factors)

    @property
    def size(self) -> int:
        return math.prod(f.n for f in self.factors)

    def adjacent(self, u: Sequence[int], v: Sequence[int]) -> bool:
        return all(f.adjacent(a, b) for f, a, b in zip(self.factors, u, v))

    def positions(self, u: Sequence[int]) -> tuple[int, ...]:
        return tuple(f.position(a) for f, a in zip(self.factors, u))

    def bfs(self, source: Sequence[int]) -> np.ndarray:
        """Distances from ``source`` over the whole product (array indexed by positions).

        A step applies every factor adjacency matrix along its own axis.
        """
        size = self.size
        if size > get_caps().product_bfs:
            from .errors import CapExceeded

            raise CapExceeded(f"product BFS: {size} vertices exceeds product_bfs cap {get_caps().product_bfs}")
        mats = [f.materialize().astype(np.int32) for f in self.factors]
        shape = tuple(f.n for f in self.factors)
        dist = np.full(shape, -1, dtype=np.int64)
        frontier = np.zeros(shape, dtype=bool)
        start = self.positions(source)
        frontier[start] = True
        dist[start] = 0
        d = 0
        while frontier.any():
            d += 1
            reach = frontier.astype(np.int32)
            for axis, M in enumerate(mats):
                reach = np.moveaxis(np.tensordot(reach, M, axes=([axis], [0])), -1, axis)
                reach = (reach > 0).astype(np.int32)
            nxt = (reach > 0) & (dist < 0)
            dist[nxt] = d
            frontier = nxt
        return dist


# -- path lifting --------------------------------------------------------------------


def _has_loop(view: GraphView, x: int) -> bool:
    return view.adjacent(x, x)


def _pad(view: GraphView, path: list[int], m: int) -> list[int]:
    """Extend a coordinate path to a walk of length exactly ``m`` with the same ends."""
    mu = len(path) - 1
    if mu > m:
        raise PreconditionError(f"coordinate path of length {mu} exceeds target {m}")
    if mu == m:
        return list(path)
    if mu >= 1:
        u, v = path[-2], path[-1]
        t = view.triangle(u, v) if view.triangle is not None else None
        if t is None:
            raise PreconditionError("factor has no triangle callback for padding")
        head = path[:-1]
        tail = [v if (m - i) % 2 == 0 else t for i in range(mu, m + 1)]
        return head + tail
    x = path[0]
    if m == 1:
        if _has_loop(view, x):
            return [x, x]
        raise ParityObstruction("a coordinate at distance 0 cannot be padded to a walk of length 1")
    nbrs = [int(view.vertices[p]) for p in view.neighbors(view.position(x))]
    nbrs = [w for w in nbrs if w != x]
    if not nbrs:
        raise PreconditionError(f"coordinate endpoint {x} is isolated")
    w = nbrs[0]
    if m % 2 == 0:
        return [x if i % 2 == 0 else w for i in range(m + 1)]
    wx = view.triangle(w, x) if view.triangle is not None else None
    if wx is None:
        raise PreconditionError("factor has no triangle callback for padding")
    walk = [x, w, wx, x]
    while len(walk) < m + 1:
        walk += [w, x]
    return walk


def lift_path(factors: Sequence[GraphView], coordinate_paths: Sequence[WalkCertificate], m: int,
              validate: bool = True) -> WalkCertificate:
    """Combine per-factor paths of lengths ``mu_n <= m`` into a product walk of length ``m``.

    A coordinate with ``mu_n >= 1`` follows its path up to ``x_{mu-1}``
    and then alternates between ``x_mu`` and ``x_{mu-1} x_mu`` so that it
    ends on ``x_mu``.  A coordinate with ``mu_n = 0`` walks ``x, w, x, ...``
    or ``x, w, wx, x, w, x, ...`` through a neighbour ``w``; ``m = 1`` is
    impossible there unless ``x`` carries a loop.
    """
    if len(factors) != len(coordinate_paths):
        raise PreconditionError("one coordinate path per factor")
    walks = [_pad(f, list(p.vertices), m) for f, p in zip(factors, coordinate_paths)]
    verts = [tuple(w[i] for w in walks) for i in range(m + 1)]
    cert = WalkCertificate(verts, verts[0], verts[-1])
    if validate and not validate_walk(ProductGraph(factors), cert):
        raise AssertionError("lifted walk failed validation")
    return cert


@dataclass
class ProductDistance:
    coordinate: list[int | None]
    lower: int | None
    upper: int | None
    exact: int | None
    certificate: WalkCertificate | None = field(default=None, repr=False)

    @property
    def infinite(self) -> bool:
        return any(c is None for c in self.coordinate)


def product_distance(P: ProductGraph, x: Sequence[int], y: Sequence[int], exact: bool = True) -> ProductDistance:
    """Projection lower bound, lifted-walk upper bound and (when feasible) BFS distance."""
    paths = [shortest_path(f, a, b) for f, a, b in zip(P.factors, x, y)]
    if any(p is None for p in paths):
        return ProductDistance([None if p is None else p.length for p in paths], None, None, None)
    mus = [p.length for p in paths]
    lower = max(mus) if mus else 0
    m = lower
    cert = None
    while cert is None:
        try:
            cert = lift_path(P.factors, paths, m)
        except ParityObstruction:
            m += 1
    ex = None
    if exact and P.size <= get_caps().product_bfs:
        d = int(P.bfs(x)[P.positions(y)])
        ex = d if d >= 0 else None
    return ProductDistance(mus, lower, cert.length, ex, cert)


# -- separation witnesses -------------------------------------------------------------


def path_with_triangles(d: int) -> GraphView:
    """Path ``0 - 1 - ... - d`` with a triangle vertex ``d+1+i`` on each edge ``i - i+1``.

    Distances along the path are unchanged, so the diameter is ``d``.
    """
    n = 2 * d + 1 if d > 0 else 1
    M = np.zeros((n, n), dtype=bool)
    for i in range(d):
        t = d + 1 + i
        for a, b in ((i, i + 1), (i, t), (i + 1, t)):
            M[a, b] = M[b, a] = True

    def triangle(u: int, v: int) -> int:
        common = np.flatnonzero(M[u] & M[v])
        return int(common[0]) if len(common) else None

    labels = [f"p{i}" for i in range(d + 1)] + [f"t{i}" for i in range(d)]
    M.flags.writeable = False
    return GraphView(
        vertices=np.arange(n),
        oracle=lambda u, v: bool(M[u, v]),
        provenance="synthetic",
        labels=labels,
        matrix=M,
        triangle=triangle,
    )


def _floor_div(n: int, tau) -> int:
    return math.floor(Fraction(n) / Fraction(str(tau)))


@dataclass
class SeparationReport:
    taus: list
    witnesses: list[list[int]]  # per tau, the tuple (y_{tau,n})_{n=1..k}
    distances: list[list[int]]  # per tau, BFS distance from x_n to y_{tau,n}
    lower_bounds: list[list[int]]  # [a][b]: certified lower bound on dist(y_a, y_b)
    coordinate_max: list[list[int]]  # [a][b]: max_n of the measured coordinate distances

    def to_json(self) -> dict:
        return {
            "taus": [str(t) for t in self.taus],
            "per_coordinate_distances": self.distances,
            "pairwise_lower_bounds": self.lower_bounds,
            "pairwise_coordinate_max": self.coordinate_max,
            "witnesses": self.witnesses,
        }


def separation_witnesses(factors: Sequence[GraphView], x: Sequence[int], taus: Sequence, k: int) -> SeparationReport:
    """For each ``tau`` pick ``y_{tau,n}`` at distance ``1 + floor(n/tau)`` from ``x_n`` (n = 1..k).

    Pairwise bounds come from the triangle inequality
    ``dist(y_a, y_b) >= |dist(x, y_a) - dist(x, y_b)|`` at each coordinate.
    """
    if len(factors) < k or len(x) < k:
        raise PreconditionError(f"need at least k={k} factors and base coordinates")
    for t in taus:
        if Fraction(str(t)) <= 1:
            raise PreconditionError(f"tau must exceed 1, got {t}")
    from_x = [bfs_distances(f, f.position(x[n])) for n, f in enumerate(factors[:k])]
    witnesses, dists = [], []
    for t in taus:
        ys, ds = [], []
        for n in range(1, k + 1):
            want = 1 + _floor_div(n, t)
            d = from_x[n - 1]
            hit = np.flatnonzero(d == want)
            if not len(hit):
                raise PreconditionError(
                    f"factor {n}: need a vertex at distance {want} from x_{n} (tau={t}), "
                    f"but its eccentricity is {int(d.max())}"
                )
            ys.append(int(factors[n - 1].vertices[hit[0]]))
            ds.append(int(d[hit[0]]))
        witnesses.append(ys)
        dists.append(ds)
    T = len(taus)
    lower = [[0] * T for _ in range(T)]
    cmax = [[0] * T for _ in range(T)]
    for a in range(T):
        for b in range(T):
            lower[a][b] = max(abs(dists[a][n] - dists[b][n]) for n in range(k))
            cm = 0
            for n in range(k):
                f = factors[n]
                d = bfs_distances(f, f.position(witnesses[a][n]))[f.position(witnesses[b][n])]
                cm = max(cm, int(d))
            cmax[a][b] = cm
    return SeparationReport(list(taus), witnesses, dists, lower, cmax)


# -- direct powers of simple groups -----------------------------------------------------


def power_adjacent(S: Group, delta: int, x: Sequence[int], y: Sequence[int]) -> bool:
    """Adjacency in Gamma(S^delta) for a supported simple ``S``.

    True iff every coordinate pair generates ``S`` and no two coordinate
    pairs lie in one Aut(S)-orbit.
    """
    if len(x) != delta or len(y) != delta:
        raise PreconditionError(f"tuples must have length {delta}")
    if not all(generation_row(S, int(a))[int(b)] for a, b in zip(x, y)):
        return False
    if delta == 1:
        return True
    ids = pair_class_ids(S, x, y)
    return len(np.unique(ids)) == delta


# -- density ------------------------------------------------------------------------------


def density_probe(P: ProductGraph, x: Sequence[int], y: Sequence[int], m: int):
    """The splice ``(y_1..y_m, x_{m+1}..)`` and a certified walk to it from ``x``."""
    k = len(P.factors)
    if not 0 <= m <= k:
        raise PreconditionError(f"prefix length {m} outside 0..{k}")
    z = tuple(list(y[:m]) + list(x[m:]))
    if m == 0:
        return z, WalkCertificate([tuple(x)], tuple(x), tuple(x))
    pd = product_distance(P, x, z, exact=False)
    if pd.infinite:
        bad = [n + 1 for n, c in enumerate(pd.coordinate) if c is None]
        raise PreconditionError(f"coordinates {bad} of y are not in the component of x")
    return z, pd.certificate


def witness_report_json(rep: SeparationReport) -> str:
    return json.dumps(rep.to_json(), sort_keys=True)
