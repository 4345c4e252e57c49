"""The generating graph Gamma(G), its non-isolated part Delta(G), the swap
graph Sigma_2(G), graph metrics and exports.

Two elements are adjacent when together they generate the group.  An
element ``x`` with ``<x> = G`` carries a loop (see :func:`adjacent`).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import connected_components

from .caps import check_cap
from .errors import CapExceeded
from .group_core.group import Group, closure_mask, generates, greedy_generators
from .group_core.lattice import conjugacy_classes, cyclic_reps, maximal_subgroups

MATRIX_LIMIT = 2048  # groups up to this order get a full generation bitmatrix


# -- adjacency -----------------------------------------------------------------


def adjacent(G: Group, x: int, y: int) -> bool:
    """``<x, y> = G``.

    For ``x == y`` this is ``<x> = G``: cyclic generators carry a loop, so
    that degrees count every ``y`` with ``<x, y> = G``.
    """
    return generates(G, (int(x), int(y)))


def _invariance_partition(G: Group, x: int) -> np.ndarray:
    """Labels of a partition of ``G`` on whose blocks the row of ``x`` is constant.

    The row is invariant under ``y -> xy``, ``y -> yx``, conjugation by the
    centraliser of ``x`` and replacing ``y`` by another generator of ``<y>``.
    """
    n = G.order
    perms = [G.row(x), G.col(x), cyclic_reps(G)]
    cent = np.flatnonzero(G.commutes(x))
    if len(cent) < n:
        for c in greedy_generators(G, cent):
            perms.append(G.col(c)[G.row(G.inv(c))])
    src = np.tile(np.arange(n), len(perms))
    dst = np.concatenate(perms)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n)).tocsr()
    _, labels = connected_components(graph, directed=True, connection="weak")
    return labels


def _compute_row(G: Group, x: int, extend: int = 6) -> np.ndarray:
    """Cover search: one closure per unresolved block.

    A proper subgroup ``<x, y>`` rules out every block it meets, since any
    element of it generates at most that subgroup together with ``x``.
    """
    labels = _invariance_partition(G, x)
    nblocks = int(labels.max()) + 1
    _, first = np.unique(labels, return_index=True)
    status = np.zeros(nblocks, dtype=np.int8)
    order = np.argsort(first, kind="stable")
    for b in order:
        if status[b]:
            continue
        y = int(first[b])
        mask = closure_mask(G, (x, y), stop_at_half=True)
        if mask.all():
            status[b] = 1
            continue
        # enlarge the proper subgroup towards a maximal one: a few more
        # unresolved elements, kept only while the result stays proper
        gens = [x, y]
        tried = 0
        for c in order:
            if tried == extend or status[c] or mask[first[c]]:
                continue
            tried += 1
            z = int(first[c])
            bigger = closure_mask(G, gens + [z], start=mask, stop_at_half=True)
            if not bigger.all():
                gens.append(z)
                mask = bigger
        status[np.unique(labels[mask])] = -1
    row = status[labels] == 1
    row.flags.writeable = False
    return row


def _transport(G: Group, row: np.ndarray, g: int) -> np.ndarray:
    """Row of ``x^g`` from the row of ``x``: ``y`` generates with ``x^g`` iff ``y^(g^-1)`` does with ``x``."""
    if g == 0:
        return row
    gi = G.inv(g)
    return row[G.col(gi)[G.row(g)]]


def generation_row(G: Group, x: int) -> np.ndarray:
    """Boolean mask of ``{y : <x, y> = G}``."""
    x = int(x)
    A = G.cache.get("generation_matrix")
    if A is not None:
        return A[x]
    memo = G.cache.setdefault("generation_rows", {})
    hit = memo.get(x)
    if hit is not None:
        return hit
    c = int(cyclic_reps(G)[x])
    cls = conjugacy_classes(G)
    r = int(cls.reps[cls.class_id[c]])
    base = memo.get(r)
    if base is None:
        base = _compute_row(G, r)
        memo[r] = base
    out = _transport(G, base, int(cls.transporter[c]))
    if len(memo) < 256 or G.order <= MATRIX_LIMIT:
        memo[x] = out
    return out


def generation_matrix(G: Group) -> np.ndarray:
    """Full boolean matrix ``A[x, y] = (<x, y> = G)`` for groups up to ``MATRIX_LIMIT``."""
    hit = G.cache.get("generation_matrix")
    if hit is not None:
        return hit
    n = G.order
    if n > MATRIX_LIMIT:
        raise CapExceeded(f"generation matrix of {G.name}: order {n} exceeds {MATRIX_LIMIT}")
    A = np.zeros((n, n), dtype=bool)
    cyc = cyclic_reps(G)
    cls = conjugacy_classes(G)
    for x in range(n):
        c = int(cyc[x])
        if c != x:
            A[x] = A[c]
            continue
        r = int(cls.reps[cls.class_id[x]])
        A[x] = _compute_row(G, x) if r == x else _transport(G, A[r], int(cls.transporter[x]))
    A.flags.writeable = False
    G.cache["generation_matrix"] = A
    return A


def vertex_classes(G: Group) -> tuple[np.ndarray, np.ndarray]:
    """Partition of ``G`` into unions of conjugacy classes joined by ``<x> = <x'>``.

    Degree, isolation and eccentricity are constant on each block.
    Returns ``(labels, reps)`` with ``reps[b]`` the smallest element of block ``b``
    and blocks numbered in order of their representatives.
    """
    hit = G.cache.get("vertex_classes")
    if hit is not None:
        return hit
    n = G.order
    cls = conjugacy_classes(G)
    src = np.concatenate([np.arange(n), np.arange(n)])
    dst = np.concatenate([cyclic_reps(G), np.asarray(cls.reps)[cls.class_id]])
    graph = coo_matrix((np.ones(2 * n, dtype=np.int8), (src, dst)), shape=(n, n)).tocsr()
    _, labels = connected_components(graph, directed=True, connection="weak")
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first, kind="stable")
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    out = (relabel[labels], first[order])
    G.cache["vertex_classes"] = out
    return out


def degrees(G: Group) -> np.ndarray:
    """``deg[x] = |{y : <x, y> = G}|`` for every element."""
    hit = G.cache.get("degrees")
    if hit is not None:
        return hit
    if G.order <= MATRIX_LIMIT:
        deg = generation_matrix(G).sum(axis=1)
    else:
        labels, reps = vertex_classes(G)
        per = np.array([int(generation_row(G, int(r)).sum()) for r in reps])
        deg = per[labels]
    deg = deg.astype(np.int64)
    deg.flags.writeable = False
    G.cache["degrees"] = deg
    return deg


def degree(G: Group, v: int) -> int:
    return int(generation_row(G, v).sum())


def non_isolated_mask(G: Group) -> np.ndarray:
    """Boolean mask of V(G)."""
    hit = G.cache.get("non_isolated")
    if hit is not None:
        return hit
    if G.order <= MATRIX_LIMIT:
        mask = generation_matrix(G).any(axis=1)
    else:
        labels, reps = vertex_classes(G)
        per = np.array([bool(generation_row(G, int(r)).any()) for r in reps])
        mask = per[labels]
    mask.flags.writeable = False
    G.cache["non_isolated"] = mask
    return mask


def non_isolated(G: Group) -> np.ndarray:
    """Sorted element indices of V(G)."""
    return np.flatnonzero(non_isolated_mask(G))


def is_non_isolated(G: Group, x: int) -> bool:
    return bool(non_isolated_mask(G)[x])


def neighborhood(G: Group, v: int, method: str = "row") -> np.ndarray:
    """Sorted neighbours of ``v`` (including ``v`` itself when ``<v> = G``).

    ``row``: cover search shared with the rest of the module.
    ``scan``: one closure per candidate, no shortcuts.
    ``maximal``: complement of the union of maximal subgroups containing ``v``.
    """
    v = int(v)
    if method == "row":
        return np.flatnonzero(generation_row(G, v))
    if method == "scan":
        return np.array([y for y in range(G.order) if adjacent(G, v, y)], dtype=np.int64)
    if method == "maximal":
        mask = np.ones(G.order, dtype=bool)
        for M in maximal_subgroups(G):
            if M.mask[v]:
                mask &= ~M.mask
        return np.flatnonzero(mask)
    raise ValueError(f"unknown neighborhood method {method!r}")


# -- graph views -----------------------------------------------------------------


@dataclass
class GraphView:
    """A finite undirected graph given by an adjacency oracle on vertex ids.

    ``neighbor_fn`` (position -> neighbour positions) and ``matrix`` are
    optional accelerations; both must agree with ``oracle``.  ``triangle``
    maps an edge ``(u, v)`` of ids to a common neighbour id when one is known.
    """

    vertices: np.ndarray
    oracle: Callable[[int, int], bool] = field(repr=False)
    provenance: str = "synthetic"
    labels: list[str] | None = field(default=None, repr=False)
    matrix: np.ndarray | None = field(default=None, repr=False)
    neighbor_fn: Callable[[int], np.ndarray] | None = field(default=None, repr=False)
    triangle: Callable[[int, int], int] | None = field(default=None, repr=False)
    group: Group | None = field(default=None, repr=False)
    symmetry_reps: np.ndarray | None = field(default=None, repr=False)
    _index: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def position(self, vid: int) -> int:
        if self._index is None:
            self._index = {int(v): i for i, v in enumerate(self.vertices)}
        return self._index[int(vid)]

    def label(self, pos: int) -> str:
        return self.labels[pos] if self.labels is not None else str(int(self.vertices[pos]))

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.oracle(int(u), int(v)))

    def neighbors(self, pos: int) -> np.ndarray:
        if self.matrix is not None:
            return np.flatnonzero(self.matrix[pos])
        if self.neighbor_fn is not None:
            return self.neighbor_fn(pos)
        u = int(self.vertices[pos])
        return np.array([j for j, v in enumerate(self.vertices) if self.oracle(u, int(v))], dtype=np.int64)

    def materialize(self) -> np.ndarray:
        if self.matrix is None:
            M = np.zeros((self.n, self.n), dtype=bool)
            for i in range(self.n):
                M[i, self.neighbors(i)] = True
            M.flags.writeable = False
            self.matrix = M
        return self.matrix

    def edges(self) -> list[tuple[int, int]]:
        """Edges as position pairs ``(i, j)`` with ``i < j``, sorted."""
        M = self.materialize()
        i, j = np.nonzero(np.triu(M, k=1))
        return list(zip(i.tolist(), j.tolist()))

    def loops(self) -> list[int]:
        return np.flatnonzero(np.diagonal(self.materialize())).tolist()


def generating_graph(G: Group, drop_isolated: bool = True) -> GraphView:
    """Delta(G) (default) or the whole Gamma(G) as a view over element indices."""
    verts = non_isolated(G) if drop_isolated else np.arange(G.order)
    vmask = np.zeros(G.order, dtype=bool)
    vmask[verts] = True

    def neighbor_fn(pos: int) -> np.ndarray:
        return np.flatnonzero(generation_row(G, int(verts[pos]))[verts])

    labels, _ = vertex_classes(G)
    sub = labels[verts]
    _, first = np.unique(sub, return_index=True)
    view = GraphView(
        vertices=verts,
        oracle=lambda u, v: bool(vmask[u] and vmask[v] and adjacent(G, u, v)),
        provenance="generating-graph",
        labels=[G.labels[v] for v in verts],
        neighbor_fn=neighbor_fn,
        triangle=lambda u, v: G.mul(u, v),
        group=G,
        symmetry_reps=np.sort(first),
    )
    if G.order <= MATRIX_LIMIT:
        view.matrix = generation_matrix(G)[np.ix_(verts, verts)]
    return view


# -- metrics -----------------------------------------------------------------------


@dataclass
class ComponentMap:
    labels: np.ndarray  # position -> component id
    count: int
    reps: list[int]  # component id -> smallest vertex position

    def same(self, a: int, b: int) -> bool:
        return bool(self.labels[a] == self.labels[b])

    def sizes(self) -> list[int]:
        return np.bincount(self.labels, minlength=self.count).tolist()


def components(view: GraphView) -> ComponentMap:
    if view.n == 0:
        return ComponentMap(np.zeros(0, dtype=np.int64), 0, [])
    M = csr_matrix(view.materialize())
    _, labels = connected_components(M, directed=False)
    # renumber by smallest member so ids are deterministic
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first, kind="stable")
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    labels = relabel[labels].astype(np.int64)
    return ComponentMap(labels, len(order), sorted(first.tolist()))


def bfs_distances(view: GraphView, source_pos: int) -> np.ndarray:
    """Distances from ``source_pos``; ``-1`` marks unreachable vertices."""
    M = view.materialize()
    dist = np.full(view.n, -1, dtype=np.int64)
    dist[source_pos] = 0
    frontier = np.zeros(view.n, dtype=bool)
    frontier[source_pos] = True
    d = 0
    while frontier.any():
        d += 1
        nxt = M[frontier].any(axis=0) & (dist < 0)
        dist[nxt] = d
        frontier = nxt
    return dist


@dataclass
class Metrics:
    components: ComponentMap
    diameters: list[int]  # per component
    distances: np.ndarray | None = None  # from the requested source
    source: int | None = None

    @property
    def connected(self) -> bool:
        return self.components.count == 1

    @property
    def diameter(self) -> int | None:
        """Diameter of the whole graph when connected and nonempty, else ``None``."""
        return self.diameters[0] if self.connected else None


def graph_metrics(view: GraphView, source: int | None = None) -> Metrics:
    """Components, per-component diameters and optional distances from ``source`` (a position).

    Eccentricities are computed from ``view.symmetry_reps`` when the view
    provides representatives of its automorphism orbits, else from every vertex.
    """
    check_cap("metrics", view.n, "graph metrics")
    comp = components(view)
    diam = [0] * comp.count
    starts = view.symmetry_reps if view.symmetry_reps is not None else np.arange(view.n)
    for s in starts:
        dist = bfs_distances(view, int(s))
        c = int(comp.labels[s])
        diam[c] = max(diam[c], int(dist.max()))
    dist = bfs_distances(view, source) if source is not None else None
    return Metrics(comp, diam, dist, source)


# -- swap graph --------------------------------------------------------------------


def generating_pairs(G: Group) -> tuple[np.ndarray, np.ndarray]:
    """All ordered pairs ``(x, y)`` with ``<x, y> = G``, sorted."""
    check_cap("swap", G.order, "generating-pair enumeration")
    return np.nonzero(generation_matrix(G))


def swap_graph(G: Group) -> GraphView:
    """Sigma_2(G): ordered generating pairs, adjacent when they differ in exactly one entry.

    Vertex ids are pair codes ``x*|G| + y``.
    """
    n = G.order
    xs, ys = generating_pairs(G)
    codes = xs * n + ys
    A = generation_matrix(G)

    def oracle(p: int, q: int) -> bool:
        x1, y1 = divmod(p, n)
        x2, y2 = divmod(q, n)
        if not (A[x1, y1] and A[x2, y2]):
            return False
        return (x1 == x2) != (y1 == y2)

    def neighbor_fn(pos: int) -> np.ndarray:
        x, y = int(xs[pos]), int(ys[pos])
        same_x = np.flatnonzero(A[x]) + x * n
        same_y = np.flatnonzero(A[:, y]) * n + y
        nb = np.concatenate([same_x, same_y])
        nb = nb[nb != codes[pos]]
        return np.searchsorted(codes, nb)

    return GraphView(
        vertices=codes,
        oracle=oracle,
        provenance="swap-graph",
        labels=None,
        neighbor_fn=neighbor_fn,
        group=G,
    )


def swap_components(G: Group) -> ComponentMap:
    """Components of Sigma_2(G) without materialising its edges.

    Pairs sharing a first entry form a clique, as do pairs sharing a second
    entry, so components are those of the bipartite graph joining
    "first entry x" to "second entry y" along each generating pair.
    """
    n = G.order
    xs, ys = generating_pairs(G)
    if len(xs) == 0:
        return ComponentMap(np.zeros(0, dtype=np.int64), 0, [])
    B = coo_matrix((np.ones(len(xs), dtype=np.int8), (xs, ys + n)), shape=(2 * n, 2 * n)).tocsr()
    _, node_labels = connected_components(B, directed=False)
    _, first, labels = np.unique(node_labels[xs], return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    labels = relabel[labels].astype(np.int64)
    return ComponentMap(labels, len(order), sorted(first.tolist()))


@dataclass
class SwapReport:
    pairs: int
    swap_components: int
    delta_components: int
    violations: list[tuple[int, int]]  # Sigma_2 edges (as pair codes) breaking the refinement
    refinement: dict[int, int]  # Sigma_2 component -> Delta component

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_swap_refinement(G: Group) -> SwapReport:
    """Entries of pairs in one Sigma_2 component all lie in one Delta component."""
    n = G.order
    xs, ys = generating_pairs(G)
    sc = swap_components(G)
    delta = generating_graph(G)
    dc = components(delta)
    pos = np.full(n, -1, dtype=np.int64)
    pos[delta.vertices] = np.arange(delta.n)
    dx, dy = dc.labels[pos[xs]], dc.labels[pos[ys]]
    violations = []
    refinement: dict[int, int] = {}
    for k in range(len(xs)):
        s = int(sc.labels[k])
        want = refinement.setdefault(s, int(dx[k]))
        if dx[k] != want or dy[k] != want:
            violations.append((int(xs[k] * n + ys[k]), s))
    # edge-level check: two adjacent pairs share an entry, so all four entries
    # are joined by the path through the shared entry
    return SwapReport(len(xs), sc.count, dc.count, violations, refinement)


# -- export ------------------------------------------------------------------------


def export(view: GraphView, fmt: str = "json") -> str:
    """Render ``view`` as JSON or DOT with deterministic ordering."""
    edges = view.edges() if view.n else []
    if fmt == "json":
        doc: dict = {}
        if view.group is not None:
            doc["group"] = str(view.group.spec) if view.group.spec is not None else view.group.name
        doc["vertices"] = [view.label(i) for i in range(view.n)]
        doc["edges"] = [[i, j] for i, j in edges]
        if view.group is not None and view.provenance == "generating-graph":
            vmask = np.zeros(view.group.order, dtype=bool)
            vmask[view.vertices] = True
            doc["isolated"] = [view.group.labels[x] for x in np.flatnonzero(~vmask)]
        loops = view.loops() if view.n else []
        if loops:
            doc["loops"] = loops
        return json.dumps(doc, sort_keys=True)
    if fmt == "dot":
        name = view.group.name if view.group is not None else view.provenance
        lines = [f'graph "{name}" {{']
        for i in range(view.n):
            lab = view.label(i).replace('"', '\\"')
            lines.append(f'  {i} [label="{lab}"];')
        for i, j in edges:
            lines.append(f"  {i} -- {j};")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown export format {fmt!r}")
