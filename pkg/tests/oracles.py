"""Slow, independent reference implementations used as test oracles.

Everything here works from ``G.mul`` alone with Python sets, so it shares
no code path with the vectorised library routines it checks.
"""
from __future__ import annotations

from collections import deque
from itertools import product


def closure(G, gens) -> frozenset:
    seen = {0}
    todo = deque([0])
    gens = list(gens)
    while todo:
        a = todo.popleft()
        for g in gens:
            b = G.mul(a, g)
            if b not in seen:
                seen.add(b)
                todo.append(b)
    return frozenset(seen)


def generates(G, xs) -> bool:
    return len(closure(G, xs)) == G.order


def adjacency(G) -> list[list[bool]]:
    """Full generating-graph adjacency, loops included when <x> = G."""
    n = G.order
    A = [[False] * n for _ in range(n)]
    for x in range(n):
        for y in range(x, n):
            A[x][y] = A[y][x] = generates(G, (x, y))
    return A


def non_isolated(G) -> set[int]:
    A = adjacency(G)
    return {x for x in range(G.order) if any(A[x])}


def bfs(adj: list[list[bool]], verts: list[int], s: int) -> dict[int, int]:
    dist = {s: 0}
    todo = deque([s])
    while todo:
        a = todo.popleft()
        for b in verts:
            if adj[a][b] and b not in dist:
                dist[b] = dist[a] + 1
                todo.append(b)
    return dist


def components_and_diameters(G) -> tuple[int, list[int]]:
    A = adjacency(G)
    V = sorted(x for x in range(G.order) if any(A[x]))
    seen: set[int] = set()
    diams = []
    for s in V:
        if s in seen:
            continue
        comp = bfs(A, V, s)
        seen |= set(comp)
        diams.append(max(max(bfs(A, V, u).values()) for u in comp))
    return len(diams), diams


def subgroups(G) -> list[frozenset]:
    """Every subgroup, by iterated joins starting from the cyclic ones."""
    cyclic = {}
    for x in range(G.order):
        cyclic.setdefault(closure(G, [x]), x)
    gens = {C: [x] for C, x in cyclic.items()}
    frontier = list(gens)
    while frontier:
        new = []
        for H in frontier:
            for C, c in cyclic.items():
                if c in H:
                    continue
                J = closure(G, gens[H] + [c])
                if J not in gens:
                    gens[J] = gens[H] + [c]
                    new.append(J)
        frontier = new
    return sorted(gens, key=lambda H: (len(H), sorted(H)))


def generating_tuple_count(G, k: int = 2) -> int:
    """phi_k(G) = sum over subgroups H of mu(H, G) |H|^k (Moebius inversion)."""
    subs = subgroups(G)
    whole = frozenset(range(G.order))
    mu: dict[frozenset, int] = {whole: 1}
    for H in reversed(subs):
        if H == whole:
            continue
        mu[H] = -sum(mu[K] for K in mu if H < K)
    return sum(m * len(H) ** k for H, m in mu.items())


def chief_lengths_by_brute_force(G) -> int:
    """Length of a chief series, built from the normal-subgroup lattice."""
    subs = subgroups(G)
    inv = {g: next(h for h in range(G.order) if G.mul(g, h) == 0) for g in range(G.order)}
    normal = [H for H in subs if all(G.mul(G.mul(inv[g], h), g) in H for g in range(G.order) for h in H)]
    # longest chain of normal subgroups, each step minimal normal in the quotient
    length = {}
    for H in normal:  # increasing order
        below = [K for K in normal if K < H]
        if not below:
            length[H] = 0
            continue
        # a maximal proper normal subgroup of H that is normal in G
        maxes = [K for K in below if not any(K < L < H for L in normal)]
        length[H] = max(length[K] for K in maxes) + 1
    return length[frozenset(range(G.order))]


def product_bfs(adjs: list[list[list[bool]]], verts: list[list[int]], src: tuple) -> dict[tuple, int]:
    """BFS in the tensor product of graphs given by adjacency lists of lists."""
    dist = {src: 0}
    todo = deque([src])
    while todo:
        a = todo.popleft()
        nbrs = [[b for b in verts[i] if adjs[i][a[i]][b]] for i in range(len(a))]
        for b in product(*nbrs):
            if b not in dist:
                dist[b] = dist[a] + 1
                todo.append(b)
    return dist
