"""Subgroup structure: closures, classes, normal subgroups, quotients,
the subgroup lattice, Frattini subgroup, chief series and ``d_X(G)``."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..caps import check_cap, get_caps
from ..errors import CapExceeded, PreconditionError
from .group import Group, Subgroup, closure_mask, greedy_generators


def closure(G: Group, generators: Iterable[int] = ()) -> Subgroup:
    """Smallest subgroup containing ``generators``."""
    gens = tuple(sorted({int(g) for g in generators} - {0}))
    return Subgroup(G, closure_mask(G, gens), gens)


def trivial_subgroup(G: Group) -> Subgroup:
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    return Subgroup(G, mask, (), _normal=True)


def whole_group(G: Group) -> Subgroup:
    return Subgroup(G, np.ones(G.order, dtype=bool), tuple(G.gens), _normal=True)


def subgroup_from_mask(G: Group, mask: np.ndarray, normal: bool | None = None) -> Subgroup:
    gens = greedy_generators(G, np.flatnonzero(mask))
    return Subgroup(G, mask.copy(), gens, _normal=normal)


# -- cyclic subgroups and conjugacy ---------------------------------------------


def cyclic_reps(G: Group) -> np.ndarray:
    """``rep[x]`` is the smallest index generating the same cyclic group as ``x``."""
    hit = G.cache.get("cyc_rep")
    if hit is not None:
        return hit
    orders = G.element_orders
    all_ = np.arange(G.order)
    rep = all_.copy()
    pw = all_.copy()
    for k in range(2, int(orders.max())):
        pw = G.mul_vec(pw, all_)
        ok = (k < orders) & (np.gcd(k, orders) == 1)
        rep = np.where(ok, np.minimum(rep, pw), rep)
    rep.flags.writeable = False
    G.cache["cyc_rep"] = rep
    return rep


@dataclass
class ConjugacyClasses:
    class_id: np.ndarray  # element -> class number
    reps: list[int]  # class number -> smallest member
    transporter: np.ndarray  # x = reps[class_id[x]] ^ transporter[x]

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.class_id == c)


def conjugacy_classes(G: Group) -> ConjugacyClasses:
    hit = G.cache.get("classes")
    if hit is not None:
        return hit
    n = G.order
    cid = np.full(n, -1, dtype=np.int64)
    trans = np.zeros(n, dtype=np.int64)
    perms = [(s, G.conj_perm(s)) for s in G.gens]
    reps = []
    for x in range(n):
        if cid[x] >= 0:
            continue
        c = len(reps)
        reps.append(x)
        cid[x] = c
        frontier = np.array([x])
        while frontier.size:
            nxt = []
            for s, cp in perms:
                ys = cp[frontier]
                new = cid[ys] < 0
                if not new.any():
                    continue
                ys, src = ys[new], frontier[new]
                ys, first = np.unique(ys, return_index=True)
                src = src[first]
                cid[ys] = c
                trans[ys] = G.mul_vec(trans[src], np.full(len(src), s))
                nxt.append(ys)
            frontier = np.concatenate(nxt) if nxt else np.array([], dtype=np.int64)
    out = ConjugacyClasses(cid, reps, trans)
    G.cache["classes"] = out
    return out


def centralizer(G: Group, x: int) -> Subgroup:
    return subgroup_from_mask(G, G.commutes(x))


def center(G: Group) -> Subgroup:
    mask = np.ones(G.order, dtype=bool)
    for g in G.gens:
        mask &= G.commutes(g)
    return subgroup_from_mask(G, mask, normal=True)


# -- normal subgroups -------------------------------------------------------------


def normal_closure(G: Group, elems: Iterable[int]) -> Subgroup:
    gens = sorted({int(e) for e in elems} - {0})
    mask = closure_mask(G, gens)
    perms = [G.conj_perm(s) for s in G.gens]
    while True:
        outside = None
        for cp in perms:
            imgs = cp[gens] if gens else np.array([], dtype=np.int64)
            bad = imgs[~mask[imgs]]
            if bad.size:
                outside = int(bad[0])
                break
        if outside is None:
            return Subgroup(G, mask, tuple(gens), _normal=True)
        gens.append(outside)
        mask = closure_mask(G, gens, start=mask)


def _sort_subgroups(subs: Iterable[Subgroup]) -> list[Subgroup]:
    return sorted(subs, key=Subgroup.sort_key)


def minimal_normal_subgroups(G: Group) -> list[Subgroup]:
    """All minimal normal subgroups, sorted by (order, member list).

    A minimal normal subgroup is the normal closure of any of its
    elements of prime order, so only those elements are tried.
    """
    hit = G.cache.get("minimal_normal")
    if hit is not None:
        return hit
    if G.order == 1:
        G.cache["minimal_normal"] = []
        return []
    check_cap("order", G.order, "minimal normal subgroups")
    cls = conjugacy_classes(G)
    orders = G.element_orders
    cands: dict[bytes, Subgroup] = {}
    for r in cls.reps:
        o = int(orders[r])
        if r == 0 or any(o % f == 0 for f in range(2, math.isqrt(o) + 1)):
            continue
        N = normal_closure(G, [r])
        cands.setdefault(N.key, N)
    subs = list(cands.values())
    minimal = [N for N in subs if not any(M.order < N.order and M <= N for M in subs)]
    out = _sort_subgroups(minimal)
    G.cache["minimal_normal"] = out
    return out


def normal_subgroups(G: Group) -> list[Subgroup]:
    """Every normal subgroup, as joins of normal closures of single elements."""
    hit = G.cache.get("normal_subgroups")
    if hit is not None:
        return hit
    cls = conjugacy_classes(G)
    known: dict[bytes, Subgroup] = {}
    base = []
    for r in cls.reps:
        N = normal_closure(G, [r])
        if N.key not in known:
            known[N.key] = N
            base.append(N)
    queue = deque(base)
    while queue:
        A = queue.popleft()
        for B in base:
            if B <= A:
                continue
            mask = closure_mask(G, A.gens + B.gens, start=A.mask)
            C = Subgroup(G, mask, tuple(sorted(set(A.gens + B.gens))), _normal=True)
            if C.key not in known:
                known[C.key] = C
                queue.append(C)
    out = _sort_subgroups(known.values())
    G.cache["normal_subgroups"] = out
    return out


# -- quotients ------------------------------------------------------------------


@dataclass
class Quotient:
    """``group`` is ``parent / kernel``; ``proj`` maps parent indices to cosets."""

    parent: Group
    kernel: Subgroup
    group: Group
    proj: np.ndarray
    reps: np.ndarray


def quotient(G: Group, N: Subgroup) -> Quotient:
    if not N.is_normal:
        raise PreconditionError("quotient by a non-normal subgroup")
    key = ("quotient", N.key)
    hit = G.cache.get(key)
    if hit is not None:
        return hit
    n = G.order
    members = N.members
    cid = np.full(n, -1, dtype=np.int64)
    reps = []
    for i in range(n):
        if cid[i] < 0:
            cid[G.mul_vec(np.full(len(members), i), members)] = len(reps)
            reps.append(i)
    reps = np.array(reps, dtype=np.int64)
    m = len(reps)
    labels = [G.labels[r] + ("" if N.order == 1 else "N") for r in reps]
    gens = sorted({int(cid[g]) for g in G.gens} - {0})

    if m <= get_caps().table:
        table = np.empty((m, m), dtype=np.int64)
        step = max(1, 2_000_000 // m)
        for a in range(0, m, step):
            table[a:a + step] = cid[G.mul_vec(reps[a:a + step, None], reps[None, :])]
        Q = Group(labels, table=table, gens=gens, name=f"{G.name}/N{N.order}")
    else:
        def mul_vec(x, y, _c=cid, _r=reps, _G=G):
            return _c[_G.mul_vec(_r[x], _r[y])]

        Q = Group(labels, mul_vec=mul_vec, gens=gens, name=f"{G.name}/N{N.order}")
    out = Quotient(G, N, Q, cid, reps)
    G.cache[key] = out
    return out


# -- subgroup lattice ------------------------------------------------------------


def _conjugate_orbit(G: Group, H: Subgroup) -> list[Subgroup]:
    orbit = {H.key: H}
    frontier = [H]
    perms = [G.conj_perm(s) for s in G.gens]
    while frontier:
        nxt = []
        for K in frontier:
            members = K.members
            for cp in perms:
                mask = np.zeros(G.order, dtype=bool)
                mask[cp[members]] = True
                L = Subgroup(G, mask, tuple(sorted(int(x) for x in cp[list(K.gens)])))
                if L.key not in orbit:
                    orbit[L.key] = L
                    nxt.append(L)
        frontier = nxt
    return list(orbit.values())


def all_subgroups(G: Group) -> list[Subgroup]:
    """Every subgroup of ``G`` with ``is_maximal`` filled in.

    Join-closure from the cyclic subgroups, processing one representative
    per conjugacy class of subgroups.
    """
    hit = G.cache.get("all_subgroups")
    if hit is not None:
        return hit
    if G.order > get_caps().subgroups:
        raise CapExceeded(
            f"subgroup enumeration infeasible: |{G.name}| = {G.order} exceeds "
            f"subgroups cap {get_caps().subgroups}"
        )
    cyc = np.unique(cyclic_reps(G))
    cyc = cyc[cyc != 0]
    known: dict[bytes, Subgroup] = {}
    orbit_of: dict[bytes, list[Subgroup]] = {}
    queue: deque[Subgroup] = deque()

    def register(H: Subgroup):
        if H.key in known:
            return
        orbit = _conjugate_orbit(G, H)
        for K in orbit:
            known[K.key] = K
        orbit_of[H.key] = orbit
        queue.append(H)

    register(trivial_subgroup(G))
    whole = whole_group(G)
    while queue:
        H = queue.popleft()
        maximal = not H.is_whole
        for c in cyc:
            if H.mask[c]:
                continue
            gens = H.gens + (int(c),)
            mask = closure_mask(G, gens, start=H.mask, stop_at_half=True)
            if mask.all():
                continue
            maximal = False
            register(Subgroup(G, mask, gens))
        for K in orbit_of[H.key]:
            K.is_maximal = maximal
    known.setdefault(whole.key, whole)
    whole = known[whole.key]
    whole.is_maximal = False
    out = _sort_subgroups(known.values())
    G.cache["all_subgroups"] = out
    return out


def maximal_subgroups(G: Group) -> list[Subgroup]:
    return [H for H in all_subgroups(G) if H.is_maximal]


def frattini(G: Group) -> Subgroup:
    mask = np.ones(G.order, dtype=bool)
    for M in maximal_subgroups(G):
        mask &= M.mask
    return subgroup_from_mask(G, mask, normal=True)


# -- generation counts -------------------------------------------------------------


def min_generating_set(G: Group, x: Sequence[int] = ()) -> tuple[int, ...]:
    """A smallest set ``Y`` with ``<X, Y> = G``, found by increasing size.

    Searches subgroups level by level (deduplicated), trying candidate
    elements of large order first.
    """
    x = tuple(sorted({int(v) for v in x} - {0}))
    key = ("min_gen", x)
    if key in G.cache:
        return G.cache[key]
    H0 = closure(G, x)
    if H0.is_whole:
        G.cache[key] = ()
        return ()
    orders = G.element_orders
    cands = np.unique(cyclic_reps(G))
    cands = sorted((int(c) for c in cands if c != 0), key=lambda c: (-orders[c], c))
    level: dict[bytes, tuple[Subgroup, tuple[int, ...]]] = {H0.key: (H0, ())}
    while level:
        nxt: dict[bytes, tuple[Subgroup, tuple[int, ...]]] = {}
        items = sorted(level.values(), key=lambda it: (-it[0].order, it[1]))
        for H, chosen in items:
            for c in cands:
                if H.mask[c]:
                    continue
                gens = H.gens + (c,)
                mask = closure_mask(G, gens, start=H.mask, stop_at_half=True)
                if mask.all():
                    out = chosen + (c,)
                    G.cache[key] = out
                    return out
                K = Subgroup(G, mask, gens)
                nxt.setdefault(K.key, (K, chosen + (c,)))
        level = nxt
    raise AssertionError("unreachable: the whole group is eventually generated")  # pragma: no cover


def d_rel(G: Group, x: Sequence[int] = ()) -> int:
    """``d_X(G)``: fewest elements generating ``G`` together with ``x``."""
    return len(min_generating_set(G, x))


def is_soluble(G: Group) -> bool:
    return all(f.abelian for f in chief_series(G).factors)


# -- chief series ----------------------------------------------------------------------


@dataclass
class ChiefFactor:
    order: int
    abelian: bool
    central: bool  # acts trivially by conjugation, i.e. a trivial module
    frattini: bool  # contained in the Frattini subgroup of its quotient
    prime: int | None = None
    q: int | None = None  # |End_G(factor)| for abelian factors
    r: int | None = None  # dimension over End_G(factor)


@dataclass
class ChiefStage:
    quotient: Group  # G / N_{i-1}
    proj: np.ndarray  # G -> quotient
    factor: Subgroup  # N_i / N_{i-1} inside quotient
    info: ChiefFactor
    next_proj: np.ndarray  # quotient -> quotient / factor


@dataclass
class ChiefSeries:
    group: Group
    terms: list[Subgroup]  # N_0 = 1 < N_1 < ... < N_t = G, as subgroups of G
    stages: list[ChiefStage] = field(repr=False)

    @property
    def t(self) -> int:
        return len(self.stages)

    @property
    def factors(self) -> list[ChiefFactor]:
        return [s.info for s in self.stages]

    def factor_orders(self) -> tuple[int, ...]:
        return tuple(f.order for f in self.factors)


def _is_central(Q: Group, M: Subgroup) -> bool:
    members = M.members
    return all((Q.commutes(g)[members]).all() for g in Q.gens)


def has_complement(Q: Group, M: Subgroup) -> bool:
    """Whether the normal subgroup ``M`` has a complement in ``Q``.

    A complement is isomorphic to ``Q/M`` and so contains lifts ``y_i m_i``
    of any generating set ``y_i M`` of ``Q/M``; every such lift is tried.
    """
    R = quotient(Q, M)
    ybar = min_generating_set(R.group)
    lifts = [int(R.reps[y]) for y in ybar]
    target = Q.order // M.order
    members = M.members
    if not lifts:
        return M.is_whole
    grids = np.meshgrid(*([members] * len(lifts)), indexing="ij")
    for combo in zip(*(g.ravel() for g in grids)):
        gens = [Q.mul(l, int(m)) for l, m in zip(lifts, combo)]
        mask = closure_mask(Q, gens)
        if mask.sum() == target:
            return True
    return False


def factor_in_frattini(Q: Group, M: Subgroup) -> bool:
    """Whether the minimal normal subgroup ``M`` lies in Frat(Q).

    Nonabelian minimal normal subgroups never do (the Frattini subgroup is
    nilpotent); an abelian one does exactly when it has no complement.
    """
    if not _is_abelian_subgroup(Q, M):
        return False
    return not has_complement(Q, M)


def _is_abelian_subgroup(G: Group, M: Subgroup) -> bool:
    gens = list(M.gens) or [int(x) for x in M.members]
    return all((G.row(a)[gens] == G.col(a)[gens]).all() for a in gens)


def chief_series(G: Group, rng: np.random.Generator | None = None) -> ChiefSeries:
    """A chief series with per-factor metadata.

    With ``rng`` the minimal normal subgroup taken at each step is chosen at
    random, otherwise the first in the deterministic ordering.
    """
    from .modules import endo_params  # local import: modules depends on this file

    if rng is None and "chief_series" in G.cache:
        return G.cache["chief_series"]
    n = G.order
    Q = G
    proj = np.arange(n)
    terms = [trivial_subgroup(G)]
    stages = []
    while Q.order > 1:
        mins = minimal_normal_subgroups(Q)
        if rng is None:
            # non-central factors first, so the series runs up through the
            # derived part before the central layers
            M = min(mins, key=lambda S: (_is_central(Q, S), S.sort_key()))
        else:
            M = mins[int(rng.integers(len(mins)))]
        abelian = _is_abelian_subgroup(Q, M)
        info = ChiefFactor(
            order=M.order,
            abelian=abelian,
            central=_is_central(Q, M),
            frattini=factor_in_frattini(Q, M),
        )
        if abelian:
            info.prime = int(Q.element_orders[M.members[1]])
            info.q, info.r = endo_params(Q, M)
        qt = quotient(Q, M)
        stages.append(ChiefStage(Q, proj, M, info, qt.proj))
        proj = qt.proj[proj]
        terms.append(Subgroup(G, proj == 0, (), _normal=True))
        Q = qt.group
    for T in terms:
        T.gens = greedy_generators(G, T.members)
    out = ChiefSeries(G, terms, stages)
    if rng is None:
        G.cache["chief_series"] = out
    return out
