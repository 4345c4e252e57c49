"""Generation counts localised along a chief series.

``phi_count`` counts the tuples inside a fixed product of ``N``-cosets that
generate ``G`` together with ``X``; along a chief series these counts
multiply out to the degree of a vertex (:func:`degree_factorization`).
"""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import LemmaViolation, LiftNotFound, PreconditionError
from .gen_graph import (
    degree,
    degrees,
    generation_matrix,
    generating_graph,
    generation_row,
    graph_metrics,
    non_isolated,
    non_isolated_mask,
)
from .group_core.group import Group, Subgroup, closure_mask, generates
from .group_core.lattice import (
    ChiefSeries,
    chief_series,
    d_rel,
    is_soluble,
    normal_subgroups,
    quotient,
)
from .group_core.modules import endo_params

__all__ = [
    "LocalCount",
    "DegreeFactorization",
    "phi_count",
    "local_count",
    "local_degree",
    "degree_factorization",
    "endo_params",
    "verify_degree_bound",
    "gaschutz_lift",
    "nonabelian_witness",
    "diam2_criterion",
    "degree_report_csv",
    "phi_independence",
]


@dataclass
class LocalCount:
    stage: int | None
    factor_order: int
    k: int
    phi: int

    @property
    def probability(self) -> Fraction:
        return Fraction(self.phi, self.factor_order**self.k)


def _generates_mod(G: Group, N: Subgroup, elems: Sequence[int]) -> bool:
    gens = [int(e) for e in elems] + list(N.gens) + ([int(m) for m in N.members] if not N.gens else [])
    return generates(G, gens)


def phi_count(G: Group, N: Subgroup, x: Sequence[int], k: int, coset_reps: Sequence[int],
              check_d: bool = True) -> int:
    """Number of ``(g_1 n_1, ..., g_k n_k)`` with ``n_i`` in ``N`` generating ``G`` with ``x``."""
    x = [int(e) for e in x]
    reps = [int(g) for g in coset_reps]
    if len(reps) != k or k < 1:
        raise PreconditionError(f"need exactly k={k} coset representatives")
    if not N.is_normal:
        raise PreconditionError("N must be normal")
    if not _generates_mod(G, N, reps + x):
        raise PreconditionError("representatives do not generate G with X modulo N")
    if check_d and k < d_rel(G, x):
        raise PreconditionError(f"k={k} is below d_X(G)={d_rel(G, x)}")
    members = N.members
    cosets = [G.mul_vec(np.full(len(members), g), members) for g in reps]
    if k == 1 and len(x) == 1:
        return int(generation_row(G, x[0])[cosets[0]].sum())
    count = 0
    for combo in itertools.product(*cosets):
        if generates(G, list(combo) + x):
            count += 1
    return count


def _stage_groups(series: ChiefSeries, i: int):
    """``(Q, proj, M, R, next_proj)`` for stage ``i`` (1-based): Q = G/N_{i-1}, R = Q/M."""
    st = series.stages[i - 1]
    R = quotient(st.quotient, st.factor).group
    return st.quotient, st.proj, st.factor, R, st.next_proj


def local_count(G: Group, series: ChiefSeries, v: int, i: int, rep: int | None = None) -> LocalCount:
    """Stage-``i`` count ``phi_{G/N_{i-1}, N_i/N_{i-1}}(v N_{i-1}, 1)``.

    ``rep`` (an element of ``G/N_{i-1}``) picks the coset; by default the
    first one that generates with ``v`` modulo the factor.
    """
    Q, proj, M, R, nxt = _stage_groups(series, i)
    gv = int(proj[v])
    if rep is None:
        good = generation_row(R, int(nxt[gv]))[nxt]
        cands = np.flatnonzero(good)
        if not len(cands):
            raise PreconditionError(f"vertex {v} is isolated in stage {i}")
        rep = int(cands[0])
    elif not generation_row(R, int(nxt[gv]))[nxt[rep]]:
        raise PreconditionError(f"representative {rep} does not generate with v modulo the factor")
    coset = Q.mul_vec(np.full(M.order, rep), M.members)
    phi = int(generation_row(Q, gv)[coset].sum())
    return LocalCount(i, M.order, 1, phi)


def local_degree(G: Group, series: ChiefSeries, v: int, i: int) -> int:
    if not non_isolated_mask(G)[v]:
        raise PreconditionError(f"vertex {v} is isolated")
    return local_count(G, series, v, i).phi


@dataclass
class DegreeFactorization:
    vertex: int
    stages: list[int]
    direct: int

    @property
    def product(self) -> int:
        out = 1
        for s in self.stages:
            out *= s
        return out

    @property
    def match(self) -> bool:
        return self.product == self.direct


def degree_factorization(G: Group, v: int, series: ChiefSeries | None = None) -> DegreeFactorization:
    series = series or chief_series(G)
    if not non_isolated_mask(G)[v]:
        raise PreconditionError(f"vertex {v} is isolated")
    stages = [local_count(G, series, v, i).phi for i in range(1, series.t + 1)]
    return DegreeFactorization(int(v), stages, degree(G, v))


# -- chief-length degree bound ------------------------------------------------------------


@dataclass
class DegreeBoundReport:
    group: str
    t: int
    bound: int
    min_degree: int | None
    order2_complemented: int
    violations: list[int] = field(default_factory=list)

    @property
    def slack(self) -> int | None:
        return None if self.min_degree is None else self.min_degree - self.bound

    @property
    def ok(self) -> bool:
        return not self.violations and self.order2_complemented <= 2

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "t": self.t,
            "bound": self.bound,
            "min_degree": self.min_degree,
            "slack": self.slack,
            "order2_non_frattini": self.order2_complemented,
            "violations": self.violations,
            "ok": self.ok,
        }


def verify_degree_bound(G: Group) -> DegreeBoundReport:
    """Check ``deg(v) >= 2^(t-2)`` on V(G) (read as ``max(1, .)`` for ``t <= 2``)."""
    if d_rel(G) > 2:
        raise PreconditionError(f"{G.name} is not 2-generated")
    cs = chief_series(G)
    t = cs.t
    bound = max(1, 2 ** (t - 2)) if t >= 2 else 1
    V = non_isolated(G)
    deg = degrees(G)[V]
    viol = V[deg < bound].tolist()
    order2 = sum(1 for f in cs.factors if f.order == 2 and not f.frattini)
    return DegreeBoundReport(
        G.name, t, bound, int(deg.min()) if len(V) else None, order2, viol
    )


# -- lifts ---------------------------------------------------------------------------------


def _set_product_is_whole(G: Group, H: np.ndarray, M: Subgroup) -> bool:
    inter = int((H & M.mask).sum())
    return int(H.sum()) * M.order == G.order * inter


def gaschutz_lift(G: Group, M: Subgroup, v: int, x: int) -> int:
    """First ``m`` in ``M`` (index order) with ``<v, x m> = G``.

    Requires ``v`` in V(G) and ``<v, x> M = G`` (as a set product).  For
    normal ``M`` a lift always exists and a failure raises
    :class:`LemmaViolation`.  Non-normal ``M`` can genuinely have none (in
    ``Sym(4)`` with ``M`` of order 2), reported as :class:`LiftNotFound`.
    """
    v, x = int(v), int(x)
    if not non_isolated_mask(G)[v]:
        raise PreconditionError(f"vertex {v} is isolated")
    H = closure_mask(G, (v, x))
    if not _set_product_is_whole(G, H, M):
        raise PreconditionError("<v, x> M is not the whole group")
    members = M.members
    row = generation_row(G, v)
    hits = row[G.mul_vec(np.full(len(members), x), members)]
    idx = np.flatnonzero(hits)
    if not len(idx):
        msg = f"no m in M with <{v}, {x}m> = G in {G.name}"
        if M.is_normal:
            raise LemmaViolation(msg)
        raise LiftNotFound(msg + " (M is not normal)")
    return int(members[idx[0]])


def nonabelian_witness(G: Group, N: Subgroup, g: int, x: int) -> int:
    """Some ``1 != n`` in ``N`` centralising ``g`` with ``x^n != x`` adjacent to ``g``."""
    if not generates(G, (g, x)):
        raise PreconditionError("(g, x) is not an edge")
    row = generation_row(G, g)
    cent = G.commutes(g)
    for n in N.members[1:]:
        n = int(n)
        if not cent[n]:
            continue
        xn = G.conj(x, n)
        if xn != x and row[xn]:
            return n
    raise LemmaViolation(f"no centralising witness in N for the edge ({g}, {x}) of {G.name}")


# -- diameter-two criterion --------------------------------------------------------------


@dataclass
class Diam2Report:
    group: str
    factor_q: list[int]  # q of each complemented factor with a nontrivial action
    hypothesis: bool
    diameter: int | None
    connected: bool

    @property
    def prediction(self) -> str | None:
        return "diam<=2" if self.hypothesis else None

    @property
    def consistent(self) -> bool:
        return not self.hypothesis or (self.connected and (self.diameter or 0) <= 2)

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "factor_q": self.factor_q,
            "hypothesis": self.hypothesis,
            "prediction": self.prediction,
            "diameter": self.diameter,
            "connected": self.connected,
            "consistent": self.consistent,
        }


def diam2_criterion(G: Group) -> Diam2Report:
    """Evaluate ``|End_G(V)| > 2`` over the complemented chief factors with a
    nontrivial action and compare with the measured diameter of Delta(G)."""
    if not is_soluble(G):
        raise PreconditionError(f"{G.name} is not soluble")
    cs = chief_series(G)
    qs = [f.q for f in cs.factors if not f.frattini and not f.central]
    m = graph_metrics(generating_graph(G))
    return Diam2Report(
        G.name, qs, all(q > 2 for q in qs), m.diameter, m.connected
    )


# -- CSV ------------------------------------------------------------------------------------


def degree_report_csv(G: Group) -> str:
    cs = chief_series(G)
    t = cs.t
    bound = max(1, 2 ** (t - 2)) if t >= 2 else 1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vertex", "degree", "t", "bound"] + [f"stage{i}" for i in range(1, t + 1)] + ["product", "match"])
    for v in non_isolated(G):
        f = degree_factorization(G, int(v), cs)
        w.writerow([G.labels[v], f.direct, t, bound] + f.stages + [f.product, f.match])
    return buf.getvalue()


# -- independence of the coset representatives -------------------------------------------


@dataclass
class IndependenceReport:
    group: str
    normals: int
    families: int  # (N, X, k) combinations examined
    patterns: int  # generating coset patterns counted
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "normal_subgroups": self.normals,
            "families": self.families,
            "patterns": self.patterns,
            "violations": self.violations[:20],
            "ok": self.ok,
        }


def _triple_matrix(G: Group, g: int) -> np.ndarray:
    """``T[y, z] = (<g, y, z> = G)``, closing each distinct ``<g, y>`` once."""
    n = G.order
    T = np.zeros((n, n), dtype=bool)
    seen: dict[bytes, np.ndarray] = {}
    for y in range(n):
        H = closure_mask(G, (g, y))
        key = np.packbits(H).tobytes()
        if key not in seen:
            seen[key] = np.array([closure_mask(G, (g, y, z), start=H, stop_at_half=True).all() for z in range(n)])
        T[y] = seen[key]
    return T


def phi_independence(G: Group, triple_limit: int = 24) -> IndependenceReport:
    """Compare ``phi_{G,N}(X, k)`` over every coset pattern generating modulo ``N``.

    Covers every normal ``N`` with ``k = 1`` (``X`` empty or a single vertex)
    and ``k = 2`` (``X`` empty, and ``X = {g}`` up to ``triple_limit``).
    Each generating pattern must also give a positive count.
    """
    n = G.order
    A = generation_matrix(G).astype(np.int64)
    d = d_rel(G)
    rep = IndependenceReport(G.name, 0, 0, 0)
    triples = {}
    if n <= triple_limit:
        triples = {g: _triple_matrix(G, g) for g in range(n) if d_rel(G, [g]) <= 2}

    def check(label, N, values):
        rep.families += 1
        rep.patterns += len(values)
        if len(values) and (len(set(values.tolist())) != 1 or values.min() <= 0):
            rep.violations.append({"N_order": N.order, "family": label,
                                   "values": sorted(set(values.tolist()))})

    for N in normal_subgroups(G):
        rep.normals += 1
        qt = quotient(G, N)
        Q, proj = qt.group, qt.proj
        AQ = generation_matrix(Q)
        P = np.zeros((n, Q.order), dtype=np.int64)
        P[np.arange(n), proj] = 1
        if d <= 1:
            diag = np.diagonal(A) @ P
            check("k=1,X=()", N, diag[np.diagonal(AQ)])
        S = A @ P
        for g in range(n):
            if d_rel(G, [g]) <= 1:
                check(f"k=1,X=({g},)", N, S[g][AQ[proj[g]]])
        if d <= 2:
            B = P.T @ A @ P
            check("k=2,X=()", N, B[AQ])
        for g, T in triples.items():
            gq = int(proj[g])
            TQ = np.zeros((Q.order, Q.order), dtype=bool)
            for a in range(Q.order):
                for b in range(Q.order):
                    TQ[a, b] = generates(Q, (gq, a, b))
            B = P.T @ T.astype(np.int64) @ P
            check(f"k=2,X=({g},)", N, B[TQ])
    return rep
