"""Verification suites run per group over a corpus.

Each suite maps a spec string to a JSON-ready dict with a ``status`` of
``pass``, ``fail`` or ``skipped``.  Results are merged in corpus order, so
reports are identical for any worker count.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from typing import Callable

import numpy as np

from .caps import get_caps, set_caps
from .errors import CapExceeded, LemmaViolation
from .gen_graph import (
    generating_graph,
    generation_row,
    graph_metrics,
    non_isolated,
    verify_swap_refinement,
)
from .group_core.build import cached_group
from .group_core.lattice import chief_series, d_rel, is_soluble, minimal_normal_subgroups
from .local_degrees import degree_factorization, gaschutz_lift, phi_independence, verify_degree_bound
from .product_graphs import ProductGraph, lift_path, shortest_path, validate_walk

SUITES = ("tanti", "diam3", "prodo", "gaschutz", "swap", "coco", "tower")


def _skip(spec: str, reason: str) -> dict:
    return {"group": spec, "status": "skipped", "reason": reason}


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def suite_tanti(spec: str, seed: int) -> dict:
    G = cached_group(spec)
    if d_rel(G) > 2:
        return _skip(spec, "not 2-generated")
    rep = verify_degree_bound(G)
    out = rep.to_json()
    out.update(group=spec, status=_status(rep.ok))
    out["violations"] = [G.labels[v] for v in rep.violations[:20]]
    return out


def suite_diam3(spec: str, seed: int) -> dict:
    G = cached_group(spec)
    if not is_soluble(G):
        return _skip(spec, "not soluble")
    if d_rel(G) > 2:
        return _skip(spec, "not 2-generated")
    m = graph_metrics(generating_graph(G))
    ok = m.connected and (m.diameter or 0) <= 3
    return {"group": spec, "status": _status(ok), "components": m.components.count,
            "diameters": m.diameters, "vertices": int(len(m.components.labels))}


def suite_prodo(spec: str, seed: int) -> dict:
    G = cached_group(spec)
    cs = chief_series(G)
    bad = []
    V = non_isolated(G)
    for v in V:
        f = degree_factorization(G, int(v), cs)
        if not f.match:
            bad.append({"vertex": G.labels[v], "stages": f.stages, "direct": f.direct})
    return {"group": spec, "status": _status(not bad), "t": cs.t, "checked": int(len(V)),
            "mismatches": bad[:20]}


def _normal_lift_check(G) -> tuple[int, list]:
    """Every edge ``(v, y)`` of ``G/N`` lifts into the fibre over ``y`` for each minimal normal ``N``."""
    from .group_core.lattice import quotient

    checked, bad = 0, []
    for N in minimal_normal_subgroups(G):
        qt = quotient(G, N)
        Q, proj = qt.group, qt.proj
        for v in non_isolated(G):
            row_q = generation_row(Q, int(proj[v]))
            for y in np.flatnonzero(row_q):
                x = int(qt.reps[y])
                checked += 1
                try:
                    gaschutz_lift(G, N, int(v), x)
                except LemmaViolation as exc:
                    bad.append(str(exc))
    return checked, bad


def suite_gaschutz(spec: str, seed: int) -> dict:
    G = cached_group(spec)
    if G.order > 200:
        return _skip(spec, "order above 200")
    rep = phi_independence(G)
    lifts, lift_bad = _normal_lift_check(G)
    out = rep.to_json()
    out.update(group=spec, status=_status(rep.ok and not lift_bad), lifts_checked=lifts,
               lift_violations=lift_bad[:20])
    return out


def suite_swap(spec: str, seed: int) -> dict:
    G = cached_group(spec)
    if G.order > get_caps().swap:
        return _skip(spec, f"order above swap cap {get_caps().swap}")
    if d_rel(G) > 2:
        return _skip(spec, "not 2-generated")
    rep = verify_swap_refinement(G)
    return {"group": spec, "status": _status(rep.ok), "pairs": rep.pairs,
            "swap_components": rep.swap_components, "delta_components": rep.delta_components,
            "violations": rep.violations[:20]}


def triangle_violations(G, sample: int | None = None, seed: int = 0) -> tuple[int, list]:
    """Edges ``u - v`` of Delta(G) where ``u*v`` fails to be adjacent to ``u`` or ``v``."""
    from .gen_graph import generation_matrix

    if G.order <= 2048:
        A = generation_matrix(G)
        us, vs = np.nonzero(np.triu(A, k=1))
    else:
        rng = np.random.default_rng(seed)
        V = non_isolated(G)
        us, vs = [], []
        for u in rng.choice(V, size=min(sample or 500, len(V)), replace=False):
            nb = np.flatnonzero(generation_row(G, int(u)))
            us.append(int(u))
            vs.append(int(nb[rng.integers(len(nb))]))
        us, vs = np.array(us), np.array(vs)
    w = G.mul_vec(us, vs)
    bad = []
    for u, v, t in zip(us.tolist(), vs.tolist(), w.tolist()):
        row = generation_row(G, t)
        if not (row[u] and row[v]):
            bad.append([G.labels[u], G.labels[v]])
    return len(us), bad


def product_profile_check(G, seed: int = 0, walks: int = 40) -> dict:
    """On Delta(G) x Delta(G): BFS distance equals the lifted-walk length for every target.

    Expected distance is ``max(mu_1, mu_2)`` unless one coordinate is fixed
    and the other moves by one, where it is 2 (or 1 with a loop) and never
    below what the parity argument allows.
    """
    D = generating_graph(G)
    P = ProductGraph([D, D])
    if D.n == 0 or P.size > get_caps().product_bfs:
        return {"status": "skipped", "reason": "product too large or empty"}
    from .gen_graph import bfs_distances

    rng = np.random.default_rng(seed)
    bad, checked, certs = [], 0, 0
    for s in D.symmetry_reps:
        d1 = bfs_distances(D, int(s))
        src = (int(D.vertices[s]), int(D.vertices[s]))
        dist = P.bfs(src)
        mu = np.maximum.outer(d1, d1)
        lo = np.minimum.outer(d1, d1)
        loops = np.diagonal(D.materialize())
        expected = mu.copy()
        special = (mu == 1) & (lo == 0)
        expected[special] = 1 if loops[s] else 2
        both = (d1[:, None] >= 0) & (d1[None, :] >= 0)
        mism = both & (dist != expected)
        checked += int(both.sum())
        for a, b in zip(*np.nonzero(mism)):
            bad.append([D.label(s), D.label(int(a)), D.label(int(b)), int(dist[a, b]), int(expected[a, b])])
        for a, b in zip(rng.integers(0, D.n, size=walks), rng.integers(0, D.n, size=walks)):
            if d1[a] < 0 or d1[b] < 0:
                continue
            paths = [shortest_path(D, src[0], int(D.vertices[a])), shortest_path(D, src[1], int(D.vertices[b]))]
            m = max(int(expected[a, b]), 0)
            cert = lift_path([D, D], paths, m, validate=False)
            certs += 1
            if not validate_walk(P, cert) or cert.length != dist[a, b]:
                bad.append([D.label(s), D.label(int(a)), D.label(int(b)), "certificate"])
    return {"status": _status(not bad), "pairs_checked": checked, "certificates": certs,
            "violations": bad[:20]}


def suite_coco(spec: str, seed: int) -> dict:
    G = cached_group(spec)
    edges, tri_bad = triangle_violations(G, seed=seed)
    prof = product_profile_check(G, seed)
    ok = not tri_bad and prof["status"] != "fail"
    return {"group": spec, "status": _status(ok), "triangle_edges": edges,
            "triangle_violations": tri_bad[:20], "product": prof}


def suite_tower(spec: str, seed: int) -> dict:
    """The klein-cp3 tower over the primes 3 and 5 (``spec`` is ignored)."""
    from .profinite_tower import build_tower, degree_growth, measure_v, v_consistency
    from .gen_graph import non_isolated_mask

    T = build_tower("klein-cp3", [3, 5])
    dens = [measure_v(T, 0), measure_v(T, 1, samples=2000, seed=seed)]
    cons = v_consistency(T)
    top = T.levels[1].group
    g = int(np.flatnonzero(non_isolated_mask(top))[0])
    growth = degree_growth(T, g)
    ok = (
        all(d.matches_prediction for d in dens)
        and dens[1].interval_contains_prediction
        and cons.ok
        and growth.monotone
        and growth.bounds_respected
        and dens[0].density > dens[1].density
    )
    return {"group": "klein-cp3(3,5)", "status": _status(ok),
            "densities": [d.to_json() for d in dens], "consistency": cons.to_json(),
            "growth": growth.to_json()}


SUITE_FUNCS: dict[str, Callable[[str, int], dict]] = {
    "tanti": suite_tanti,
    "diam3": suite_diam3,
    "prodo": suite_prodo,
    "gaschutz": suite_gaschutz,
    "swap": suite_swap,
    "coco": suite_coco,
    "tower": suite_tower,
}


def _run_one(args) -> dict:
    suite, spec, seed, caps = args
    set_caps(caps)
    try:
        return SUITE_FUNCS[suite](spec, seed)
    except CapExceeded as exc:
        return _skip(spec, f"cap exceeded: {exc}")


def run_suite(suite: str, specs: list[str], seed: int = 0, workers: int = 1) -> dict:
    if suite not in SUITE_FUNCS:
        raise ValueError(f"unknown suite {suite!r}")
    if suite == "tower":
        specs = ["klein-cp3(3,5)"]
    jobs = [(suite, s, seed, get_caps()) for s in specs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    failed = [r["group"] for r in results if r["status"] == "fail"]
    return {
        "suite": suite,
        "seed": seed,
        "groups": len(results),
        "passed": sum(r["status"] == "pass" for r in results),
        "skipped": sum(r["status"] == "skipped" for r in results),
        "failed": failed,
        "ok": not failed,
        "results": results,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1)
