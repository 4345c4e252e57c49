"""Finite quotient towers standing in for profinite groups.

Two families are built in:

* ``klein-cp3``: ``(prod_p C_p^3) x| C_2^2`` truncated to the first few odd
  primes; level ``k`` keeps the first ``k`` primes and the maps forget the
  coordinates of the dropped primes.
* ``sl2-products``: ``prod_n SL(2, 2^p_n)^delta_p_n``; levels are kept as
  descriptors and only queried through :func:`power_adjacent`.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.stats import binomtest

from .caps import get_caps
from .errors import LemmaViolation, PreconditionError, SpecError, UnsupportedGroup
from .gen_graph import degrees, generating_pairs, generation_row, non_isolated_mask
from .group_core.autom import automorphisms, pair_class_ids, pair_stabilizer_sizes
from .group_core.build import build_group, klein_coordinates
from .group_core.group import Group, Subgroup, generates
from .group_core.lattice import chief_series, conjugacy_classes, cyclic_reps, quotient, subgroup_from_mask
from .group_core.spec import GroupSpec, _is_prime, parse_spec, spec_order
from .local_degrees import gaschutz_lift
from .product_graphs import power_adjacent

FAMILIES = ("klein-cp3", "sl2-products", "custom")


@dataclass
class Level:
    index: int
    params: tuple
    order: int
    group: Group | None = field(default=None, repr=False)
    descriptor: dict | None = None

    @property
    def materialized(self) -> bool:
        return self.group is not None


@dataclass
class TowerSpec:
    family: str
    levels: list[Level]
    maps: list[np.ndarray | None]  # maps[k]: level k+1 -> level k, None when not materialised

    def level(self, k: int) -> Level:
        return self.levels[k]

    def kernel(self, k: int) -> Subgroup:
        """Kernel of the map from level ``k+1`` down to level ``k``."""
        G = self.levels[k + 1].group
        mask = self.maps[k] == 0
        return Subgroup(G, mask, (), _normal=True)

    def project(self, x: int, top: int, bottom: int) -> int:
        for k in range(top - 1, bottom - 1, -1):
            x = int(self.maps[k][x])
        return x


# -- construction ----------------------------------------------------------------


def _klein_map(upper: Group, lower: Group) -> np.ndarray:
    kept = len(lower.cache["klein"]["primes"])
    E, h = upper.cache["klein"]["decode"](np.arange(upper.order))
    return lower.cache["klein"]["encode"](E[:, : 3 * kept], h)


def _check_epimorphism(upper: Group, lower: Group, f: np.ndarray) -> None:
    if len(np.unique(f)) != lower.order:
        raise PreconditionError("level map is not surjective")
    all_ = np.arange(upper.order)
    for g in upper.gens:
        # f(g * y) == f(g) * f(y) for every y
        if not (f[upper.row(g)] == lower.mul_vec(np.full(upper.order, f[g]), f[all_])).all():
            raise PreconditionError("level map is not a homomorphism")


def build_tower(family: str, params: Sequence | None = None, groups: Sequence[str] | None = None,
                maps: Sequence[np.ndarray] | None = None) -> TowerSpec:
    """Build a tower.

    ``klein-cp3``: ``params`` are the primes; level ``k`` uses the first ``k``.
    ``sl2-products``: ``params`` are field exponents ``p`` (2 or 3).
    ``custom``: ``groups`` are spec strings; equal consecutive specs get the
    identity map, otherwise ``maps`` must supply them.
    """
    if family == "klein-cp3":
        primes = tuple(int(p) for p in params or ())
        if not primes:
            raise SpecError("klein-cp3 needs at least one prime")
        if len(set(primes)) != len(primes) or any(p == 2 or not _is_prime(p) for p in primes):
            raise SpecError("klein-cp3 primes must be distinct odd primes")
        levels = []
        for k in range(1, len(primes) + 1):
            sub = primes[:k]
            order = 4 * math.prod(p**3 for p in sub)
            G = build_group(GroupSpec("KleinCp3", sub)) if order <= get_caps().order else None
            levels.append(Level(k - 1, sub, order, G))
        fmaps = []
        for k in range(len(levels) - 1):
            lo, up = levels[k].group, levels[k + 1].group
            if lo is None or up is None:
                fmaps.append(None)
                continue
            f = _klein_map(up, lo)
            _check_epimorphism(up, lo, f)
            fmaps.append(f)
        _check_composition(levels, fmaps)
        return TowerSpec(family, levels, fmaps)
    if family == "sl2-products":
        ps = tuple(int(p) for p in params or ())
        if any(p not in (2, 3) for p in ps):
            raise UnsupportedGroup("sl2-products supports p in {2, 3}")
        levels = []
        for k in range(1, len(ps) + 1):
            factors = [{"base": f"SL2({2**p})", "p": p, "delta": delta_p(p).delta} for p in ps[:k]]
            order_log2 = sum(f["delta"] * math.log2(spec_order(parse_spec(f["base"]))) for f in factors)
            levels.append(Level(k - 1, ps[:k], 0, None, {"factors": factors, "log2_order": order_log2}))
        return TowerSpec(family, levels, [None] * (len(levels) - 1))
    if family == "custom":
        specs = list(groups or ())
        if not specs:
            raise SpecError("custom tower needs at least one group")
        levels = []
        for k, s in enumerate(specs):
            G = build_group(s)
            levels.append(Level(k, (str(G.spec),), G.order, G))
        fmaps = []
        for k in range(len(levels) - 1):
            lo, up = levels[k].group, levels[k + 1].group
            if maps is not None and maps[k] is not None:
                f = np.asarray(maps[k], dtype=np.int64)
            elif str(lo.spec) == str(up.spec):
                f = np.arange(up.order)
            else:
                raise PreconditionError(f"no map given from level {k + 1} to level {k}")
            _check_epimorphism(up, lo, f)
            fmaps.append(f)
        return TowerSpec(family, levels, fmaps)
    raise SpecError(f"unknown tower family {family!r}")


def _check_composition(levels: list[Level], fmaps: list) -> None:
    """The composite of consecutive maps agrees with the direct coordinate-forgetting map."""
    for k in range(len(fmaps) - 1):
        a, b = fmaps[k], fmaps[k + 1]
        if a is None or b is None:
            continue
        direct = _klein_map(levels[k + 2].group, levels[k].group)
        if not (a[b] == direct).all():
            raise PreconditionError("tower maps do not compose")


# -- the closed-form description of V ---------------------------------------------------


def v_characterization(level: Level | Group, element) -> bool:
    """Closed-form membership in V for a klein-cp3 level.

    ``element`` is an index into the level group, or a pair
    ``({p: (n1, n2, n3)}, h)`` for levels that are not materialised.
    Non-isolated iff ``h = h_j`` for some ``j`` and ``n_{p,j} != 0`` for every ``p``.
    """
    if isinstance(level, Level):
        G = level.group
        primes = level.params
    else:
        G = level
        primes = G.cache.get("klein", {}).get("primes")
    if primes is None or (G is not None and "klein" not in G.cache):
        raise SpecError("v_characterization applies to klein-cp3 levels only")
    if isinstance(element, tuple):
        coords, h = element
    else:
        if G is None:
            raise PreconditionError("level is not materialised; pass coordinates")
        coords, h = klein_coordinates(G, int(element))
    if h == 0:
        return False
    return all(coords[p][h - 1] % p != 0 for p in primes)


def characterization_mask(G: Group) -> np.ndarray:
    """The closed form evaluated on every element of a materialised klein-cp3 level."""
    info = G.cache["klein"]
    E, h = info["decode"](np.arange(G.order))
    out = h > 0
    j = np.where(h > 0, h - 1, 0)
    for k, _p in enumerate(info["primes"]):
        out &= E[np.arange(G.order), 3 * k + j] != 0
    return out


def predicted_density(primes: Sequence[int]) -> Fraction:
    out = Fraction(3, 4)
    for p in primes:
        out *= Fraction(p - 1, p)
    return out


def characterization_count(primes: Sequence[int]) -> int:
    """``|V|`` from the closed form: three choices of ``j``, ``(p-1) p^2`` coordinates per prime."""
    return 3 * math.prod((p - 1) * p * p for p in primes)


# -- densities ---------------------------------------------------------------------------------


@dataclass
class DensityReport:
    level: int
    order: int
    method: str  # brute-force | characterization | monte-carlo
    count: int | None  # exact |V| when known
    predicted: Fraction | None = None
    samples: int | None = None
    hits: int | None = None
    seed: int | None = None
    interval: tuple[float, float] | None = None  # Wilson interval for the estimate
    confidence: float | None = None

    @property
    def density(self) -> Fraction | None:
        return None if self.count is None else Fraction(self.count, self.order)

    @property
    def matches_prediction(self) -> bool | None:
        if self.predicted is None or self.count is None:
            return None
        return self.density == self.predicted

    @property
    def interval_contains_prediction(self) -> bool | None:
        if self.interval is None or self.predicted is None:
            return None
        return self.interval[0] <= float(self.predicted) <= self.interval[1]

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "order": self.order,
            "method": self.method,
            "v_count": self.count,
            "density": None if self.density is None else str(self.density),
            "predicted": None if self.predicted is None else str(self.predicted),
            "matches_prediction": self.matches_prediction,
            "samples": self.samples,
            "hits": self.hits,
            "seed": self.seed,
            "wilson_interval": None if self.interval is None else [round(v, 6) for v in self.interval],
            "confidence": self.confidence,
        }


def sampled_neighbor_test(G: Group, x: int) -> bool:
    """Decide ``x`` in V(G) with one closure for non-isolated ``x``.

    A neighbour of the block representative is transported to ``x`` and
    checked directly; isolated ``x`` fall back to the exact block answer.
    """
    mask = non_isolated_mask(G)
    if not mask[x]:
        return False
    c = int(cyclic_reps(G)[x])
    cls = conjugacy_classes(G)
    r = int(cls.reps[cls.class_id[c]])
    t = int(cls.transporter[c])
    y0 = int(np.flatnonzero(generation_row(G, r))[0])
    y = G.conj(y0, t)
    if not generates(G, (x, y)):
        raise LemmaViolation(f"transported neighbour failed for {x} in {G.name}")
    return True


def monte_carlo_v(G: Group, samples: int, seed: int = 0, confidence: float = 0.99,
                  chunk: int = 1000) -> tuple[int, tuple[float, float]]:
    """Sampled count of non-isolated elements and its Wilson interval.

    Samples are drawn per fixed-size chunk from spawned seeds, so the
    result does not depend on how chunks are scheduled.
    """
    seeds = np.random.SeedSequence(seed).spawn(-(-samples // chunk))
    hits = 0
    for k, ss in enumerate(seeds):
        size = min(chunk, samples - k * chunk)
        xs = np.random.default_rng(ss).integers(0, G.order, size=size)
        hits += sum(sampled_neighbor_test(G, int(x)) for x in xs)
    ci = binomtest(hits, samples).proportion_ci(confidence_level=confidence, method="wilson")
    return hits, (float(ci.low), float(ci.high))


def measure_v(tower: TowerSpec, k: int, samples: int | None = None, seed: int = 0,
              confidence: float = 0.99) -> DensityReport:
    """|V| at level ``k``: brute force up to order 5000, the closed form on
    klein-cp3 levels, Monte Carlo otherwise.  ``samples`` adds a sampled
    cross-check to an exact method."""
    lev = tower.levels[k]
    predicted = predicted_density(lev.params) if tower.family == "klein-cp3" else None
    G = lev.group
    if G is None and tower.family != "klein-cp3":
        raise PreconditionError(f"level {k} of {tower.family} is not materialised")
    if G is not None and G.order <= 5000:
        rep = DensityReport(k, G.order, "brute-force", int(non_isolated_mask(G).sum()), predicted)
    elif tower.family == "klein-cp3":
        count = int(characterization_mask(G).sum()) if G is not None else characterization_count(lev.params)
        rep = DensityReport(k, lev.order, "characterization", count, predicted)
    else:
        samples = samples or 100_000
        rep = DensityReport(k, G.order, "monte-carlo", None, predicted)
    if samples and G is not None:
        hits, ci = monte_carlo_v(G, samples, seed, confidence)
        rep.samples, rep.hits, rep.seed, rep.interval, rep.confidence = samples, hits, seed, ci, confidence
    return rep


# -- consistency across levels --------------------------------------------------------------


@dataclass
class ConsistencyReport:
    top: int
    bottom: int
    checked: int
    image_violations: list[int]  # x in V(top) with image isolated
    fiber_violations: list[int]  # isolated z below whose fibre meets V(top)
    converse_gaps: int  # x isolated although its image is not (allowed in finite groups)

    @property
    def ok(self) -> bool:
        return not self.image_violations and not self.fiber_violations

    def to_json(self) -> dict:
        return {
            "top": self.top,
            "bottom": self.bottom,
            "checked": self.checked,
            "image_violations": self.image_violations[:20],
            "fiber_violations": self.fiber_violations[:20],
            "converse_gaps": self.converse_gaps,
            "ok": self.ok,
        }


def v_consistency(tower: TowerSpec, top: int | None = None, bottom: int = 0,
                  elements: Sequence[int] | None = None) -> ConsistencyReport:
    """Images of non-isolated elements stay non-isolated; fibres over isolated
    elements are entirely isolated.  Exhaustive unless ``elements`` is given."""
    top = len(tower.levels) - 1 if top is None else top
    G, L = tower.levels[top].group, tower.levels[bottom].group
    if G is None or L is None:
        raise PreconditionError("both levels must be materialised")
    f = np.arange(G.order)
    for k in range(top - 1, bottom - 1, -1):
        f = tower.maps[k][f]
    return _consistency(G, L, f, elements, top, bottom)


def quotient_consistency(G: Group, N: Subgroup, elements: Sequence[int] | None = None,
                         level: int = 0) -> ConsistencyReport:
    """The same checks for the projection ``G -> G/N`` (reported with ``bottom = -1``)."""
    qt = quotient(G, N)
    return _consistency(G, qt.group, qt.proj, elements, level, -1)


def klein_base(G: Group) -> Subgroup:
    """The elementary abelian kernel of ``KleinCp3(...) -> C2 x C2``."""
    return subgroup_from_mask(G, np.arange(G.order) % 4 == 0, normal=True)


def _consistency(G: Group, L: Group, f: np.ndarray, elements, top: int, bottom: int) -> ConsistencyReport:
    Vt, Vb = non_isolated_mask(G), non_isolated_mask(L)
    xs = np.arange(G.order) if elements is None else np.asarray(elements, dtype=np.int64)
    image_bad = xs[Vt[xs] & ~Vb[f[xs]]].tolist()
    fiber_bad = []
    for z in np.unique(f[xs]):
        if Vb[z]:
            continue
        fibre = np.flatnonzero(f == z)
        if Vt[fibre].any():
            fiber_bad.append(int(z))
    gaps = int((~Vt[xs] & Vb[f[xs]]).sum())
    return ConsistencyReport(top, bottom, len(xs), image_bad, fiber_bad, gaps)


# -- delta_p ----------------------------------------------------------------------------------


@dataclass
class DeltaReport:
    p: int
    order: int
    pairs: int
    automorphisms: int
    free: bool
    classes: int
    witness: tuple[tuple[int, ...], tuple[int, ...]] = field(repr=False, default=((), ()))
    witness_adjacent: bool = False

    @property
    def delta(self) -> int:
        return self.classes

    @property
    def integral(self) -> bool:
        return self.pairs % self.automorphisms == 0

    @property
    def ok(self) -> bool:
        return self.free and self.integral and self.classes * self.automorphisms == self.pairs and self.witness_adjacent

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "base_order": self.order,
            "generating_pairs": self.pairs,
            "automorphisms": self.automorphisms,
            "free_action": self.free,
            "integral": self.integral,
            "delta": self.delta,
            "witness_adjacent": self.witness_adjacent,
            "next_power_certificate": f"S^{self.delta + 1} needs {self.delta + 1} pairwise inequivalent "
                                      f"generating pairs; only {self.classes} classes exist",
        }


_DELTA_CACHE: dict[int, DeltaReport] = {}


def delta_p(p: int) -> DeltaReport:
    """Number of Aut-orbits of ordered generating pairs of ``SL(2, 2^p)``."""
    if p not in (2, 3):
        raise UnsupportedGroup("delta_p supports p in {2, 3}")
    if p in _DELTA_CACHE:
        return _DELTA_CACHE[p]
    S = build_group(GroupSpec("SL2", (2**p,)))
    xs, ys = generating_pairs(S)
    A = automorphisms(S)
    stab = pair_stabilizer_sizes(S, xs, ys)
    ids = pair_class_ids(S, xs, ys)
    uniq, first = np.unique(ids, return_index=True)
    wx = tuple(int(v) for v in xs[first])
    wy = tuple(int(v) for v in ys[first])
    rep = DeltaReport(
        p, S.order, len(xs), len(A), bool((stab == 1).all()), len(uniq), (wx, wy),
        power_adjacent(S, len(uniq), wx, wy),
    )
    _DELTA_CACHE[p] = rep
    return rep


def random_power_tuples_fail(p: int, extra: int = 1, samples: int = 100_000, seed: int = 0) -> int:
    """Draw tuples of generating pairs for ``S^(delta+extra)``; return how many were adjacent."""
    S = build_group(GroupSpec("SL2", (2**p,)))
    d = delta_p(p).delta + extra
    xs, ys = generating_pairs(S)
    ids = pair_class_ids(S, xs, ys)
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(xs), size=(samples, d))
    # adjacency needs d distinct classes; count rows achieving that
    cls = np.sort(ids[picks], axis=1)
    distinct = (np.diff(cls, axis=1) != 0).all(axis=1)
    adjacent = 0
    for row in np.flatnonzero(distinct):
        adjacent += power_adjacent(S, d, xs[picks[row]], ys[picks[row]])
    return adjacent


# -- degree growth -----------------------------------------------------------------------------


@dataclass
class GrowthReport:
    levels: list[int]
    degrees: list[int]
    t: list[int]
    bounds: list[int]
    lifted: list[int | None]  # lower bound at level k from lifting level k-1 neighbours

    @property
    def monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.degrees, self.degrees[1:]))

    @property
    def bounds_respected(self) -> bool:
        lifted_ok = all(l is None or l <= d for l, d in zip(self.lifted, self.degrees))
        return lifted_ok and all(d >= b for d, b in zip(self.degrees, self.bounds))

    def to_json(self) -> dict:
        return {
            "levels": self.levels,
            "degrees": self.degrees,
            "t": self.t,
            "bounds": self.bounds,
            "lifted_lower_bounds": self.lifted,
            "monotone": self.monotone,
            "bounds_respected": self.bounds_respected,
        }


def degree_growth(tower: TowerSpec, g_top: int, top: int | None = None) -> GrowthReport:
    """Degrees of the images of ``g_top`` down the tower, with lifted lower bounds.

    Each neighbour ``y`` of ``g_k`` lifts to a neighbour of ``g_{k+1}`` inside
    the fibre over ``y`` (a Gaschutz lift), so degrees never drop.
    """
    top = len(tower.levels) - 1 if top is None else top
    seq = [int(g_top)]
    for k in range(top - 1, -1, -1):
        seq.append(int(tower.maps[k][seq[-1]]))
    seq.reverse()
    degs, ts, bounds, lifted = [], [], [], []
    for k in range(top + 1):
        G = tower.levels[k].group
        g = seq[k]
        if not non_isolated_mask(G)[g]:
            raise PreconditionError(f"element is isolated at level {k}")
        degs.append(int(generation_row(G, g).sum()))
        t = chief_series(G).t
        ts.append(t)
        bounds.append(max(1, 2 ** (t - 2)) if t >= 2 else 1)
        if k == 0:
            lifted.append(None)
            continue
        lower = tower.levels[k - 1].group
        f = tower.maps[k - 1]
        M = tower.kernel(k - 1)
        found = set()
        for y in np.flatnonzero(generation_row(lower, seq[k - 1])):
            x = int(np.flatnonzero(f == y)[0])
            m = gaschutz_lift(G, M, g, x)
            found.add(G.mul(x, m))
        lifted.append(len(found))
    return GrowthReport(list(range(top + 1)), degs, ts, bounds, lifted)


# -- reports ---------------------------------------------------------------------------------


def tower_report(tower: TowerSpec, samples: int | None = None, seed: int = 0) -> dict:
    levels = []
    for k, lev in enumerate(tower.levels):
        entry: dict = {"level": k, "params": list(lev.params)}
        if lev.descriptor is not None:
            entry["descriptor"] = lev.descriptor
            entry["t"] = sum(f["delta"] for f in lev.descriptor["factors"])
            entry["bound"] = 2 ** (entry["t"] - 2) if entry["t"] >= 2 else 1
            levels.append(entry)
            continue
        entry["order"] = lev.order
        rep = measure_v(tower, k, samples=samples if lev.group is not None and lev.order > 5000 else None,
                        seed=seed)
        entry.update(
            v_count=rep.count,
            v_method=rep.method,
            density=None if rep.density is None else str(rep.density),
            predicted_density=None if rep.predicted is None else str(rep.predicted),
            matches_prediction=rep.matches_prediction,
        )
        if rep.samples:
            entry["monte_carlo"] = {"samples": rep.samples, "hits": rep.hits, "seed": rep.seed,
                                    "wilson_interval": [round(v, 6) for v in rep.interval]}
        if lev.group is not None:
            G = lev.group
            t = chief_series(G).t
            V = non_isolated_mask(G)
            entry["t"] = t
            entry["bound"] = max(1, 2 ** (t - 2)) if t >= 2 else 1
            entry["min_degree"] = int(degrees(G)[V].min()) if V.any() else None
        levels.append(entry)
    return {"family": tower.family, "levels": levels}


def tower_report_csv(report: dict) -> str:
    cols = ["level", "params", "order", "v_count", "density", "predicted_density", "t", "min_degree", "bound"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for lev in report["levels"]:
        row = []
        for c in cols:
            v = lev.get(c)
            row.append(" ".join(map(str, v)) if isinstance(v, list) else ("" if v is None else v))
        w.writerow(row)
    return buf.getvalue()


def tower_report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True)
