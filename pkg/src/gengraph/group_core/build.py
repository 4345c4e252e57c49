"""Constructors turning a :class:`GroupSpec` into a :class:`Group`."""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from ..caps import check_cap
from ..errors import SpecError
from .gf2 import field_tables
from .group import Group, index_dtype
from .spec import GroupSpec, parse_spec, spec_order


def build_group(spec: GroupSpec | str, verify: bool = True) -> Group:
    """Build the group described by ``spec`` and check the group axioms."""
    spec = parse_spec(spec) if isinstance(spec, str) else spec
    check_cap("order", spec_order(spec), f"building {spec}")
    G = _BUILDERS[spec.kind](spec)
    G.spec = spec
    G.name = str(spec)
    if verify:
        G.verify_axioms()
    return G


@lru_cache(maxsize=64)
def cached_group(spec_text: str) -> Group:
    """Build once per process; groups are immutable after construction."""
    return build_group(spec_text)


# -- permutation groups ------------------------------------------------------


def cycle_label(perm) -> str:
    n = len(perm)
    seen = [False] * n
    parts = []
    sep = "" if n <= 9 else ","
    for i in range(n):
        if seen[i] or perm[i] == i:
            seen[i] = True
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j + 1)
            j = perm[j]
        parts.append("(" + sep.join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


def _perm_group(perms: np.ndarray, gens_perms=None) -> Group:
    """Group on the rows of ``perms`` (lexicographically sorted, identity first).

    Products compose left to right: ``(a*b)(i) = b(a(i))``.
    """
    n_el, deg = perms.shape
    weights = deg ** np.arange(deg - 1, -1, -1, dtype=np.int64)
    keys = perms @ weights
    order = np.argsort(keys, kind="stable")
    perms, keys = perms[order], keys[order]

    def lookup(rows: np.ndarray) -> np.ndarray:
        k = rows @ weights
        idx = np.searchsorted(keys, k)
        return idx

    table = np.empty((n_el, n_el), dtype=index_dtype(n_el))
    for a in range(n_el):
        # b(a(i)) for every b at once
        table[a] = lookup(perms[:, perms[a]])
    gens = None
    if gens_perms is not None:
        gens = [int(lookup(np.array([g]))[0]) for g in gens_perms]
    G = Group([cycle_label(p) for p in perms], table=table, gens=gens)
    G.cache["perms"] = perms
    return G


def _sym(spec: GroupSpec) -> Group:
    n = spec.args[0]
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    gens = None
    if n >= 2:
        t = list(range(n))
        t[0], t[1] = 1, 0
        c = list(range(1, n)) + [0]
        gens = [t, c] if n > 2 else [t]
    return _perm_group(perms, gens)


def _parity(perm) -> int:
    perm = list(perm)
    sign = 0
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign ^= 1
    return sign


def _alt(spec: GroupSpec) -> Group:
    n = spec.args[0]
    perms = [p for p in itertools.permutations(range(n)) if _parity(p) == 0]
    return _perm_group(np.array(perms, dtype=np.int64).reshape(-1, n))


# -- cyclic and dihedral -------------------------------------------------------


def _cyc(spec: GroupSpec) -> Group:
    n = spec.args[0]
    a = np.arange(n)
    table = (a[:, None] + a[None, :]) % n
    labels = ["e"] + [f"a^{k}" if k > 1 else "a" for k in range(1, n)]
    return Group(labels, table=table, gens=[1] if n > 1 else [])


def _dih(spec: GroupSpec) -> Group:
    """Dihedral group of order 2n; index ``i + n*j`` stands for ``r^i s^j``."""
    n = spec.args[0]
    idx = np.arange(2 * n)
    i, j = idx % n, idx // n
    ia, ib = i[:, None], i[None, :]
    ja, jb = j[:, None], j[None, :]
    rot = (ia + np.where(ja == 1, -ib, ib)) % n
    table = rot + n * ((ja + jb) % 2)

    def lab(i, j):
        r = "" if i == 0 else ("r" if i == 1 else f"r^{i}")
        s = "s" if j else ""
        return (r + s) or "e"

    labels = [lab(int(a), int(b)) for a, b in zip(i, j)]
    return Group(labels, table=table, gens=[1, n])


# -- SL(2, 2^p) ----------------------------------------------------------------


def _sl2(spec: GroupSpec) -> Group:
    q = spec.args[0]
    p = q.bit_length() - 1
    mul, inv = field_tables(p)
    entries = []
    for a, b, c, d in itertools.product(range(q), repeat=4):
        if mul[a, d] ^ mul[b, c] == 1:
            entries.append((a, b, c, d))
    ident = (1, 0, 0, 1)
    entries.remove(ident)
    entries = [ident] + entries
    M = np.array(entries, dtype=np.int64)
    n = len(M)
    key = ((M[:, 0] * q + M[:, 1]) * q + M[:, 2]) * q + M[:, 3]
    lookup = np.full(q**4, -1, dtype=np.int64)
    lookup[key] = np.arange(n)

    def mul_vec(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        A, B = M[x], M[y]
        r0 = mul[A[:, 0], B[:, 0]] ^ mul[A[:, 1], B[:, 2]]
        r1 = mul[A[:, 0], B[:, 1]] ^ mul[A[:, 1], B[:, 3]]
        r2 = mul[A[:, 2], B[:, 0]] ^ mul[A[:, 3], B[:, 2]]
        r3 = mul[A[:, 2], B[:, 1]] ^ mul[A[:, 3], B[:, 3]]
        return lookup[((r0 * q + r1) * q + r2) * q + r3]

    labels = [f"[[{a},{b}],[{c},{d}]]" for a, b, c, d in entries]
    # the inverse of [[a,b],[c,d]] with det 1 in characteristic 2 is [[d,b],[c,a]]
    inverse = lookup[((M[:, 3] * q + M[:, 1]) * q + M[:, 2]) * q + M[:, 0]]
    G = Group(labels, mul_vec=mul_vec, inverse=inverse)
    G.cache["matrices"] = M
    G.cache["matrix_lookup"] = lookup
    G.cache["field_exponent"] = p
    return G


# -- products ------------------------------------------------------------------


def direct_product(A: Group, B: Group) -> Group:
    """Index ``a*|B| + b`` stands for the pair ``(a, b)``."""
    na, nb = A.order, B.order
    n = na * nb
    check_cap("order", n, "direct product")

    def mul_vec(x, y):
        return A.mul_vec(x // nb, y // nb) * nb + B.mul_vec(x % nb, y % nb)

    labels = [f"({la},{lb})" for la in A.labels for lb in B.labels]
    gens = [g * nb for g in A.gens] + list(B.gens)
    inverse = (A.inverse[:, None] * nb + B.inverse[None, :]).ravel()
    return Group(labels, mul_vec=mul_vec, inverse=inverse, gens=gens)


def _dir(spec: GroupSpec) -> Group:
    return direct_product(build_group(spec.args[0], verify=False), build_group(spec.args[1], verify=False))


def _pow(spec: GroupSpec) -> Group:
    base = build_group(spec.args[0], verify=False)
    G = base
    for _ in range(spec.args[1] - 1):
        G = direct_product(G, base)
    return G


# -- the prosoluble example, truncated to finitely many primes -------------------

# h_0 = 1, h_1, h_2, h_3 as 2-bit vectors; the product is XOR.
# SIGNS[h][j] is the exponent (+1/-1) applied to coordinate j by h.
KLEIN_SIGNS = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=np.int64)


def _klein(spec: GroupSpec) -> Group:
    primes = tuple(spec.args)
    mods = np.repeat(np.array(primes, dtype=np.int64), 3)
    radix = np.concatenate([[1], np.cumprod(mods)[:-1]])
    ncode = int(np.prod(mods))
    n = 4 * ncode

    all_codes = np.arange(ncode)
    E_all = (all_codes[:, None] // radix[None, :]) % mods[None, :]
    signs_all = np.tile(KLEIN_SIGNS, len(primes))  # indexed by h

    def decode(x):
        return E_all[x // 4], x % 4

    def encode(E, h):
        return 4 * (E @ radix) + h

    def mul_vec(x, y):
        hx = x % 4
        E = (E_all[x // 4] + signs_all[hx] * E_all[y // 4]) % mods
        return 4 * (E @ radix) + (hx ^ (y % 4))

    def label(x: int) -> str:
        E, h = decode(np.array([x]))
        parts = [
            f"({','.join(str(int(v)) for v in E[0, 3 * k:3 * k + 3])})_{p}"
            for k, p in enumerate(primes)
        ]
        return "(" + ",".join(parts) + f";h{int(h[0])})"

    labels = [label(x) for x in range(n)]
    all_ = np.arange(n)
    E, h = decode(all_)
    signs = signs_all[h]
    # (n; h)^-1 = (-sigma_h(n); h) because h is an involution
    inverse = encode((-signs * E) % mods, h)
    G = Group(labels, mul_vec=mul_vec, inverse=inverse)
    G.cache["klein"] = {"primes": primes, "decode": decode, "encode": encode}
    return G


_BUILDERS = {
    "Sym": _sym,
    "Alt": _alt,
    "Cyc": _cyc,
    "Dih": _dih,
    "SL2": _sl2,
    "Dir": _dir,
    "Pow": _pow,
    "KleinCp3": _klein,
}


def klein_coordinates(G: Group, x: int) -> tuple[dict[int, tuple[int, int, int]], int]:
    """Split a KleinCp3 element into its per-prime exponent triples and H-index."""
    info = G.cache.get("klein")
    if info is None:
        raise SpecError(f"{G.name} is not a KleinCp3 group")
    E, h = info["decode"](np.array([x]))
    coords = {
        p: tuple(int(v) for v in E[0, 3 * k:3 * k + 3]) for k, p in enumerate(info["primes"])
    }
    return coords, int(h[0])


def klein_element(G: Group, coords: dict[int, tuple[int, int, int]], h: int) -> int:
    info = G.cache["klein"]
    E = np.concatenate([np.asarray(coords.get(p, (0, 0, 0)), dtype=np.int64) for p in info["primes"]])
    return int(info["encode"](E[None, :], np.array([h]))[0])
