"""Automorphism groups of the supported simple groups, as element permutations.

``SL2(2^p)``: inner automorphisms composed with powers of the Frobenius map.
``Alt(n)`` for ``n != 6``: conjugation by ``Sym(n)``.
"""
from __future__ import annotations

import itertools

import numpy as np

from ..errors import UnsupportedGroup
from .gf2 import frobenius_table
from .group import Group


def automorphisms(G: Group) -> np.ndarray:
    """Array ``A`` of shape ``(|Aut G|, |G|)`` with ``A[k, x]`` the image of ``x``.

    Row 0 is the identity map; rows are distinct and sorted otherwise.
    """
    hit = G.cache.get("automorphisms")
    if hit is not None:
        return hit
    kind = G.spec.kind if G.spec is not None else None
    if kind == "SL2":
        A = _sl2_automorphisms(G)
    elif kind == "Alt" and G.spec.args[0] != 6:
        A = _alt_automorphisms(G)
    else:
        raise UnsupportedGroup(f"automorphisms of {G.name} are not supported (SL2 or Alt(n), n != 6)")
    A = np.unique(A, axis=0)
    ident = np.arange(G.order)
    is_id = (A == ident).all(axis=1)
    A = np.vstack([A[is_id], A[~is_id]])
    A.flags.writeable = False
    G.cache["automorphisms"] = A
    return A


def _inner(G: Group) -> np.ndarray:
    return np.array([G.conj_perm(g) for g in range(G.order)])


def _sl2_automorphisms(G: Group) -> np.ndarray:
    M = G.cache["matrices"]
    lookup = G.cache["matrix_lookup"]
    p = G.cache["field_exponent"]
    q = 2**p
    frob = frobenius_table(p)
    F = M.copy()
    maps = [np.arange(G.order)]
    for _ in range(p - 1):
        F = frob[F]
        maps.append(lookup[((F[:, 0] * q + F[:, 1]) * q + F[:, 2]) * q + F[:, 3]])
    inner = _inner(G)
    return np.vstack([f[inner] for f in maps])


def _alt_automorphisms(G: Group) -> np.ndarray:
    perms = G.cache["perms"]
    n_el, deg = perms.shape
    weights = deg ** np.arange(deg - 1, -1, -1, dtype=np.int64)
    keys = perms @ weights
    rows = []
    for s in itertools.permutations(range(deg)):
        s = np.array(s)
        sinv = np.argsort(s)
        # i -> s(pi(s^-1(i)))
        conj = s[perms[:, sinv]]
        rows.append(np.searchsorted(keys, conj @ weights))
    return np.array(rows)


def pair_codes(G: Group, x, y) -> np.ndarray:
    """Encode ordered pairs as ``x*|G| + y``."""
    return np.asarray(x, dtype=np.int64) * G.order + np.asarray(y, dtype=np.int64)


def pair_class_ids(G: Group, x, y, chunk: int = 4096) -> np.ndarray:
    """Canonical Aut-orbit code (the smallest image code) of each pair ``(x[i], y[i])``."""
    A = automorphisms(G)
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    out = np.empty(len(x), dtype=np.int64)
    for s in range(0, len(x), chunk):
        xs, ys = x[s:s + chunk], y[s:s + chunk]
        out[s:s + chunk] = (A[:, xs] * G.order + A[:, ys]).min(axis=0)
    return out


def pair_stabilizer_sizes(G: Group, x, y, chunk: int = 4096) -> np.ndarray:
    """Number of automorphisms fixing each pair (1 everywhere means a free action)."""
    A = automorphisms(G)
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    out = np.empty(len(x), dtype=np.int64)
    for s in range(0, len(x), chunk):
        xs, ys = x[s:s + chunk], y[s:s + chunk]
        out[s:s + chunk] = ((A[:, xs] == xs) & (A[:, ys] == ys)).sum(axis=0)
    return out


def pair_aut_equivalent(G: Group, pair1, pair2) -> bool:
    """True iff some automorphism maps ``pair1`` to ``pair2`` componentwise."""
    A = automorphisms(G)
    (x1, y1), (x2, y2) = pair1, pair2
    return bool(((A[:, x1] == x2) & (A[:, y1] == y2)).any())
