"""Elementary abelian normal subgroups viewed as F_p[G]-modules."""
from __future__ import annotations

import numpy as np

from ..errors import PreconditionError
from .group import Group, Subgroup, closure_mask


def rank_mod_p(A: np.ndarray, p: int) -> int:
    A = np.array(A, dtype=np.int64) % p
    rows, cols = A.shape
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r, c]), None)
        if piv is None:
            continue
        A[[rank, piv]] = A[[piv, rank]]
        A[rank] = A[rank] * pow(int(A[rank, c]), -1, p) % p
        others = np.flatnonzero(A[:, c])
        others = others[others != rank]
        A[others] = (A[others] - np.outer(A[others, c], A[rank])) % p
        rank += 1
        if rank == rows:
            break
    return rank


def vector_space(G: Group, M: Subgroup) -> tuple[int, list[int], dict[int, tuple[int, ...]]]:
    """Basis and coordinates of an elementary abelian subgroup ``M``.

    Returns ``(p, basis, coords)`` where ``coords[x]`` lists the exponents
    of ``x`` in the basis.
    """
    members = M.members
    if len(members) == 1:
        raise PreconditionError("trivial subgroup has no prime")
    orders = G.element_orders[members[1:]]
    p = int(orders[0])
    if not (orders == p).all():
        raise PreconditionError("subgroup is not elementary abelian")
    basis: list[int] = []
    span = np.zeros(G.order, dtype=bool)
    span[0] = True
    for x in members:
        if not span[x]:
            basis.append(int(x))
            span = closure_mask(G, basis, start=span)
    coords: dict[int, tuple[int, ...]] = {0: (0,) * len(basis)}
    for j, b in enumerate(basis):
        new = {}
        for e, v in coords.items():
            y = e
            for k in range(1, p):
                y = G.mul(y, b)
                w = list(v)
                w[j] = k
                new[y] = tuple(w)
        coords.update(new)
    if len(coords) != M.order:
        raise PreconditionError("subgroup is not elementary abelian")
    return p, basis, coords


def action_matrices(G: Group, M: Subgroup, p: int, basis, coords) -> list[np.ndarray]:
    """Matrices of conjugation by each generator of ``G``; column j is the image of basis j."""
    mats = []
    for s in G.gens:
        cp = G.conj_perm(s)
        A = np.array([coords[int(cp[b])] for b in basis], dtype=np.int64).T
        mats.append(A % p)
    return mats


def endo_params(G: Group, M: Subgroup) -> tuple[int, int]:
    """``(q, r)`` with ``q = |End_G(M)|`` and ``q**r = |M|``.

    ``M`` must be an abelian minimal normal subgroup; ``End_G(M)`` is then a
    field (Schur) computed as the commutant of the conjugation action.
    """
    if not M.is_normal:
        raise PreconditionError("endo_params needs a normal subgroup")
    p, basis, coords = vector_space(G, M)
    d = len(basis)
    mats = action_matrices(G, M, p, basis, coords)
    if not is_irreducible(mats, p, d):
        raise PreconditionError("subgroup is not minimal normal")
    e = d * d - rank_mod_p(_commutant_system(mats, d), p) if mats else d * d
    if d % e:
        raise PreconditionError("endomorphism ring is not a field; module is reducible")
    return p**e, d // e


def _commutant_system(mats: list[np.ndarray], d: int) -> np.ndarray:
    # X A - A X = 0 with X flattened row-major: vec(XA) = (I kron A^T) x, vec(AX) = (A kron I) x
    eye = np.eye(d, dtype=np.int64)
    return np.vstack([np.kron(eye, A.T) - np.kron(A, eye) for A in mats])


def is_irreducible(mats: list[np.ndarray], p: int, d: int) -> bool:
    """Brute-force check that no proper nonzero subspace is invariant.

    Every nonzero vector's orbit span must be the whole space.
    """
    if d == 1:
        return True
    import itertools

    for v in itertools.product(range(p), repeat=d):
        if not any(v):
            continue
        span = [np.array(v, dtype=np.int64)]
        basis = np.array(span)
        grew = True
        while grew:
            grew = False
            for A in mats:
                for w in list(basis):
                    cand = np.vstack([basis, (A @ w) % p])
                    if rank_mod_p(cand, p) > rank_mod_p(basis, p):
                        basis = cand
                        grew = True
        if rank_mod_p(basis, p) < d:
            return False
    return True
