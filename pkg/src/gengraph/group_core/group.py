"""Finite groups on the index set ``0..order-1`` with ``0`` the identity.

Small groups carry a full Cayley table; larger ones supply a vectorised
multiplication and compute rows or columns of the table on demand.
"""
from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from ..caps import check_cap, get_caps
from ..errors import GenGraphError

MulVec = Callable[[np.ndarray, np.ndarray], np.ndarray]


def index_dtype(n: int):
    return np.uint16 if n <= np.iinfo(np.uint16).max else np.int32


class Group:
    """A finite group with elements ``0..order-1``.

    Exactly one of ``table`` (an ``order x order`` array with
    ``table[a, b] = a*b``) or ``mul_vec`` (elementwise product of two
    index arrays) must be given.
    """

    def __init__(
        self,
        labels: Sequence[str],
        *,
        table: np.ndarray | None = None,
        mul_vec: MulVec | None = None,
        inverse: np.ndarray | None = None,
        spec=None,
        gens: Sequence[int] | None = None,
        name: str | None = None,
    ):
        self.order = len(labels)
        check_cap("order", self.order, "group construction")
        if (table is None) == (mul_vec is None):
            raise ValueError("give exactly one of table / mul_vec")
        self.labels = list(labels)
        self.spec = spec
        self.name = name or (str(spec) if spec is not None else f"G{self.order}")
        self._table = None
        if table is not None:
            self._table = np.ascontiguousarray(table, dtype=index_dtype(self.order))
        elif self.order <= get_caps().table:
            self._table = self._build_table(mul_vec)
        self._mul_vec = mul_vec
        self._inv = None if inverse is None else np.asarray(inverse, dtype=np.int64)
        self._gens = tuple(int(g) for g in gens) if gens is not None else None
        self._cols: OrderedDict[int, np.ndarray] = OrderedDict()
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()
        self._orders = None
        self.cache: dict = {}  # per-group memo used by the analysis layers

    def _build_table(self, mul_vec: MulVec) -> np.ndarray:
        n = self.order
        all_ = np.arange(n, dtype=np.int64)
        table = np.empty((n, n), dtype=index_dtype(n))
        for a in range(n):
            table[a] = mul_vec(np.full(n, a, dtype=np.int64), all_)
        return table

    def __repr__(self) -> str:
        return f"Group({self.name}, order={self.order})"

    def __len__(self) -> int:
        return self.order

    @property
    def has_table(self) -> bool:
        return self._table is not None

    @property
    def elements(self) -> range:
        return range(self.order)

    # -- arithmetic ---------------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        if self._table is not None:
            return int(self._table[a, b])
        return int(self._mul_vec(np.array([a]), np.array([b]))[0])

    def mul_vec(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._table is not None:
            return self._table[a, b].astype(np.int64)
        a, b = np.broadcast_arrays(a, b)
        return self._mul_vec(a.ravel(), b.ravel()).reshape(a.shape)

    def _cached(self, cache: OrderedDict, key: int, make) -> np.ndarray:
        hit = cache.get(key)
        if hit is not None:
            cache.move_to_end(key)
            return hit
        val = make()
        val.flags.writeable = False
        cache[key] = val
        if len(cache) > max(64, 2_000_000 // max(self.order, 1)):
            cache.popitem(last=False)
        return val

    def col(self, s: int) -> np.ndarray:
        """Right multiplication by ``s``: the array ``i -> i*s``."""
        s = int(s)
        if self._table is not None:
            return self._cached(self._cols, s, lambda: self._table[:, s].astype(np.int64))
        return self._cached(
            self._cols, s, lambda: self._mul_vec(np.arange(self.order), np.full(self.order, s))
        )

    def row(self, s: int) -> np.ndarray:
        """Left multiplication by ``s``: the array ``i -> s*i``."""
        s = int(s)
        if self._table is not None:
            return self._cached(self._rows, s, lambda: self._table[s].astype(np.int64))
        return self._cached(
            self._rows, s, lambda: self._mul_vec(np.full(self.order, s), np.arange(self.order))
        )

    @property
    def inverse(self) -> np.ndarray:
        if self._inv is None:
            if self._table is not None:
                self._inv = np.argmax(self._table == 0, axis=1).astype(np.int64)
            else:
                inv = np.full(self.order, -1, dtype=np.int64)
                for a in range(self.order):
                    if inv[a] < 0:
                        b = int(np.flatnonzero(self.row(a) == 0)[0])
                        inv[a], inv[b] = b, a
                self._inv = inv
        return self._inv

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def power(self, a: int, k: int) -> int:
        k %= self.element_orders[a]
        r, base = 0, int(a)
        while k:
            if k & 1:
                r = self.mul(r, base)
            base = self.mul(base, base)
            k >>= 1
        return r

    def conj_perm(self, g: int) -> np.ndarray:
        """The permutation ``i -> g^-1 i g``."""
        key = ("conj", int(g))
        hit = self.cache.get(key)
        if hit is None:
            hit = self.col(g)[self.row(self.inv(g))]
            hit.flags.writeable = False
            if len(self.cache) < 50_000:
                self.cache[key] = hit
        return hit

    def conj(self, x: int, g: int) -> int:
        return self.mul(self.mul(self.inv(g), x), g)

    def commutes(self, x: int) -> np.ndarray:
        """Boolean mask of the centraliser of ``x``."""
        return self.row(x) == self.col(x)

    @property
    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            n = self.order
            orders = np.zeros(n, dtype=np.int64)
            orders[0] = 1
            all_ = np.arange(n)
            pw = all_.copy()
            k = 1
            while (orders == 0).any():
                k += 1
                pw = self.mul_vec(pw, all_)
                hit = (pw == 0) & (orders == 0)
                orders[hit] = k
                if k > n:  # pragma: no cover - impossible for a group
                    raise GenGraphError("element order exceeds group order")
            self._orders = orders
        return self._orders

    @property
    def exponent(self) -> int:
        return math.lcm(*map(int, np.unique(self.element_orders)))

    # -- generators ---------------------------------------------------------

    @property
    def gens(self) -> tuple[int, ...]:
        """A generating set: the constructor's, or a greedy one."""
        if self._gens is None:
            self._gens = greedy_generators(self, range(self.order))
        return self._gens

    def is_abelian(self) -> bool:
        return all((self.row(g) == self.col(g)).all() for g in self.gens)

    # -- checks -------------------------------------------------------------

    def verify_axioms(self, samples: int = 100_000, seed: int = 0, exhaustive_limit: int = 200) -> None:
        n = self.order
        all_ = np.arange(n)
        if not (self.row(0) == all_).all() or not (self.col(0) == all_).all():
            raise GenGraphError(f"{self.name}: index 0 is not the identity")
        if not (self.mul_vec(all_, self.inverse) == 0).all():
            raise GenGraphError(f"{self.name}: inverse table is wrong")
        if n <= exhaustive_limit:
            a, b, c = np.meshgrid(all_, all_, all_, indexing="ij")
            a, b, c = a.ravel(), b.ravel(), c.ravel()
        else:
            rng = np.random.default_rng(seed)
            a, b, c = rng.integers(0, n, size=(3, samples))
        lhs = self.mul_vec(self.mul_vec(a, b), c)
        rhs = self.mul_vec(a, self.mul_vec(b, c))
        if not (lhs == rhs).all():
            raise GenGraphError(f"{self.name}: multiplication is not associative")
        # a Latin-square check catches non-bijective rows cheaply
        for s in list(self.gens)[:8]:
            if len(np.unique(self.row(s))) != n:
                raise GenGraphError(f"{self.name}: row {s} is not a permutation")

    def to_json(self) -> dict:
        return {
            "spec": str(self.spec) if self.spec is not None else self.name,
            "order": self.order,
            "element_labels": list(self.labels),
        }


@dataclass(eq=False)
class Subgroup:
    """A subgroup of ``group`` stored as a boolean membership mask."""

    group: Group = field(repr=False)
    mask: np.ndarray = field(repr=False)
    gens: tuple[int, ...] = ()
    is_maximal: bool | None = None
    _normal: bool | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return int(self.mask.sum())

    @property
    def members(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def key(self) -> bytes:
        return np.packbits(self.mask).tobytes()

    @property
    def is_normal(self) -> bool:
        if self._normal is None:
            G = self.group
            gens = self.gens or tuple(int(x) for x in self.members)
            self._normal = all(
                self.mask[G.conj_perm(g)[list(gens)]].all() for g in G.gens
            )
        return self._normal

    @property
    def is_whole(self) -> bool:
        return self.order == self.group.order

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def __contains__(self, x: int) -> bool:
        return bool(self.mask[x])

    def __le__(self, other: "Subgroup") -> bool:
        return bool((~self.mask | other.mask).all())

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and other.group is self.group and bool(
            (self.mask == other.mask).all()
        )

    def __hash__(self) -> int:
        return hash(self.key)

    def sort_key(self):
        return (self.order, tuple(self.members.tolist()))

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, gens={self.gens})"


def closure_mask(G: Group, gens: Iterable[int], start: np.ndarray | None = None,
                 stop_at_half: bool = False) -> np.ndarray:
    """Membership mask of the subgroup generated by ``gens``.

    ``start`` may hold a mask already known to lie inside the answer; the
    generators of that subgroup must also be listed in ``gens``.  With
    ``stop_at_half`` the search ends as soon as more than half the group is
    reached and the whole group is returned, since no proper subgroup is
    that large.
    """
    n = G.order
    gens = sorted({int(g) for g in gens} - {0})
    mask = np.zeros(n, dtype=bool) if start is None else start.copy()
    mask[0] = True
    if not gens:
        return mask
    cols = [G.col(g) for g in gens]
    frontier = np.flatnonzero(mask)
    count = len(frontier)
    half = n // 2
    while frontier.size:
        nxt = np.concatenate([c[frontier] for c in cols])
        nxt = nxt[~mask[nxt]]
        if not nxt.size:
            break
        nxt = np.unique(nxt)
        mask[nxt] = True
        count += nxt.size
        if stop_at_half and count > half:
            return np.ones(n, dtype=bool)
        frontier = nxt
    return mask


def generates(G: Group, gens: Iterable[int]) -> bool:
    return bool(closure_mask(G, gens, stop_at_half=True).all())


def greedy_generators(G: Group, candidates: Iterable[int]) -> tuple[int, ...]:
    """Pick elements of largest order first until they generate ``G``."""
    orders = G.element_orders
    cand = sorted((int(c) for c in candidates), key=lambda c: (-orders[c], c))
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    gens: list[int] = []
    for c in cand:
        if mask.all():
            break
        if not mask[c]:
            gens.append(c)
            mask = closure_mask(G, gens)
    return tuple(gens)
