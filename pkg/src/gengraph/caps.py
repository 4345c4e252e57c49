"""Size caps, overridable through ``GENGRAPH_CAPS`` or :func:`set_caps`.

``GENGRAPH_CAPS`` holds comma separated ``key=value`` pairs, e.g.
``GENGRAPH_CAPS="order=30000,subgroups=2000"``.
"""
from __future__ import annotations

import dataclasses
import os
from contextlib import contextmanager

from .errors import CapExceeded, SpecError


@dataclasses.dataclass(frozen=True)
class Caps:
    order: int = 20_000  # largest group we build at all
    table: int = 5_000  # largest group stored as a full Cayley table
    subgroups: int = 5_000  # largest group for subgroup-lattice enumeration
    metrics: int = 50_000  # largest vertex domain for BFS metrics
    swap: int = 2_000  # largest group for swap-graph enumeration
    product_bfs: int = 100_000  # largest product graph searched exhaustively


_override: Caps | None = None


def parse_caps(text: str, base: Caps | None = None) -> Caps:
    base = base or Caps()
    fields = {f.name for f in dataclasses.fields(Caps)}
    updates = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in fields:
            raise SpecError(f"bad cap entry {part!r}")
        try:
            updates[key] = int(value)
        except ValueError:
            raise SpecError(f"cap {key} needs an integer, got {value!r}") from None
    return dataclasses.replace(base, **updates)


def get_caps() -> Caps:
    if _override is not None:
        return _override
    env = os.environ.get("GENGRAPH_CAPS")
    return parse_caps(env) if env else Caps()


def set_caps(caps: Caps | None) -> None:
    global _override
    _override = caps


@contextmanager
def caps_override(**kwargs):
    old = _override
    set_caps(dataclasses.replace(get_caps(), **kwargs))
    try:
        yield get_caps()
    finally:
        set_caps(old)


def check_cap(name: str, size: int, what: str) -> None:
    limit = getattr(get_caps(), name)
    if size > limit:
        raise CapExceeded(f"{what}: size {size} exceeds {name} cap {limit}")
