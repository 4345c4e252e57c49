"""Text grammar for group constructor expressions.

    spec   := NAME "(" args ")"
    args   := arg ("," arg)*
    arg    := INT | spec

Recognised constructors: ``Sym(n)``, ``Alt(n)``, ``Cyc(n)``, ``Dih(n)``,
``SL2(q)`` with ``q`` a power of two, ``Dir(A,B)``, ``Pow(A,k)`` and
``KleinCp3(p1,...,ps)`` for distinct odd primes.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from ..errors import SpecError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|(.))")

Arg = Union[int, "GroupSpec"]


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.kind}({','.join(str(a) for a in self.args)})"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _tokens(text: str):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # pragma: no cover - the catch-all group always matches
            raise SpecError(f"cannot tokenize {text!r}")
        num, name, sym = m.groups()
        if num is not None:
            out.append(("int", int(num)))
        elif name is not None:
            out.append(("name", name))
        elif sym.strip():
            out.append(("sym", sym))
        pos = m.end()
    return out


def parse_spec(text: str) -> GroupSpec:
    if isinstance(text, GroupSpec):
        return text
    toks = _tokens(text)
    spec, pos = _parse(toks, 0, text)
    if pos != len(toks):
        raise SpecError(f"trailing input in {text!r}")
    validate_spec(spec)
    return spec


def _parse(toks, pos, text):
    if pos >= len(toks) or toks[pos][0] != "name":
        raise SpecError(f"expected constructor name in {text!r}")
    kind = toks[pos][1]
    pos += 1
    if pos >= len(toks) or toks[pos] != ("sym", "("):
        raise SpecError(f"expected '(' after {kind} in {text!r}")
    pos += 1
    args: list[Arg] = []
    while True:
        if pos >= len(toks):
            raise SpecError(f"unterminated argument list in {text!r}")
        tok = toks[pos]
        if tok[0] == "int":
            args.append(tok[1])
            pos += 1
        elif tok[0] == "name":
            sub, pos = _parse(toks, pos, text)
            args.append(sub)
        else:
            raise SpecError(f"unexpected {tok[1]!r} in {text!r}")
        if pos >= len(toks):
            raise SpecError(f"unterminated argument list in {text!r}")
        if toks[pos] == ("sym", ","):
            pos += 1
            continue
        if toks[pos] == ("sym", ")"):
            return GroupSpec(kind, tuple(args)), pos + 1
        raise SpecError(f"unexpected {toks[pos][1]!r} in {text!r}")


_INT_KINDS = {"Sym": 1, "Alt": 1, "Cyc": 1, "Dih": 1, "SL2": 1}


def validate_spec(spec: GroupSpec) -> None:
    k, a = spec.kind, spec.args
    if k in _INT_KINDS:
        if len(a) != 1 or not isinstance(a[0], int):
            raise SpecError(f"{k} takes one integer argument")
        n = a[0]
        if k in ("Sym", "Alt", "Cyc") and n < 1:
            raise SpecError(f"{k}({n}): degree must be positive")
        if k == "Dih" and n < 2:
            raise SpecError(f"Dih({n}): need n >= 2")
        if k == "SL2" and (n < 2 or n & (n - 1)):
            raise SpecError(f"SL2({n}): field size must be a power of 2")
    elif k == "Dir":
        if len(a) != 2 or not all(isinstance(x, GroupSpec) for x in a):
            raise SpecError("Dir takes two group arguments")
        for x in a:
            validate_spec(x)
    elif k == "Pow":
        if len(a) != 2 or not isinstance(a[0], GroupSpec) or not isinstance(a[1], int) or a[1] < 1:
            raise SpecError("Pow takes a group and a positive integer")
        validate_spec(a[0])
    elif k == "KleinCp3":
        if not a or not all(isinstance(x, int) for x in a):
            raise SpecError("KleinCp3 takes one or more primes")
        if len(set(a)) != len(a):
            raise SpecError("KleinCp3 primes must be distinct")
        for p in a:
            if p == 2 or not _is_prime(p):
                raise SpecError(f"KleinCp3: {p} is not an odd prime")
    else:
        raise SpecError(f"unknown constructor {k!r}")


def spec_order(spec: GroupSpec) -> int:
    """Order of the group a spec describes, without building it."""
    from math import factorial, prod

    k, a = spec.kind, spec.args
    if k == "Sym":
        return factorial(a[0])
    if k == "Alt":
        return max(1, factorial(a[0]) // 2)
    if k == "Cyc":
        return a[0]
    if k == "Dih":
        return 2 * a[0]
    if k == "SL2":
        q = a[0]
        return q * (q * q - 1)
    if k == "Dir":
        return spec_order(a[0]) * spec_order(a[1])
    if k == "Pow":
        return spec_order(a[0]) ** a[1]
    if k == "KleinCp3":
        return 4 * prod(p**3 for p in a)
    raise SpecError(f"unknown constructor {k!r}")
