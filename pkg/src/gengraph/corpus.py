"""Built-in group corpora and corpus files (one spec per line, ``#`` comments)."""
from __future__ import annotations

from pathlib import Path

from .errors import SpecError
from .group_core.build import cached_group
from .group_core.lattice import d_rel, is_soluble
from .group_core.spec import parse_spec

BUILTIN: tuple[str, ...] = (
    *(f"Sym({n})" for n in range(3, 6)),
    "Alt(4)",
    "Alt(5)",
    *(f"Dih({n})" for n in range(3, 9)),
    *(f"Cyc({n})" for n in range(1, 25)),
    "SL2(4)",
    "SL2(8)",
    "Dir(Sym(3),Cyc(4))",
    "Dir(Sym(3),Cyc(5))",
    "Dir(Alt(4),Cyc(2))",
    "Pow(Cyc(2),2)",
    "Pow(Cyc(2),3)",
    "Pow(Sym(3),2)",
    "Pow(SL2(4),2)",
    "KleinCp3(3)",
    "KleinCp3(3,5)",
)


def is_two_generated(spec: str) -> bool:
    return d_rel(cached_group(spec)) <= 2


def load_corpus(name: str) -> list[str]:
    """``builtin``, ``builtin-soluble`` (soluble and 2-generated), ``builtin-small``
    (order at most 200) or a path to a corpus file."""
    if name == "builtin":
        return list(BUILTIN)
    if name == "builtin-soluble":
        return [s for s in BUILTIN if is_soluble(cached_group(s)) and is_two_generated(s)]
    if name == "builtin-small":
        return [s for s in BUILTIN if cached_group(s).order <= 200]
    path = Path(name)
    if not path.is_file():
        raise SpecError(f"unknown corpus {name!r}")
    out = []
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(str(parse_spec(line)))
    return out
