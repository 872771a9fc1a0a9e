"""The line-oriented .snk model format.

    beta 1
    topology circular
    pancake X1 g4 g1
    internal X1 g4 g1 1
    contact g1 g3 2
    singular g9

'#' starts a comment. A pancake interval without an `internal` line gets
exponent beta.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from .errors import ParseError
from .exponents import ExpQ, format_exp, parse_exp
from .models import IDENT_RE, ContactEdge, LinkModel, PancakeSpec, Topology


class _SnkBuilder:
    def __init__(self) -> None:
        self.beta: Optional[ExpQ] = None
        self.topology: Optional[Topology] = None
        self.pancakes: List[Tuple[str, List[str]]] = []
        self.internals: Dict[Tuple[str, str, str], ExpQ] = {}
        self.contacts: List[ContactEdge] = []
        self.singular: List[str] = []

    # one handler per key; each gets (args, line number)

    def beta_(self, args: List[str], n: int) -> None:
        _arity(args, 1, "beta <q>", n)
        if self.beta is not None:
            raise ParseError("beta given twice", line=n)
        self.beta = _exp(args[0], n)

    def topology_(self, args: List[str], n: int) -> None:
        _arity(args, 1, "topology circular|segment", n)
        if self.topology is not None:
            raise ParseError("topology given twice", line=n)
        try:
            self.topology = Topology(args[0])
        except ValueError:
            raise ParseError(f"unknown topology {args[0]!r}", line=n) from None

    def pancake_(self, args: List[str], n: int) -> None:
        if len(args) < 3:
            raise ParseError("pancake needs an id and at least two arcs", line=n)
        for name in args:
            _ident(name, n)
        if any(pid == args[0] for pid, _ in self.pancakes):
            raise ParseError(f"pancake {args[0]} declared twice", line=n)
        self.pancakes.append((args[0], args[1:]))

    def internal_(self, args: List[str], n: int) -> None:
        _arity(args, 4, "internal <pancake> <arc> <arc> <q>", n)
        pid, u, v = args[0], args[1], args[2]
        arcs = dict(self.pancakes).get(pid)
        if arcs is None:
            raise ParseError(f"internal refers to unknown pancake {pid}", line=n)
        if not any(arcs[i] == u and arcs[i + 1] == v for i in range(len(arcs) - 1)):
            raise ParseError(f"{u} {v} are not consecutive arcs of {pid}", line=n)
        if (pid, u, v) in self.internals:
            raise ParseError(f"internal exponent of {pid} {u} {v} given twice", line=n)
        self.internals[(pid, u, v)] = _exp(args[3], n)

    def contact_(self, args: List[str], n: int) -> None:
        _arity(args, 3, "contact <arc> <arc> <q>", n)
        _ident(args[0], n)
        _ident(args[1], n)
        self.contacts.append(ContactEdge(args[0], args[1], _exp(args[2], n)))

    def singular_(self, args: List[str], n: int) -> None:
        _arity(args, 1, "singular <arc>", n)
        self.singular.append(_ident(args[0], n))

    def build(self) -> LinkModel:
        if self.beta is None:
            raise ParseError("missing 'beta' line")
        if self.topology is None:
            raise ParseError("missing 'topology' line")
        if not self.pancakes:
            raise ParseError("no pancakes declared")
        pancakes = []
        for pid, arcs in self.pancakes:
            exps = tuple(self.internals.get((pid, arcs[i], arcs[i + 1]), self.beta) for i in range(len(arcs) - 1))
            pancakes.append(PancakeSpec(pid, tuple(arcs), exps))
        return LinkModel(self.beta, self.topology, tuple(pancakes), tuple(self.contacts), frozenset(self.singular))


def _arity(args: List[str], k: int, usage: str, n: int) -> None:
    if len(args) != k:
        raise ParseError(f"expected '{usage}'", line=n)


def _ident(name: str, n: int) -> str:
    if not IDENT_RE.match(name):
        raise ParseError(f"bad identifier {name!r}", line=n)
    return name


def _exp(text: str, n: int) -> ExpQ:
    try:
        return parse_exp(text)
    except ParseError as e:
        raise ParseError(e.message, line=n) from None


def parse_snk(text: str) -> LinkModel:
    b = _SnkBuilder()
    handlers: Dict[str, Callable[[List[str], int], None]] = {
        "beta": b.beta_,
        "topology": b.topology_,
        "pancake": b.pancake_,
        "internal": b.internal_,
        "contact": b.contact_,
        "singular": b.singular_,
    }
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        handler = handlers.get(key)
        if handler is None:
            raise ParseError(f"unknown key {key!r}", line=n)
        handler(args, n)
    return b.build()


def load_snk(path: Path) -> LinkModel:
    return parse_snk(Path(path).read_text(encoding="utf-8"))


def format_snk(model: LinkModel) -> str:
    lines = [f"beta {format_exp(model.beta)}", f"topology {model.topology.value}"]
    for pc in model.pancakes:
        lines.append(f"pancake {pc.id} {' '.join(pc.arcs)}")
    for pc in model.pancakes:
        for u, v, e in pc.intervals():
            lines.append(f"internal {pc.id} {u} {v} {format_exp(e)}")
    for c in model.contacts:
        lines.append(f"contact {c.a} {c.b} {format_exp(c.q)}")
    for a in sorted(model.singular_arcs):
        lines.append(f"singular {a}")
    return "\n".join(lines) + "\n"
