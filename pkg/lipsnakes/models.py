"""Link models: a finite description of the link of a surface germ.

The link is a chain (or cycle) of pancakes. Each pancake lists its marked arcs
in order, with the inner tangency exponent of each consecutive pair. Contacts
record outer tangency between marked arcs that is higher than the inner one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, List, Optional, Tuple

from pydantic import BaseModel

from .exponents import ExpQ, format_exp

IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_+\-']*$")


class Topology(str, Enum):
    CIRCULAR = "circular"
    SEGMENT = "segment"


@dataclass(frozen=True)
class PancakeSpec:
    id: str
    arcs: Tuple[str, ...]
    internal_exponents: Tuple[ExpQ, ...]

    @property
    def first(self) -> str:
        return self.arcs[0]

    @property
    def last(self) -> str:
        return self.arcs[-1]

    @property
    def exponent(self) -> ExpQ:
        return min(self.internal_exponents)

    def intervals(self) -> List[Tuple[str, str, ExpQ]]:
        return [(self.arcs[i], self.arcs[i + 1], self.internal_exponents[i]) for i in range(len(self.arcs) - 1)]


@dataclass(frozen=True)
class ContactEdge:
    a: str
    b: str
    q: ExpQ


@dataclass(frozen=True)
class LinkModel:
    beta: ExpQ
    topology: Topology
    pancakes: Tuple[PancakeSpec, ...]
    contacts: Tuple[ContactEdge, ...] = ()
    singular_arcs: FrozenSet[str] = field(default_factory=frozenset)

    @property
    def circular(self) -> bool:
        return self.topology == Topology.CIRCULAR

    @property
    def p(self) -> int:
        return len(self.pancakes)

    def pancake(self, pid: str) -> PancakeSpec:
        for pc in self.pancakes:
            if pc.id == pid:
                return pc
        raise KeyError(pid)

    def arc_order(self) -> List[str]:
        """Marked arcs in link order, each listed once."""
        out: List[str] = []
        for i, pc in enumerate(self.pancakes):
            arcs = list(pc.arcs if i == 0 else pc.arcs[1:])
            out.extend(arcs)
        if self.circular and len(out) > 1 and out[0] == out[-1]:
            out.pop()
        return out

    def intervals(self) -> List[Tuple[str, str, str, ExpQ]]:
        """(pancake, u, v, e) for every elementary interval, in link order."""
        return [(pc.id, u, v, e) for pc in self.pancakes for (u, v, e) in pc.intervals()]

    def pancakes_of(self, arc: str) -> Tuple[str, ...]:
        return tuple(pc.id for pc in self.pancakes if arc in pc.arcs)

    def gluing_arcs(self) -> List[str]:
        """Arcs shared by consecutive pancakes (gamma_1 .. gamma_p on a cycle)."""
        n = len(self.pancakes)
        if self.circular:
            return [self.pancakes[i].last for i in range(n)]
        return [self.pancakes[i].last for i in range(n - 1)]

    def contact_between(self, a: str, b: str) -> Optional[ContactEdge]:
        for c in self.contacts:
            if {c.a, c.b} == {a, b}:
                return c
        return None

    def describe(self) -> str:
        return (
            f"{self.topology.value} model, beta={format_exp(self.beta)}, "
            f"{len(self.pancakes)} pancakes, {len(self.contacts)} contacts"
        )


class ValidationReport(BaseModel):
    ok: bool
    violations: List[str] = []
