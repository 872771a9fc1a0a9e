"""Inner and outer tangency closures on a link model.

Every elementary interval (u, v, e) is refined into representative arcs: arcs
near u at each critical depth above e, one generic arc, and arcs near v. The
chain through these points carries the inner exponents; contacts join marked
arcs. Tangency orders are max-min (bottleneck) closures over that graph,
computed on a maximum spanning tree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .errors import ModelValidationError
from .exponents import INF, ExpQ, format_exp, is_inf
from .models import IDENT_RE, LinkModel, ValidationReport

log = logging.getLogger(__name__)

# ---------------------------
# Refined points
# ---------------------------

class PointKind(str, Enum):
    ARC = "arc"
    NEAR = "near"
    GENERIC = "generic"


@dataclass(frozen=True)
class LinkPoint:
    kind: PointKind
    arc: str = ""  # the marked arc, or the endpoint a NEAR point is close to
    pancake: str = ""
    interval: Tuple[str, str] = ("", "")
    depth: ExpQ = INF  # inner order to `arc`; the interval exponent for GENERIC

    @classmethod
    def marked(cls, arc: str) -> "LinkPoint":
        return cls(PointKind.ARC, arc)

    @property
    def cell(self) -> str:
        """Label of the piece of the link this point samples."""
        if self.kind == PointKind.ARC:
            return self.arc
        base = f"{self.pancake}({self.interval[0]},{self.interval[1]})"
        return base if self.kind == PointKind.GENERIC else f"{base}~{self.arc}"

    @property
    def label(self) -> str:
        if self.kind == PointKind.NEAR:
            return f"{self.cell}@{format_exp(self.depth)}"
        return self.cell

    def __str__(self) -> str:
        return self.label


PointRef = Union[str, LinkPoint]


def _depths_above(e: ExpQ, critical: Sequence[ExpQ]) -> List[ExpQ]:
    above = [c for c in critical if c > e]
    if not above:
        return [e + 1]
    out: List[ExpQ] = []
    prev = e
    for c in above:
        out.append((prev + c) / 2)
        out.append(c)
        prev = c
    out.append(above[-1] + 1)
    return out


class LinkGraph:
    """Refined points in link order; weights[i] joins points i and i+1 (cyclically when circular)."""

    def __init__(self, points: List[LinkPoint], weights: List[ExpQ], owners: List[Tuple[str, ...]], circular: bool):
        self.points = tuple(points)
        self.weights = tuple(weights)
        self.owners = tuple(owners)
        self.circular = circular
        self.position: Dict[LinkPoint, int] = {p: i for i, p in enumerate(self.points)}

    def __len__(self) -> int:
        return len(self.points)

    def step(self, i: int, d: int) -> Optional[int]:
        j = i + d
        if self.circular:
            return j % len(self.points)
        return j if 0 <= j < len(self.points) else None

    def arc_positions(self) -> Dict[str, int]:
        return {p.arc: i for i, p in enumerate(self.points) if p.kind == PointKind.ARC}


def refine(model: LinkModel) -> LinkGraph:
    critical = sorted({e for pc in model.pancakes for e in pc.internal_exponents})
    points: List[LinkPoint] = []
    weights: List[ExpQ] = []
    owners: List[Tuple[str, ...]] = []
    intervals = model.intervals()
    for idx, (pid, u, v, e) in enumerate(intervals):
        if idx == 0:
            points.append(LinkPoint.marked(u))
            owners.append(model.pancakes_of(u))
        asc = _depths_above(e, critical)
        cells = [LinkPoint(PointKind.NEAR, u, pid, (u, v), d) for d in reversed(asc)]
        cells.append(LinkPoint(PointKind.GENERIC, "", pid, (u, v), e))
        cells.extend(LinkPoint(PointKind.NEAR, v, pid, (u, v), d) for d in asc)
        weights.extend(list(reversed(asc)) + [e, e] + asc)
        points.extend(cells)
        owners.extend([(pid,)] * len(cells))
        last = idx == len(intervals) - 1
        if not (last and model.circular):
            points.append(LinkPoint.marked(v))
            owners.append(model.pancakes_of(v))
    return LinkGraph(points, weights, owners, model.circular)


# ---------------------------
# Closures
# ---------------------------

def _bottleneck_table(n: int, edges: Sequence[Tuple[int, int, int]]) -> List[List[int]]:
    """All-pairs max-min path values (edge weights are integer ranks)."""
    g = nx.Graph()
    g.add_nodes_from(range(n))
    for u, v, w in edges:
        if g.has_edge(u, v) and g[u][v]["weight"] >= w:
            continue
        g.add_edge(u, v, weight=w)
    if n and not nx.is_connected(g):
        raise ModelValidationError("disconnected link")
    tree = nx.maximum_spanning_tree(g, weight="weight")
    top = max((w for _, _, w in edges), default=0) + 1
    table = [[top] * n for _ in range(n)]
    for src in range(n):
        row = table[src]
        stack = [(src, top)]
        seen = {src}
        while stack:
            node, low = stack.pop()
            for nb, data in tree[node].items():
                if nb in seen:
                    continue
                seen.add(nb)
                m = min(low, data["weight"])
                row[nb] = m
                stack.append((nb, m))
    return table


class LinkAnalysis:
    """Closure tables of one model, on integer ranks of the exponents involved."""

    def __init__(self, model: LinkModel):
        problems = structure_violations(model)
        if problems:
            raise ModelValidationError(problems[0], problems)
        self.model = model
        self.graph = refine(model)
        arcs = self.graph.arc_positions()
        for c in model.contacts:
            if c.a not in arcs or c.b not in arcs:
                raise ModelValidationError(f"contact {c.a} {c.b} refers to an unknown arc")

        values = set(self.graph.weights) | {c.q for c in model.contacts} | {model.beta}
        finite = sorted(v for v in values if not is_inf(v))
        self.levels: List[ExpQ] = finite + [INF]
        self.rank: Dict[ExpQ, int] = {v: i for i, v in enumerate(finite)}
        self.rank[INF] = len(finite)
        self.beta_rank = self.rank[model.beta]
        self.inf_rank = self.rank[INF]

        n = len(self.graph)
        w = [self.rank[x] for x in self.graph.weights]
        chain = [(i, (i + 1) % n, w[i]) for i in range(n if self.graph.circular else n - 1)]
        contacts = [(arcs[c.a], arcs[c.b], self.rank[c.q]) for c in model.contacts]
        self.weight_rank = w
        self.inner = _bottleneck_table(n, chain)
        self.outer = _bottleneck_table(n, chain + contacts)
        for t in (self.inner, self.outer):
            for i in range(n):
                t[i][i] = self.inf_rank
        self.arc_pos = arcs
        log.debug("closure built: %d points, %d contacts", n, len(model.contacts))

    def resolve(self, x: PointRef) -> int:
        if isinstance(x, LinkPoint):
            try:
                return self.graph.position[x]
            except KeyError:
                raise ModelValidationError(f"point {x.label} is not a point of this model") from None
        try:
            return self.arc_pos[x]
        except KeyError:
            raise ModelValidationError(f"unknown marked arc {x}") from None

    def value(self, r: int) -> ExpQ:
        return self.levels[r]

    def inner_tord(self, x: PointRef, y: PointRef) -> ExpQ:
        return self.levels[self.inner[self.resolve(x)][self.resolve(y)]]

    def outer_tord(self, x: PointRef, y: PointRef) -> ExpQ:
        return self.levels[self.outer[self.resolve(x)][self.resolve(y)]]

    def pancake_positions(self, pid: str) -> List[int]:
        """Positions of pancake `pid` from its first to its last marked arc."""
        pc = self.model.pancake(pid)
        i = self.arc_pos[pc.first]
        out = [i]
        seen_arcs = 0
        while seen_arcs < len(pc.arcs) - 1:
            i = self.graph.step(i, 1)
            out.append(i)
            if self.graph.points[i].kind == PointKind.ARC:
                seen_arcs += 1
        return out

    def pancake_inner(self, positions: Sequence[int]) -> Dict[Tuple[int, int], int]:
        """Inner ranks between points of one pancake, along the pancake only."""
        out: Dict[Tuple[int, int], int] = {}
        for a in range(len(positions)):
            low = self.inf_rank
            out[(positions[a], positions[a])] = self.inf_rank
            for b in range(a + 1, len(positions)):
                low = min(low, self.weight_rank[positions[b - 1]])
                # a pancake closing on itself is reached both ways round
                for key in ((positions[a], positions[b]), (positions[b], positions[a])):
                    out[key] = max(out.get(key, -1), low)
        return out

    def pancake_generic(self, pid: str) -> List[int]:
        """G(X_k): points of the pancake at inner order beta from both of its boundary arcs."""
        span = self.pancake_positions(pid)
        along = self.pancake_inner(span)
        first, last = span[0], span[-1]
        return [i for i in span if along[(i, first)] == self.beta_rank and along[(i, last)] == self.beta_rank]


@lru_cache(maxsize=256)
def link_analysis(model: LinkModel) -> LinkAnalysis:
    return LinkAnalysis(model)


# ---------------------------
# Operations
# ---------------------------

def inner_tord(model: LinkModel, a: PointRef, b: PointRef) -> ExpQ:
    return link_analysis(model).inner_tord(a, b)


def outer_tord(model: LinkModel, a: PointRef, b: PointRef) -> ExpQ:
    return link_analysis(model).outer_tord(a, b)


def tord_to_pancake(model: LinkModel, a: PointRef, k: str) -> ExpQ:
    """Order of the distance to pancake k along a: sup of tord(a, x) over x in X_k."""
    an = link_analysis(model)
    try:
        pc = model.pancake(k)
    except KeyError:
        raise ModelValidationError(f"unknown pancake {k}") from None
    i = an.resolve(a)
    if k in an.graph.owners[i]:
        return INF
    return an.value(max(an.outer[i][an.arc_pos[w]] for w in pc.arcs))


def exponent_mu(model: LinkModel) -> ExpQ:
    an = link_analysis(model)
    n = len(an.graph)
    return an.value(min(an.inner[i][j] for i in range(n) for j in range(i + 1, n)))


def is_normally_embedded(model: LinkModel) -> bool:
    an = link_analysis(model)
    return an.inner == an.outer


def check_weak_ne(model: LinkModel) -> bool:
    """Every pair lifted by a contact sits at inner order beta."""
    an = link_analysis(model)
    n = len(an.graph)
    for i in range(n):
        for j in range(i + 1, n):
            if an.outer[i][j] > an.inner[i][j] and an.inner[i][j] != an.beta_rank:
                return False
    return True


# ---------------------------
# Validation
# ---------------------------

def structure_violations(model: LinkModel) -> List[str]:
    reasons: List[str] = []
    if not model.pancakes:
        return ["model has no pancakes"]
    seen_ids = set()
    for pc in model.pancakes:
        if pc.id in seen_ids:
            reasons.append(f"pancake {pc.id} declared twice")
        seen_ids.add(pc.id)
        if not IDENT_RE.match(pc.id):
            reasons.append(f"bad pancake id {pc.id!r}")
        if len(pc.arcs) < 2:
            reasons.append(f"pancake {pc.id} needs at least two marked arcs")
            continue
        if len(pc.internal_exponents) != len(pc.arcs) - 1:
            reasons.append(f"pancake {pc.id} has {len(pc.internal_exponents)} internal exponents for {len(pc.arcs)} arcs")
        for e in pc.internal_exponents:
            if is_inf(e):
                reasons.append(f"pancake {pc.id} has an infinite internal exponent")
            elif e < model.beta:
                reasons.append(f"pancake {pc.id} has internal exponent {format_exp(e)} below beta")
        arcs = list(pc.arcs)
        loop = model.circular and model.p == 1 and arcs[0] == arcs[-1]
        if len(set(arcs[:-1] if loop else arcs)) != len(arcs) - (1 if loop else 0):
            reasons.append(f"pancake {pc.id} repeats a marked arc")
        if loop and len(arcs) < 3:
            reasons.append(f"pancake {pc.id} closes on itself with a single interval")
    if reasons:
        return reasons

    p = model.p
    links = range(p) if model.circular else range(p - 1)
    for i in links:
        a, b = model.pancakes[i], model.pancakes[(i + 1) % p]
        if a.last != b.first:
            reasons.append(f"pancake chain does not close: {a.id} ends at {a.last} but {b.id} starts at {b.first}")
    if reasons:
        return reasons

    order = model.arc_order()
    if len(order) != len(set(order)):
        dup = sorted({a for a in order if order.count(a) > 1})
        reasons.append(f"marked arcs occur twice in the link: {', '.join(dup)}")
    return reasons


def validate(model: LinkModel) -> ValidationReport:
    reasons = structure_violations(model)
    if reasons:
        return ValidationReport(ok=False, violations=reasons)

    arcs = set(model.arc_order())
    for c in model.contacts:
        if c.a not in arcs or c.b not in arcs:
            reasons.append(f"contact {c.a} {c.b} refers to an unknown arc")
        elif c.a == c.b:
            reasons.append(f"contact joins {c.a} to itself")
    for s in sorted(model.singular_arcs):
        if s not in arcs:
            reasons.append(f"singular arc {s} is not a marked arc")
    if reasons:
        return ValidationReport(ok=False, violations=reasons)

    an = link_analysis(model)
    for c in model.contacts:
        it = an.inner_tord(c.a, c.b)
        if not c.q > it:
            reasons.append(
                f"contact not above inner order: {c.a} {c.b} q={format_exp(c.q)} itord={format_exp(it)}"
            )

    for pc in model.pancakes:
        span = an.pancake_positions(pc.id)
        along = an.pancake_inner(span)
        marked = [i for i in span if an.graph.points[i].kind == PointKind.ARC]
        for x in range(len(marked)):
            for y in range(x + 1, len(marked)):
                i, j = marked[x], marked[y]
                if i == j:
                    continue
                if an.outer[i][j] != along[(i, j)]:
                    reasons.append(
                        f"pancake {pc.id} is not normally embedded: "
                        f"tord({an.graph.points[i].arc},{an.graph.points[j].arc})={format_exp(an.value(an.outer[i][j]))} "
                        f"but its inner order is {format_exp(an.value(along[(i, j)]))}"
                    )

    mu = exponent_mu(model)
    if mu != model.beta:
        reasons.append(f"exponent_mu is {format_exp(mu)} but beta is declared {format_exp(model.beta)}")

    reasons.extend(_laminarity_violations(an))
    return ValidationReport(ok=not reasons, violations=reasons)


def _laminarity_violations(an: LinkAnalysis) -> List[str]:
    """Each run of an outer ball {x : tord(x, g) >= q}, q > beta, must be an inner ball."""
    out: List[str] = []
    g = an.graph
    n = len(g)
    for arc, c in an.arc_pos.items():
        row = an.outer[c]
        for q in sorted({r for r in row if an.beta_rank < r < an.inf_rank}):
            inside = [row[i] >= q for i in range(n)]
            for i in range(n):
                j = g.step(i, 1)
                if j is None or not (inside[i] and inside[j]):
                    continue
                if an.weight_rank[i] < q:
                    out.append(f"outer ball of {arc} at order {format_exp(an.value(q))} is not an inner ball")
                    break
    return out


def require_valid(model: LinkModel) -> None:
    report = validate(model)
    if not report.ok:
        raise ModelValidationError(report.violations[0], report.violations)

