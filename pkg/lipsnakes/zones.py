"""Multiplicity, segments and nodal zones, nodes, abnormal arcs, and surface classes."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import RecognitionError
from .exponents import ExpQ, format_exp
from .linkmodel import LinkAnalysis, LinkPoint, PointKind, PointRef, link_analysis, validate
from .models import LinkModel

log = logging.getLogger(__name__)


class ArcKind(str, Enum):
    SEGMENT_ARC = "segment_arc"
    NODAL_ARC = "nodal_arc"


class ZoneKind(str, Enum):
    SEGMENT = "segment"
    NODAL = "nodal"
    OTHER = "other"


class SurfaceClass(str, Enum):
    NE_HORN = "NE_HORN"
    CIRCULAR_SNAKE = "CIRCULAR_SNAKE"
    SNAKE = "SNAKE"
    OTHER = "OTHER"


@dataclass(frozen=True)
class Zone:
    kind: ZoneKind
    points: Tuple[LinkPoint, ...]
    order: ExpQ
    multiplicity: Optional[int]
    closed: bool

    @property
    def pieces(self) -> Tuple[str, ...]:
        out: List[str] = []
        for p in self.points:
            if not out or out[-1] != p.cell:
                out.append(p.cell)
        return tuple(out)

    @property
    def arcs(self) -> Tuple[str, ...]:
        return tuple(p.arc for p in self.points if p.kind == PointKind.ARC)

    @property
    def interval(self) -> str:
        pieces = self.pieces
        lo, hi = ("[", "]") if self.closed else ("(", ")")
        if len(pieces) == 1:
            return f"{lo}{pieces[0]}{hi}"
        return f"{lo}{pieces[0]} .. {pieces[-1]}{hi}"

    @property
    def name(self) -> str:
        if self.kind == ZoneKind.NODAL and self.arcs:
            return f"N({self.arcs[0]})"
        if self.kind == ZoneKind.SEGMENT:
            owners = [p.pancake for p in self.points if p.kind == PointKind.GENERIC]
            return f"S({owners[0]})" if owners else f"S({self.pieces[0]})"
        return self.interval

    def __contains__(self, point: LinkPoint) -> bool:
        return point in self.points


@dataclass(frozen=True)
class Node:
    nodal_zones: Tuple[Zone, ...]
    spectrum: FrozenSet[ExpQ]

    @property
    def members(self) -> Tuple[str, ...]:
        return tuple(z.name for z in self.nodal_zones)


@dataclass(frozen=True)
class Recognition:
    surface_class: SurfaceClass
    diagnosis: str


@dataclass(frozen=True)
class ContactCluster:
    arcs: Tuple[str, ...]
    spectrum: FrozenSet[ExpQ]


# ---------------------------
# Runs on the link
# ---------------------------

def _runs(an: LinkAnalysis, flags: Sequence[bool]) -> List[List[int]]:
    """Maximal runs of consecutive flagged positions; runs wrap on a cycle."""
    n = len(flags)
    if an.graph.circular and all(flags):
        return [list(range(n))]
    start = 0
    if an.graph.circular:
        # begin just after an unflagged position so no run is split at 0
        start = next(i for i in range(n) if not flags[i]) + 1
    runs: List[List[int]] = []
    cur: List[int] = []
    for k in range(n):
        i = (start + k) % n
        if flags[i]:
            cur.append(i)
        elif cur:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    return sorted(runs, key=min)


def _ball(an: LinkAnalysis, x: int) -> Tuple[int, int]:
    """Ends (left, right) of the run around x at inner order above beta."""
    g, b, n = an.graph, an.beta_rank, len(an.graph)
    left = x
    for _ in range(n):
        prev = g.step(left, -1)
        if prev is None or an.weight_rank[prev] <= b or prev == x:
            break
        left = prev
    right = x
    for _ in range(n):
        nxt = g.step(right, 1)
        if nxt is None or an.weight_rank[right] <= b or nxt == left:
            break
        right = nxt
    return left, right


def _zone(an: LinkAnalysis, run: List[int], kind: ZoneKind, closed: bool, mult: Sequence[int]) -> Zone:
    pts = tuple(an.graph.points[i] for i in run)
    low = an.inf_rank
    for a in range(len(run)):
        for c in range(a + 1, len(run)):
            low = min(low, an.outer[run[a]][run[c]])
    for i in run:
        p = an.graph.points[i]
        if p.kind == PointKind.GENERIC:
            low = min(low, an.rank[p.depth])
    if not closed:
        # an open zone creeps up to inner order beta
        low = min(low, an.beta_rank)
    ms = {mult[i] for i in run}
    return Zone(kind, pts, an.value(low), ms.pop() if len(ms) == 1 else None, closed)


# ---------------------------
# Multiplicity
# ---------------------------

def _multiplicity_at(an: LinkAnalysis, x: int) -> int:
    """Components of {y : tord(x, y) > beta}, joined along chain edges above beta."""
    g, b, n = an.graph, an.beta_rank, len(an.graph)
    row = an.outer[x]
    count = 0
    for i in range(n):
        if row[i] <= b:
            continue
        prev = g.step(i, -1)
        if prev is not None and row[prev] > b and an.weight_rank[prev] > b:
            continue
        count += 1
    return max(count, 1)


@lru_cache(maxsize=256)
def _multiplicities(model: LinkModel) -> Tuple[int, ...]:
    an = link_analysis(model)
    return tuple(_multiplicity_at(an, i) for i in range(len(an.graph)))


def multiplicity(model: LinkModel, a: PointRef) -> int:
    an = link_analysis(model)
    return _multiplicities(model)[an.resolve(a)]


def horn_components(model: LinkModel, a: PointRef) -> List[Tuple[LinkPoint, ...]]:
    """The strands counted by `multiplicity`, as point runs."""
    an = link_analysis(model)
    row = an.outer[an.resolve(a)]
    flags = [r > an.beta_rank for r in row]
    runs = _runs(an, flags)
    # runs split only where the chain edge drops to beta
    out: List[Tuple[LinkPoint, ...]] = []
    for run in runs:
        cur: List[LinkPoint] = []
        for k, i in enumerate(run):
            if k and an.weight_rank[run[k - 1]] <= an.beta_rank:
                out.append(tuple(cur))
                cur = []
            cur.append(an.graph.points[i])
        out.append(tuple(cur))
    return out


# ---------------------------
# Generic and abnormal arcs
# ---------------------------

def _generic_flags(an: LinkAnalysis) -> List[bool]:
    n = len(an.graph)
    if an.graph.circular:
        return [True] * n
    first, last = 0, n - 1
    return [an.inner[i][first] == an.beta_rank and an.inner[i][last] == an.beta_rank for i in range(n)]


def generic_points(model: LinkModel) -> Tuple[LinkPoint, ...]:
    """G(X): every point of a circular model; points at inner order beta from both ends otherwise."""
    an = link_analysis(model)
    return tuple(p for p, f in zip(an.graph.points, _generic_flags(an)) if f)


def _scan_abnormal(an: LinkAnalysis) -> List[bool]:
    """x is abnormal when normally embedded triangles T(l, x), T(x, l') exist whose union is not.

    ne[i][L] says the sub-arc from position i spanning L steps forward is
    normally embedded: every pair in it has outer order equal to the minimum
    chain weight between them.
    """
    g = an.graph
    n = len(g)
    circ = g.circular
    w = an.weight_rank
    outer = an.outer
    singular = an.model.singular_arcs
    blocked = [p.kind == PointKind.ARC and p.arc in singular for p in g.points]

    ne = [[False] * n for _ in range(n)]
    low = [an.inf_rank] * n
    for i in range(n):
        ne[i][0] = True
    for L in range(1, n):
        for i in range(n):
            if not circ and i + L >= n:
                continue
            low[i] = min(low[i], w[(i + L - 1) % n])
            j = (i + L) % n
            ne[i][L] = ne[i][L - 1] and ne[(i + 1) % n][L - 1] and outer[i][j] == low[i]

    flags = [False] * n
    for c in range(n):
        if blocked[c] or (not circ and c in (0, n - 1)):
            continue
        left_low: List[int] = [an.inf_rank]
        a = 0
        while a + 1 < n and (circ or c - a - 1 >= 0):
            s = (c - a - 1) % n
            if blocked[s] or not ne[s][a + 1]:
                break
            a += 1
            left_low.append(min(left_low[-1], w[s]))
        right_low: List[int] = [an.inf_rank]
        b = 0
        while b + 1 < n and (circ or c + b + 1 < n):
            e = (c + b + 1) % n
            if blocked[e] or not ne[c][b + 1]:
                break
            b += 1
            right_low.append(min(right_low[-1], w[(c + b - 1) % n]))
        found = False
        for da in range(1, a + 1):
            lam = (c - da) % n
            row = outer[lam]
            for db in range(1, b + 1):
                if circ and da + db >= n:
                    break
                if row[(c + db) % n] > min(left_low[da], right_low[db]):
                    found = True
                    break
            if found:
                break
        flags[c] = found
    return flags


@lru_cache(maxsize=256)
def abnormal_flags(model: LinkModel) -> Tuple[bool, ...]:
    return tuple(_scan_abnormal(link_analysis(model)))


def abnormal_points(model: LinkModel) -> Tuple[LinkPoint, ...]:
    an = link_analysis(model)
    return tuple(p for p, f in zip(an.graph.points, abnormal_flags(model)) if f)


def is_abnormal(model: LinkModel, a: PointRef) -> bool:
    an = link_analysis(model)
    return abnormal_flags(model)[an.resolve(a)]


def abnormal_set(model: LinkModel) -> Tuple[Zone, ...]:
    an = link_analysis(model)
    mult = _multiplicities(model)
    return tuple(_zone(an, run, ZoneKind.OTHER, False, mult) for run in _runs(an, abnormal_flags(model)))


# ---------------------------
# Recognition
# ---------------------------

@lru_cache(maxsize=256)
def recognize(model: LinkModel) -> Recognition:
    report = validate(model)
    if not report.ok:
        return Recognition(SurfaceClass.OTHER, f"invalid model: {report.violations[0]}")
    an = link_analysis(model)
    ne = an.inner == an.outer
    abn = abnormal_flags(model)
    log.debug("recognizing %s: %d points, %d abnormal", model.describe(), len(abn), sum(abn))
    if model.circular:
        if ne:
            return Recognition(SurfaceClass.NE_HORN, "normally embedded circular surface")
        if model.singular_arcs:
            return Recognition(SurfaceClass.OTHER, "contains a Lipschitz singular arc")
        normal = [an.graph.points[i] for i in range(len(abn)) if not abn[i]]
        if normal:
            return Recognition(SurfaceClass.OTHER, f"arc {normal[0].label} is not abnormal")
        return Recognition(SurfaceClass.CIRCULAR_SNAKE, "every arc is abnormal")
    if model.singular_arcs:
        return Recognition(SurfaceClass.OTHER, "contains a Lipschitz singular arc")
    if ne:
        return Recognition(SurfaceClass.OTHER, "normally embedded triangle")
    generic = _generic_flags(an)
    for i, p in enumerate(an.graph.points):
        if generic[i] and not abn[i]:
            return Recognition(SurfaceClass.OTHER, f"generic arc {p.label} is not abnormal")
        if abn[i] and not generic[i]:
            return Recognition(SurfaceClass.OTHER, f"arc {p.label} near the boundary is abnormal")
    return Recognition(SurfaceClass.SNAKE, "every generic arc is abnormal")


# ---------------------------
# Segments and nodal zones
# ---------------------------

_DECOMPOSABLE = {SurfaceClass.CIRCULAR_SNAKE, SurfaceClass.SNAKE, SurfaceClass.NE_HORN}


def _require_decomposable(model: LinkModel) -> None:
    rec = recognize(model)
    if rec.surface_class not in _DECOMPOSABLE:
        raise RecognitionError(f"segments are defined for snakes and circular snakes: {rec.diagnosis}")


def _kinds(an: LinkAnalysis, mult: Sequence[int]) -> List[ArcKind]:
    out: List[ArcKind] = []
    for x, p in enumerate(an.graph.points):
        if p.kind == PointKind.GENERIC and an.rank[p.depth] == an.beta_rank:
            # a small beta-triangle inside the generic cell sees constant multiplicity
            out.append(ArcKind.SEGMENT_ARC)
            continue
        left, right = _ball(an, x)
        before, after = an.graph.step(left, -1), an.graph.step(right, 1)
        if before is None or after is None:
            out.append(ArcKind.NODAL_ARC)
            continue
        ball = [left]
        i = left
        while i != right:
            i = an.graph.step(i, 1)
            ball.append(i)
        same = {mult[i] for i in ball} | {mult[before], mult[after]}
        out.append(ArcKind.SEGMENT_ARC if len(same) == 1 else ArcKind.NODAL_ARC)
    return out


@lru_cache(maxsize=256)
def _arc_kinds(model: LinkModel) -> Tuple[ArcKind, ...]:
    return tuple(_kinds(link_analysis(model), _multiplicities(model)))


def classify_arcs(model: LinkModel) -> Dict[LinkPoint, ArcKind]:
    _require_decomposable(model)
    an = link_analysis(model)
    return dict(zip(an.graph.points, _arc_kinds(model)))


def segments(model: LinkModel) -> List[Zone]:
    _require_decomposable(model)
    an = link_analysis(model)
    kinds, mult = _arc_kinds(model), _multiplicities(model)
    flags = [k == ArcKind.SEGMENT_ARC for k in kinds]
    return [_zone(an, run, ZoneKind.SEGMENT, True, mult) for run in _runs(an, flags)]


def nodal_zones(model: LinkModel) -> List[Zone]:
    _require_decomposable(model)
    an = link_analysis(model)
    kinds, mult = _arc_kinds(model), _multiplicities(model)
    flags = [k == ArcKind.NODAL_ARC for k in kinds]
    return [_zone(an, run, ZoneKind.NODAL, False, mult) for run in _runs(an, flags)]


def zone_tord(model: LinkModel, z1: Zone, z2: Zone) -> ExpQ:
    """tord between zones: the largest outer order between their members."""
    an = link_analysis(model)
    return an.value(max(an.outer[an.resolve(x)][an.resolve(y)] for x in z1.points for y in z2.points))


def is_beta_complete(model: LinkModel, zone: Zone) -> bool:
    """The zone equals {x : itord(x, g) > beta} for one (hence any) member g."""
    an = link_analysis(model)
    members = {an.resolve(p) for p in zone.points}
    g = next(iter(members))
    ball = {i for i in range(len(an.graph)) if an.inner[g][i] > an.beta_rank}
    return ball == members


def nodes(model: LinkModel) -> List[Node]:
    zones = nodal_zones(model)
    an = link_analysis(model)
    graph = nx.Graph()
    graph.add_nodes_from(range(len(zones)))
    for i in range(len(zones)):
        for j in range(i + 1, len(zones)):
            t = zone_tord(model, zones[i], zones[j])
            if an.rank[t] > an.beta_rank:
                graph.add_edge(i, j, tord=t)
    out: List[Node] = []
    for comp in sorted(nx.connected_components(graph), key=min):
        members = sorted(comp)
        spectrum = frozenset(
            zone_tord(model, zones[i], zones[j]) for i in members for j in members if i < j
        )
        out.append(Node(tuple(zones[i] for i in members), spectrum))
    return out


def contact_clusters(model: LinkModel) -> List[ContactCluster]:
    """Marked arcs linked by outer order above inner order, grouped, with their spectra."""
    an = link_analysis(model)
    arcs = model.arc_order()
    graph = nx.Graph()
    graph.add_nodes_from(arcs)
    for x in range(len(arcs)):
        for y in range(x + 1, len(arcs)):
            i, j = an.arc_pos[arcs[x]], an.arc_pos[arcs[y]]
            if an.outer[i][j] > an.inner[i][j]:
                graph.add_edge(arcs[x], arcs[y], tord=an.value(an.outer[i][j]))
    order = {a: k for k, a in enumerate(arcs)}
    out: List[ContactCluster] = []
    for comp in sorted((c for c in nx.connected_components(graph) if len(c) > 1), key=lambda c: min(order[a] for a in c)):
        members = tuple(sorted(comp, key=order.get))
        spectrum = frozenset(d["tord"] for _, _, d in graph.subgraph(comp).edges(data=True))
        out.append(ContactCluster(members, spectrum))
    return out


def describe_spectrum(spectrum: FrozenSet[ExpQ]) -> str:
    return "{" + ", ".join(format_exp(q) for q in sorted(spectrum)) + "}"
