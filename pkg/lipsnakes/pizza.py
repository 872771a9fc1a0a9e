"""Pizza decompositions of the distance-order functions on a pancake.

For pancakes X_j, X_k the function f_k(x) = tord(x, X_k) is described on X_j
by atoms: ramps, along which the order moves monotonically and the width of a
level q is q itself, and constant pieces with their own width.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .errors import PizzaError
from .exponents import INF, ExpQ, format_exp
from .linkmodel import LinkAnalysis, LinkPoint, PointKind, link_analysis, tord_to_pancake
from .models import LinkModel, PancakeSpec
from .zones import horn_components

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrderAtom:
    start: LinkPoint
    end: LinkPoint
    q_start: ExpQ
    q_end: ExpQ
    width: Optional[ExpQ] = None  # None on a ramp: level q has width q

    @property
    def constant(self) -> bool:
        return self.width is not None


@dataclass(frozen=True)
class OrderFunction:
    pancake: str
    target: str
    atoms: Tuple[OrderAtom, ...]

    def breakpoints(self) -> List[Tuple[LinkPoint, ExpQ]]:
        out = [(self.atoms[0].start, self.atoms[0].q_start)]
        out.extend((a.end, a.q_end) for a in self.atoms)
        return out


@dataclass(frozen=True)
class PizzaSlice:
    start: LinkPoint
    end: LinkPoint
    q_start: ExpQ
    q_end: ExpQ
    a: int
    b: ExpQ
    atoms: Tuple[OrderAtom, ...] = field(default=(), compare=False, repr=False)

    @property
    def lo(self) -> ExpQ:
        return min(self.q_start, self.q_end)

    @property
    def hi(self) -> ExpQ:
        return max(self.q_start, self.q_end)

    @property
    def is_point(self) -> bool:
        return self.q_start == self.q_end

    @property
    def supporting_end(self) -> str:
        if self.is_point:
            return "both"
        return "start" if self.q_start > self.q_end else "end"

    def width(self, q: ExpQ) -> ExpQ:
        return q if self.a == 1 else self.b

    @property
    def interval(self) -> str:
        return f"[{self.start.label}, {self.end.label}]"

    @property
    def q_text(self) -> str:
        if self.is_point:
            return "{" + format_exp(self.lo) + "}"
        return f"[{format_exp(self.lo)}, {format_exp(self.hi)}]"


@dataclass(frozen=True)
class Pizza:
    pancake: str
    target: str
    slices: Tuple[PizzaSlice, ...]
    minimal: bool = False


@dataclass(frozen=True)
class MultiSlice:
    start: LinkPoint
    end: LinkPoint
    orders: Tuple[Tuple[str, ExpQ, ExpQ], ...]  # (target pancake, order at start, order at end)


@dataclass(frozen=True)
class Multipizza:
    pancake: str
    slices: Tuple[MultiSlice, ...]

    @property
    def boundaries(self) -> Tuple[LinkPoint, ...]:
        return (self.slices[0].start,) + tuple(s.end for s in self.slices)


@dataclass(frozen=True)
class RelativeProfile:
    target: str
    generic: Tuple[LinkPoint, ...]
    m: Tuple[int, ...]
    b_beta: Tuple[LinkPoint, ...]
    h_beta: Tuple[LinkPoint, ...]
    segments: Tuple[Tuple[LinkPoint, ...], ...]
    nodal_zones: Tuple[Tuple[LinkPoint, ...], ...]

    def m_at(self, point: LinkPoint) -> int:
        return self.m[self.generic.index(point)]


@dataclass(frozen=True)
class RelativeStructure:
    pancake: str
    profiles: Tuple[RelativeProfile, ...]

    def profile(self, target: str) -> RelativeProfile:
        for p in self.profiles:
            if p.target == target:
                return p
        raise KeyError(target)

    def total_m(self, point: LinkPoint) -> int:
        return sum(p.m_at(point) for p in self.profiles)


# ---------------------------
# Order functions
# ---------------------------

def _pancake(model: LinkModel, pid: str) -> PancakeSpec:
    try:
        return model.pancake(pid)
    except KeyError:
        raise PizzaError(f"unknown pancake {pid}") from None


def _require_beta_pancake(model: LinkModel, pc: PancakeSpec) -> None:
    if pc.exponent != model.beta:
        raise PizzaError(
            f"pancake {pc.id} has exponent {format_exp(pc.exponent)}; pizzas need exponent beta={format_exp(model.beta)}"
        )


def _generic(pid: str, u: str, v: str, e: ExpQ) -> LinkPoint:
    return LinkPoint(PointKind.GENERIC, "", pid, (u, v), e)


def order_function(model: LinkModel, j: str, k: str) -> OrderFunction:
    """f_k on X_j: a ramp from each endpoint whose order exceeds the interval exponent."""
    pc = _pancake(model, j)
    _pancake(model, k)
    _require_beta_pancake(model, pc)
    first, last = LinkPoint.marked(pc.first), LinkPoint.marked(pc.last)
    if j == k:
        return OrderFunction(j, k, (OrderAtom(first, last, INF, INF, pc.exponent),))

    atoms: List[OrderAtom] = []
    for u, v, e in pc.intervals():
        tu, tv = tord_to_pancake(model, u, k), tord_to_pancake(model, v, k)
        U, V = LinkPoint.marked(u), LinkPoint.marked(v)
        if tu > e and tv > e:
            g = _generic(j, u, v, e)
            atoms.append(OrderAtom(U, g, tu, e))
            atoms.append(OrderAtom(g, V, e, tv))
        elif tu > e or tv > e:
            atoms.append(OrderAtom(U, V, tu, tv))
        else:
            q = max(min(e, tu), min(e, tv))
            atoms.append(OrderAtom(U, V, q, q, q))
    return OrderFunction(j, k, tuple(atoms))


# ---------------------------
# Slices
# ---------------------------

def _slice_of(atoms: Sequence[OrderAtom]) -> Optional[PizzaSlice]:
    """The pizza slice spanned by consecutive atoms, or None when they do not form one."""
    values = [atoms[0].q_start] + [a.q_end for a in atoms]
    rising = all(x <= y for x, y in zip(values, values[1:]))
    falling = all(x >= y for x, y in zip(values, values[1:]))
    if not (rising or falling):
        return None
    start, end = atoms[0].start, atoms[-1].end
    if values[0] == values[-1]:
        widths = [a.width for a in atoms if a.width is not None]
        return PizzaSlice(start, end, values[0], values[-1], 0, min(widths), tuple(atoms))
    for a in atoms:
        if a.constant and a.width < a.q_start:
            return None
    return PizzaSlice(start, end, values[0], values[-1], 1, 0, tuple(atoms))


def elementary_pizza(model: LinkModel, j: str, k: str) -> Pizza:
    fn = order_function(model, j, k)
    return Pizza(j, k, tuple(_slice_of([a]) for a in fn.atoms))


def minimal_pizza(pizza: Pizza) -> Pizza:
    """Merge adjacent slices left to right while the union is a slice; repeat until stable."""
    groups = [list(s.atoms) for s in pizza.slices]
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(groups) - 1:
            if _slice_of(groups[i] + groups[i + 1]) is not None:
                groups[i] = groups[i] + groups[i + 1]
                del groups[i + 1]
                changed = True
            else:
                i += 1
    return Pizza(pizza.pancake, pizza.target, tuple(_slice_of(g) for g in groups), minimal=True)


def pizza_decomposition(model: LinkModel, j: str, k: str) -> Pizza:
    pizza = minimal_pizza(elementary_pizza(model, j, k))
    log.debug("pizza of f_%s on %s: %d slices", k, j, len(pizza.slices))
    return pizza


# ---------------------------
# Multipizza
# ---------------------------

def _breakable_points(pc: PancakeSpec) -> List[LinkPoint]:
    out = [LinkPoint.marked(pc.first)]
    for u, v, e in pc.intervals():
        out.append(_generic(pc.id, u, v, e))
        out.append(LinkPoint.marked(v))
    return out


def _cuts(points: List[LinkPoint], pizza: Pizza) -> List[int]:
    idx = 0
    out = [0, len(points) - 1]
    for s in pizza.slices[:-1]:
        idx = points.index(s.end, idx + 1)
        out.append(idx)
    return out


def multipizza(model: LinkModel, j: str) -> Multipizza:
    """Common refinement of the minimal pizzas of every f_k on X_j."""
    pc = _pancake(model, j)
    points = _breakable_points(pc)
    cuts = set()
    for other in model.pancakes:
        cuts.update(_cuts(points, pizza_decomposition(model, j, other.id)))
    order = sorted(cuts)

    def value(i: int, k: str) -> ExpQ:
        return INF if k == j else tord_to_pancake(model, points[i], k)

    slices = []
    for a, b in zip(order, order[1:]):
        orders = tuple((other.id, value(a, other.id), value(b, other.id)) for other in model.pancakes)
        slices.append(MultiSlice(points[a], points[b], orders))
    return Multipizza(j, tuple(slices))


# ---------------------------
# Relative segments and nodal zones
# ---------------------------

def _runs(flags: Sequence[bool], keys: Sequence[object]) -> List[List[int]]:
    """Maximal runs of flagged consecutive indices sharing a key."""
    runs: List[List[int]] = []
    for i, f in enumerate(flags):
        if not f:
            continue
        if runs and runs[-1][-1] == i - 1 and keys[runs[-1][-1]] == keys[i]:
            runs[-1].append(i)
        else:
            runs.append([i])
    return runs


def relative_structure(model: LinkModel, j: str) -> RelativeStructure:
    """m_l, B_beta, H_beta and the segments and nodal zones of G(X_j) relative to each X_l."""
    pc = _pancake(model, j)
    _require_beta_pancake(model, pc)
    an = link_analysis(model)
    span = an.pancake_positions(j)
    along = an.pancake_inner(span)
    b = an.beta_rank
    in_g = set(an.pancake_generic(j))
    generic = [i in in_g for i in span]
    pts = [an.graph.points[i] for i in span]

    profiles = []
    for other in model.pancakes:
        l = other.id
        m = [1 if l == j else int(an.rank[tord_to_pancake(model, p, l)] > b) for p in pts]
        kinds = [_relative_kind(an, span, along, m, x) if generic[x] else None for x in range(len(span))]
        seg_runs = _runs([k == "segment" for k in kinds], m)
        nod_runs = _runs([k == "nodal" for k in kinds], [0] * len(span))
        g_idx = [x for x in range(len(span)) if generic[x]]
        profiles.append(
            RelativeProfile(
                target=l,
                generic=tuple(pts[x] for x in g_idx),
                m=tuple(m[x] for x in g_idx),
                b_beta=tuple(pts[x] for x in g_idx if not m[x]),
                h_beta=tuple(pts[x] for x in g_idx if m[x]),
                segments=tuple(tuple(pts[x] for x in r) for r in seg_runs),
                nodal_zones=tuple(tuple(pts[x] for x in r) for r in nod_runs),
            )
        )
    return RelativeStructure(j, tuple(profiles))


def _relative_kind(an: LinkAnalysis, span: List[int], along: Dict[Tuple[int, int], int], m: List[int], x: int) -> str:
    p = an.graph.points[span[x]]
    if p.kind == PointKind.GENERIC and an.rank[p.depth] == an.beta_rank:
        return "segment"
    ball = [y for y in range(len(span)) if along[(span[x], span[y])] > an.beta_rank]
    lo, hi = min(ball), max(ball)
    seen = {m[y] for y in ball}
    if lo > 0:
        seen.add(m[lo - 1])
    if hi < len(span) - 1:
        seen.add(m[hi + 1])
    return "segment" if len(seen) == 1 else "nodal"


def multiplicity_by_pancakes(model: LinkModel, point: LinkPoint) -> int:
    """Sum of m_k over all pancakes at a generic point of its pancake."""
    rel = relative_structure(model, point.pancake)
    return rel.total_m(point)


def strand_pancakes(model: LinkModel, point: LinkPoint) -> Tuple[FrozenSet[str], ...]:
    """The pancakes met by each horn strand at `point`, one set per strand.

    A strand through a gluing arc meets both pancakes glued there, so the sum
    of m_k equals the multiplicity only when every set is a singleton.
    """
    an = link_analysis(model)
    out = []
    for strand in horn_components(model, point):
        met = set()
        for p in strand:
            met.update(an.graph.owners[an.graph.position[p]])
        out.append(frozenset(met))
    return tuple(out)
