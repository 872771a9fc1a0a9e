"""Build link models from ruled surfaces between Puiseux arcs, and check them numerically.

    arc g1 = (t, -t^(3/2), 0)
    triangle T1 = ruled(g1, l1)
    glue chain T1 T2 T3
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from .errors import IndeterminateError, ModelValidationError, OracleError, ParseError
from .exponents import ExpQ, format_exp, is_inf
from .linkmodel import exponent_mu, inner_tord, outer_tord
from .models import IDENT_RE, ContactEdge, LinkModel, PancakeSpec, Topology
from .puiseux import PuiseuxArc, RuledFamily, make_arc, parse_series, tord_arc_family, tord_arcs
from .settings import settings

log = logging.getLogger(__name__)

Sampler = Callable[[float], np.ndarray]


class GluingKind(str, Enum):
    CHAIN = "chain"
    CYCLE = "cycle"


@dataclass(frozen=True)
class RuledTriangleSpec:
    name: str
    theta: str
    theta_tilde: str

    @property
    def arcs(self) -> Tuple[str, str]:
        return self.theta, self.theta_tilde


@dataclass(frozen=True)
class Gluing:
    kind: GluingKind
    triangles: Tuple[str, ...]


@dataclass
class GermSurface:
    arcs: Dict[str, PuiseuxArc]
    triangles: Dict[str, RuledTriangleSpec]
    gluing: Gluing

    def family(self, name: str) -> RuledFamily:
        tri = self.triangles[name]
        return RuledFamily(self.arcs[tri.theta], self.arcs[tri.theta_tilde], name)

    def ordered_triangles(self) -> List[RuledTriangleSpec]:
        return [self.triangles[n] for n in self.gluing.triangles]

    def sampler(self, name: str) -> Sampler:
        try:
            arc = self.arcs[name]
        except KeyError:
            raise OracleError(f"unknown arc {name}") from None
        return lambda t: np.array(arc.evaluate(t), dtype=float)


# ---------------------------
# .germ parsing
# ---------------------------

_ARC_RE = re.compile(r"^arc\s+(?P<name>\S+)\s*=\s*\((?P<body>.*)\)\s*$")
_TRIANGLE_RE = re.compile(r"^triangle\s+(?P<name>\S+)\s*=\s*ruled\(\s*(?P<a>[^,\s]+)\s*,\s*(?P<b>[^)\s]+)\s*\)\s*$")
_GLUE_RE = re.compile(r"^glue\s+(?P<kind>\S+)\s+(?P<names>.+)$")


def _split_top(body: str) -> List[Tuple[str, int]]:
    """Split on commas outside parentheses; returns (piece, offset) pairs."""
    out: List[Tuple[str, int]] = []
    depth, start = 0, 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            out.append((body[start:i], start))
            start = i + 1
    out.append((body[start:], start))
    return out


def parse_germ(text: str) -> GermSurface:
    arcs: Dict[str, PuiseuxArc] = {}
    triangles: Dict[str, RuledTriangleSpec] = {}
    gluing: Optional[Gluing] = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _ARC_RE.match(line):
            name = _ident(m.group("name"), n)
            if name in arcs:
                raise ParseError(f"arc {name} defined twice", line=n)
            base = raw.index("(") + 1
            coords = []
            for piece, off in _split_top(m.group("body")):
                try:
                    coords.append(parse_series(piece))
                except ParseError as e:
                    col = None if e.column is None else base + off + e.column
                    raise ParseError(f"arc {name}: {e.message}", line=n, column=col) from None
            try:
                arcs[name] = make_arc(name, coords)
            except (ParseError, IndeterminateError) as e:
                raise ParseError(getattr(e, "message", str(e)), line=n) from None
        elif m := _TRIANGLE_RE.match(line):
            name = _ident(m.group("name"), n)
            a, b = m.group("a"), m.group("b")
            for arc in (a, b):
                if arc not in arcs:
                    raise ParseError(f"triangle {name} uses undefined arc {arc}", line=n)
            if a == b:
                raise ParseError(f"triangle {name} needs two distinct boundary arcs", line=n)
            if name in triangles:
                raise ParseError(f"triangle {name} defined twice", line=n)
            triangles[name] = RuledTriangleSpec(name, a, b)
        elif m := _GLUE_RE.match(line):
            if gluing is not None:
                raise ParseError("glue given twice", line=n)
            try:
                kind = GluingKind(m.group("kind"))
            except ValueError:
                raise ParseError(f"unknown gluing {m.group('kind')!r} (chain or cycle)", line=n) from None
            names = tuple(m.group("names").split())
            for t in names:
                if t not in triangles:
                    raise ParseError(f"glue refers to undefined triangle {t}", line=n)
            gluing = Gluing(kind, names)
        else:
            raise ParseError(f"cannot read {line.split()[0]!r} statement", line=n)
    if gluing is None:
        raise ParseError("missing 'glue' line")
    dims = {a.dim for a in arcs.values()}
    if len(dims) > 1:
        raise ParseError(f"arcs live in different dimensions: {sorted(dims)}")
    return GermSurface(arcs, triangles, gluing)


def _ident(name: str, n: int) -> str:
    if not IDENT_RE.match(name):
        raise ParseError(f"bad identifier {name!r}", line=n)
    return name


def load_germ(path: Path) -> GermSurface:
    return parse_germ(Path(path).read_text(encoding="utf-8"))


# ---------------------------
# Building the link model
# ---------------------------

def _oriented(s: GermSurface) -> List[Tuple[str, str, str]]:
    """(triangle, first arc, last arc) along the gluing, consecutive triangles sharing one arc."""
    tris = s.ordered_triangles()
    if len(tris) == 1:
        t = tris[0]
        if s.gluing.kind == GluingKind.CYCLE:
            raise ModelValidationError(f"a cycle needs at least two triangles, got {t.name} alone")
        return [(t.name, t.theta, t.theta_tilde)]

    first, second = tris[0], tris[1]
    shared = set(first.arcs) & set(second.arcs)
    if not shared:
        raise ModelValidationError(f"triangles {first.name} and {second.name} share no boundary arc")
    end = first.theta_tilde if first.theta_tilde in shared else first.theta
    start = first.theta if end == first.theta_tilde else first.theta_tilde
    out = [(first.name, start, end)]
    for t in tris[1:]:
        prev = out[-1][2]
        if prev not in t.arcs:
            raise ModelValidationError(f"triangle {t.name} does not continue from {prev}")
        out.append((t.name, prev, t.theta_tilde if t.theta == prev else t.theta))
    if s.gluing.kind == GluingKind.CYCLE and out[-1][2] != out[0][1]:
        raise ModelValidationError(f"cycle does not close: {out[-1][0]} ends at {out[-1][2]}, not {out[0][1]}")
    return out


def check_triangle_ne(s: GermSurface, name: str, samples: Optional[int] = None) -> ExpQ:
    """Sample the ruling and check it is a Hölder triangle with constant tord between rulings.

    Returns the triangle exponent.
    """
    samples = samples or settings.NE_SAMPLES
    family = s.family(name)
    e = tord_arcs(family.theta, family.theta_tilde)
    members = [family.member(Fraction(i, samples - 1)) for i in range(samples)]
    for lam in members:
        if lam.norm_order() != 1:
            raise ModelValidationError(f"triangle {name}: ruling arc {lam.name} is not normalized")
    for i in range(samples):
        for j in range(i + 1, samples):
            q = tord_arcs(members[i], members[j])
            if q != e:
                raise ModelValidationError(
                    f"triangle {name} is not normally embedded: tord({members[i].name},{members[j].name})="
                    f"{format_exp(q)} but its exponent is {format_exp(e)}"
                )
    return e


def _warn_interior_contacts(s: GermSurface, oriented: Sequence[Tuple[str, str, str]]) -> None:
    for tname, u, v in oriented:
        family = s.family(tname)
        for a, arc in s.arcs.items():
            if a in (u, v):
                continue
            try:
                inside = tord_arc_family(arc, family)
                edge = max(tord_arcs(arc, s.arcs[u]), tord_arcs(arc, s.arcs[v]))
            except IndeterminateError as e:
                log.debug("skipping interior check of %s against %s: %s", a, tname, e)
                continue
            if inside > edge:
                log.warning(
                    "arc %s is closer to the interior of %s (order %s) than to its boundary arcs (order %s)",
                    a, tname, format_exp(inside), format_exp(edge),
                )


def build_linkmodel(s: GermSurface) -> LinkModel:
    oriented = _oriented(s)
    pancakes = []
    for tname, u, v in oriented:
        e = check_triangle_ne(s, tname)
        pancakes.append(PancakeSpec(tname, (u, v), (e,)))
    topology = Topology.CIRCULAR if s.gluing.kind == GluingKind.CYCLE else Topology.SEGMENT
    beta = min(pc.exponent for pc in pancakes)
    bare = LinkModel(beta, topology, tuple(pancakes))

    arcs = bare.arc_order()
    contacts: List[ContactEdge] = []
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            a, b = arcs[i], arcs[j]
            q = tord_arcs(s.arcs[a], s.arcs[b])
            if q > inner_tord(bare, a, b):
                contacts.append(ContactEdge(a, b, q))
    _warn_interior_contacts(s, oriented)

    model = LinkModel(beta, topology, tuple(pancakes), tuple(contacts))
    mu = exponent_mu(model)
    if mu != beta:
        model = LinkModel(mu, topology, tuple(pancakes), tuple(contacts))
    log.info("built %s", model.describe())
    return model


# ---------------------------
# Numeric oracle
# ---------------------------

@dataclass(frozen=True)
class NumericEstimate:
    pair: Tuple[str, str]
    slope: float
    residual: float
    t_grid: Tuple[float, ...]


def _check_grid(t_grid: Optional[Sequence[float]]) -> List[float]:
    ts = list(settings.T_GRID if t_grid is None else t_grid)
    if len(ts) < 4:
        raise OracleError(f"t grid needs at least 4 points, got {len(ts)}")
    if any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
        raise OracleError("t grid must be positive and strictly decreasing")
    return ts


def estimate_order(a: Sampler, b: Sampler, pair: Tuple[str, str], t_grid: Optional[Sequence[float]] = None) -> NumericEstimate:
    """Least-squares slope of log|a(t) - b(t)| against log t."""
    ts = _check_grid(t_grid)
    d = np.array([np.linalg.norm(a(t) - b(t)) for t in ts])
    if np.all(d == 0):
        return NumericEstimate(pair, math.inf, 0.0, tuple(ts))
    if np.any(d < settings.NUMERIC_FLOOR):
        raise OracleError(f"distance between {pair[0]} and {pair[1]} underflows on the t grid")
    x, y = np.log(ts), np.log(d)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return NumericEstimate(pair, float(slope), residual, tuple(ts))


def numeric_tord(s: GermSurface, a: str, b: str, t_grid: Optional[Sequence[float]] = None) -> NumericEstimate:
    return estimate_order(s.sampler(a), s.sampler(b), (a, b), t_grid)


class PairCheck(BaseModel):
    a: str
    b: str
    symbolic: str
    numeric: float
    residual: float
    ok: bool


class CrossValidationReport(BaseModel):
    ok: bool
    tolerance: float
    checked: int
    mismatches: List[PairCheck] = []
    pairs: List[PairCheck] = []


def _agrees(symbolic: ExpQ, numeric: float, tol: float) -> bool:
    if is_inf(symbolic) or math.isinf(numeric):
        return is_inf(symbolic) and math.isinf(numeric)
    return abs(float(symbolic) - numeric) <= tol


def cross_validate(
    s: GermSurface,
    model: LinkModel,
    tolerance: Optional[float] = None,
    t_grid: Optional[Sequence[float]] = None,
) -> CrossValidationReport:
    """Compare the symbolic outer tord of every marked-arc pair with the numeric slope."""
    tol = settings.TOLERANCE if tolerance is None else tolerance
    arcs = [a for a in model.arc_order() if a in s.arcs]
    pairs: List[PairCheck] = []
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            a, b = arcs[i], arcs[j]
            sym = outer_tord(model, a, b)
            est = numeric_tord(s, a, b, t_grid)
            pairs.append(PairCheck(
                a=a, b=b, symbolic=format_exp(sym), numeric=est.slope,
                residual=est.residual, ok=_agrees(sym, est.slope, tol),
            ))
    bad = [p for p in pairs if not p.ok]
    for p in bad:
        log.warning("tord(%s,%s): symbolic %s, numeric %.4f", p.a, p.b, p.symbolic, p.numeric)
    return CrossValidationReport(ok=not bad, tolerance=tol, checked=len(pairs), mismatches=bad, pairs=pairs)


# ---------------------------
# Complex cusp z^3 = w^2
# ---------------------------

def cusp_arc(phi: float) -> Sampler:
    """The arc of the real cusp surface at angle phi, parametrized by distance to the origin."""
    def at(t: float) -> np.ndarray:
        return np.array([
            t * math.cos(2 * phi),
            t * math.sin(2 * phi),
            t ** 1.5 * math.cos(3 * phi),
            t ** 1.5 * math.sin(3 * phi),
        ])
    return at


def cusp_tord(phi1: float, phi2: float, t_grid: Optional[Sequence[float]] = None) -> NumericEstimate:
    return estimate_order(cusp_arc(phi1), cusp_arc(phi2), (f"cusp[{phi1:g}]", f"cusp[{phi2:g}]"), t_grid)
