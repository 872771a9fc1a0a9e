"""Generalized power series in t with rational exponents, and arcs built from them.

A `Series` wraps a sympy expression in the positive symbol `t` (a finite sum of
terms c*t^e with rational c and e) together with a truncation order: terms at or
beyond the truncation are unknown, as in sympy's `O(t**q)`. Exact series use INF.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from tokenize import TokenError
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import sympy
from sympy import Add, Order, Rational, Symbol, expand, lambdify, nsimplify
from sympy.core.function import AppliedUndef
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .errors import IndeterminateError, ParseError
from .exponents import INF, ExpQ, format_exp, is_inf

T = Symbol("t", positive=True)

Term = Tuple[Fraction, Fraction]  # (exponent, coefficient)


def _rational(x: object) -> Rational:
    f = Fraction(x)
    return Rational(f.numerator, f.denominator)


def _fraction(r: sympy.Expr) -> Fraction:
    return Fraction(int(r.p), int(r.q))


def _exponent(term: sympy.Expr) -> Fraction:
    return _fraction(term.as_coeff_exponent(T)[1])


# ---------------------------
# Series
# ---------------------------

@dataclass(frozen=True)
class Series:
    expr: sympy.Expr = sympy.S.Zero
    truncation: ExpQ = INF

    @classmethod
    def from_expr(cls, expr: sympy.Expr, truncation: ExpQ = INF) -> "Series":
        """Normalize: expand, move any O(t^q) into the truncation and drop terms beyond it."""
        expr = expand(expr)
        order = expr.getO()
        if order is not None:
            truncation = min(truncation, _order_exponent(order))
            expr = expr.removeO()
        if not is_inf(truncation):
            expr = Add(*(term for term in Add.make_args(expr) if term != 0 and _exponent(term) < truncation))
        return cls(expr, truncation)

    @classmethod
    def of(cls, terms: Iterable[Tuple[object, object]], truncation: ExpQ = INF) -> "Series":
        return cls.from_expr(Add(*(_rational(c) * T ** _rational(e) for e, c in terms)), truncation)

    @classmethod
    def zero(cls) -> "Series":
        return cls(sympy.S.Zero, INF)

    def __add__(self, other: "Series") -> "Series":
        return Series.from_expr(self.expr + other.expr, min(self.truncation, other.truncation))

    def __neg__(self) -> "Series":
        return Series(-self.expr, self.truncation)

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def scale(self, c: object) -> "Series":
        c = _rational(c)
        if c == 0:
            # 0 * O(t^q) is still exactly zero
            return Series.zero()
        return Series(expand(c * self.expr), self.truncation)

    @property
    def terms(self) -> Tuple[Term, ...]:
        out = []
        for term in Add.make_args(self.expr):
            if term == 0:
                continue
            c, e = term.as_coeff_exponent(T)
            out.append((_fraction(e), _fraction(c)))
        return tuple(sorted(out))

    @property
    def is_exact(self) -> bool:
        return is_inf(self.truncation)

    def as_expr(self) -> sympy.Expr:
        """The sympy expression, with `O(t**q)` when truncated."""
        if self.is_exact:
            return self.expr
        return self.expr + Order(T ** _rational(self.truncation))

    def leading_exponent(self) -> ExpQ:
        """Order of the series; INF for the exact zero series."""
        if self.expr != 0:
            return _fraction(self.expr.leadterm(T)[1])
        if self.is_exact:
            return INF
        raise IndeterminateError(
            f"series vanishes up to O(t^{format_exp(self.truncation)}); order undecided"
        )

    def order_bound(self) -> Tuple[ExpQ, bool]:
        """(q, known): the order if known, else a lower bound from the truncation."""
        if self.expr != 0:
            return self.leading_exponent(), True
        return self.truncation, self.is_exact

    @cached_property
    def _numeric(self) -> Callable[[float], float]:
        return lambdify(T, self.expr, "math")

    def evaluate(self, t: float) -> float:
        return float(self._numeric(t))

    def __str__(self) -> str:
        parts: List[str] = [_format_term(e, c) for e, c in self.terms]
        if not self.is_exact:
            parts.append(f"+ O({_format_power(self.truncation)})")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += f" {p}" if p.startswith(("+ ", "- ")) else f" + {p}"
        return out


def _order_exponent(order: Order) -> ExpQ:
    if any(p != 0 for p in order.point):
        raise ParseError(f"{order} is not a truncation at t = 0")
    c, e = order.expr.as_coeff_exponent(T)
    if c.has(T) or not e.is_Rational:
        raise ParseError(f"truncation {order} is not O(t^q) with rational q")
    return _fraction(e)


def _format_power(e: ExpQ) -> str:
    if e == 1:
        return "t"
    f = Fraction(e)
    if f.denominator == 1:
        return f"t^{f.numerator}" if f.numerator >= 0 else f"t^({f.numerator})"
    return f"t^({f.numerator}/{f.denominator})"


def _format_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_term(e: Fraction, c: Fraction) -> str:
    sign = "- " if c < 0 else ""
    mag = abs(c)
    if e == 0:
        body = _format_coef(mag)
    elif mag == 1:
        body = _format_power(e)
    else:
        body = f"{_format_coef(mag)}*{_format_power(e)}"
    return f"{sign}{body}" if sign else body


# ---------------------------
# Series grammar
# ---------------------------

_TRANSFORMS = standard_transformations + (convert_xor,)
_DECIMAL_EXP_RE = re.compile(r"\^\s*\(?\s*-?(\d+\.\d*)")


def _column_of(name: str, text: str) -> Optional[int]:
    m = re.search(rf"(?<![A-Za-z0-9_]){re.escape(name)}(?![A-Za-z0-9_])", text)
    return m.start() + 1 if m else None


def _checked(expr: sympy.Expr, text: str) -> sympy.Expr:
    """Rebuild `expr` as a sum of rational c*t^e, rejecting everything else."""
    for f in sorted(expr.atoms(AppliedUndef), key=str):
        name = f.func.__name__
        raise ParseError(f"unknown function {name!r}", column=_column_of(name, text))
    for s in sorted(expr.free_symbols - {T}, key=str):
        raise ParseError(f"unknown symbol {s.name!r}", column=_column_of(s.name, text))
    terms = []
    for term in Add.make_args(expand(expr)):
        c, e = term.as_coeff_exponent(T)
        if e.is_Float:
            m = _DECIMAL_EXP_RE.search(text)
            raise ParseError(
                f"non-rational exponent {m.group(1) if m else e}: use int or int/int",
                column=m.start(1) + 1 if m else None,
            )
        if c.has(T) or not e.is_Rational:
            raise ParseError(f"{term} is not a term c*t^q")
        if c.is_Float:
            c = nsimplify(c, rational=True)
        if not c.is_Rational:
            raise ParseError(f"coefficient {c} is not rational")
        terms.append(c * T ** e)
    return Add(*terms)


def parse_series(text: str) -> Series:
    """Parse a sum of terms c*t^q in sympy syntax (`^` allowed), with an optional `O(t^q)` truncation."""
    if not text.strip():
        raise ParseError("empty series", column=1)
    try:
        expr = parse_expr(text, local_dict={"t": T}, transformations=_TRANSFORMS)
    except (SyntaxError, TokenError, TypeError, ValueError) as e:
        raise ParseError(f"cannot read series {text.strip()!r}: {e}") from None
    if not isinstance(expr, sympy.Expr):
        raise ParseError(f"cannot read series {text.strip()!r}")
    order = expr.getO()
    truncation = INF if order is None else _order_exponent(order)
    return Series.from_expr(_checked(expr.removeO(), text), truncation)


# ---------------------------
# Arcs
# ---------------------------

@dataclass(frozen=True)
class PuiseuxArc:
    name: str
    coords: Tuple[Series, ...]

    @property
    def dim(self) -> int:
        return len(self.coords)

    def norm_order(self) -> ExpQ:
        return min(c.leading_exponent() for c in self.coords)

    def check_normalized(self) -> None:
        """Arcs must satisfy |gamma(t)| ~ t."""
        q = self.norm_order()
        if q != 1:
            raise ParseError(f"arc {self.name}: |gamma(t)| has order {format_exp(q)}, expected 1")

    def __sub__(self, other: "PuiseuxArc") -> Tuple[Series, ...]:
        if self.dim != other.dim:
            raise ValueError(f"arcs {self.name} and {other.name} live in different dimensions")
        return tuple(a - b for a, b in zip(self.coords, other.coords))

    def evaluate(self, t: float) -> List[float]:
        return [c.evaluate(t) for c in self.coords]

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def make_arc(name: str, coords: Sequence[Series]) -> PuiseuxArc:
    arc = PuiseuxArc(name, tuple(coords))
    arc.check_normalized()
    return arc


def vector_order(diff: Sequence[Series], what: str = "difference") -> ExpQ:
    """Leading exponent of |v(t)| for a vector of series.

    No cancellation happens across coordinates, so this is the minimum of the
    coordinate orders; a truncated zero coordinate only bounds its order below.
    """
    known: List[ExpQ] = []
    bounds: List[ExpQ] = []
    for s in diff:
        q, exact = s.order_bound()
        (known if exact else bounds).append(q)
    best = min(known, default=INF)
    if bounds and min(bounds) < best:
        raise IndeterminateError(
            f"{what} vanishes up to O(t^{format_exp(min(bounds))}); order undecided"
        )
    if is_inf(best) and bounds:
        raise IndeterminateError(f"{what} vanishes to its truncation order")
    return best


def tord_arcs(a: PuiseuxArc, b: PuiseuxArc) -> ExpQ:
    """Tangency order: leading exponent of |a(t) - b(t)|; INF for identical arcs."""
    return vector_order(a - b, f"{a.name} - {b.name}")


# ---------------------------
# Ruled families
# ---------------------------

@dataclass(frozen=True)
class RuledFamily:
    """Straight-line family lambda_s = (1-s)*theta + s*theta_tilde, s in [0, 1]."""

    theta: PuiseuxArc
    theta_tilde: PuiseuxArc
    name: str = field(default="")

    def member(self, s: Fraction) -> PuiseuxArc:
        s = Fraction(s)
        coords = tuple(a.scale(1 - s) + b.scale(s) for a, b in zip(self.theta.coords, self.theta_tilde.coords))
        return PuiseuxArc(f"{self.name or 'family'}[{s}]", coords)


def _critical_parameters(d: Sequence[Series], e: Sequence[Series]) -> List[Fraction]:
    # coefficients of d - s*e vanish where d_r = s * e_r
    out = {Fraction(0), Fraction(1)}
    for ds, es in zip(d, e):
        dc = dict(ds.terms)
        for r, ec in es.terms:
            s = dc.get(r, Fraction(0)) / ec
            if 0 <= s <= 1:
                out.add(s)
    return sorted(out)


def tord_arc_family(a: PuiseuxArc, family: RuledFamily) -> ExpQ:
    """sup over s in [0, 1] of tord(a, lambda_s).

    With D = a - theta and E = theta_tilde - theta, the difference is D - s*E and
    each coefficient is affine in s. The order only rises above its generic value
    where a leading coefficient vanishes, so the supremum is attained at one of the
    finitely many roots d_r / e_r, or at a generic parameter.
    """
    d = a - family.theta
    e = family.theta_tilde - family.theta
    candidates = _critical_parameters(d, e)
    # a parameter strictly between candidates is generic
    generic = (candidates[0] + candidates[1]) / 2 if len(candidates) > 1 else Fraction(1, 2)
    best: ExpQ = Fraction(0)
    for s in candidates + [generic]:
        diff = [ds - es.scale(s) for ds, es in zip(d, e)]
        q = vector_order(diff, f"{a.name} - {family.name or 'family'}[{s}]")
        best = max(best, q)
    return best
