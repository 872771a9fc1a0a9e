"""Exponents in Q extended by +inf.

Finite exponents are `Fraction`s; the single infinite value is `math.inf`.
Fraction and float compare correctly, so plain `min`/`max`/`<` work on mixed values.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

from .errors import ParseError

ExpQ = Union[Fraction, float]

INF: float = math.inf

_EXP_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def is_inf(q: ExpQ) -> bool:
    return isinstance(q, float) and math.isinf(q) and q > 0


def exp(value: Union[int, str, Fraction, float]) -> ExpQ:
    """Normalize an int, Fraction, "p/q" string or inf into an ExpQ."""
    if isinstance(value, str):
        return parse_exp(value)
    if isinstance(value, float):
        if is_inf(value):
            return INF
        raise ValueError(f"exponents must be rational, got float {value!r}")
    return Fraction(value)


def parse_exp(text: str) -> ExpQ:
    s = text.strip()
    if s.lower() in {"inf", "infinity", "oo"}:
        return INF
    m = _EXP_RE.match(s)
    if not m:
        raise ParseError(f"bad exponent {text!r} (expected int, int/int or inf)")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise ParseError(f"zero denominator in exponent {text!r}")
    return Fraction(num, den)


def format_exp(q: ExpQ) -> str:
    if is_inf(q):
        return "inf"
    f = Fraction(q)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
