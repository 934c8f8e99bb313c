"""Exact rational helpers and the ``"p/q"`` string form used in files."""
from __future__ import annotations

from fractions import Fraction
from math import lcm


def to_fraction(x) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string.  Floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not s or any(c in s for c in ".eE"):
            raise ValueError(f"not a rational string: {x!r}")
        return Fraction(s)
    raise TypeError(f"cannot read {type(x).__name__} as an exact rational")


def fmt(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def common_denominator(values) -> int:
    d = 1
    for v in values:
        d = lcm(d, Fraction(v).denominator)
    return d


def parse_vector(text: str) -> tuple:
    """``"1/2,-1"`` -> ``(Fraction(1, 2), Fraction(-1))``; empty string is the empty vector."""
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        text = text[1:-1]
    if not text:
        return ()
    return tuple(to_fraction(p) for p in text.split(","))
