"""Exact rational parsing/formatting for spec files and the CLI.

Decimal strings are converted exactly ("0.25" -> 1/4); rational strings use
a slash ("1/3").  format_rational is the canonical emitter, so files
round-trip byte-identically.
"""

from fractions import Fraction


def parse_rational(value) -> Fraction:
    """Parse "1/2", "0.25", "-3", ints, or Fractions into an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError("refusing float %r: pass a string or Fraction" % value)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError("not a rational: %r" % (value,)) from exc


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return "%d/%d" % (q.numerator, q.denominator)
