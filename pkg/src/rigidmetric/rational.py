"""Exact nonnegative rationals and their "p/q" text form."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

RatLike = Union[Fraction, int, str]


def parse_rat(text: RatLike) -> Fraction:
    """Parse ``"p/q"`` or ``"n"`` into a nonnegative Fraction.

    Strings must be in lowest terms; ``"4/2"`` is rejected rather than reduced.
    """
    if isinstance(text, Fraction):
        value = text
    elif isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    elif isinstance(text, int):
        value = Fraction(text)
    elif isinstance(text, str):
        s = text.strip()
        if "/" in s:
            num_s, den_s = s.split("/", 1)
            if not (num_s.isdigit() and den_s.isdigit()):
                raise ValueError(f"malformed rational {text!r}")
            num, den = int(num_s), int(den_s)
            if den == 0:
                raise ValueError(f"zero denominator in {text!r}")
            if math.gcd(num, den) != 1:
                raise ValueError(f"rational {text!r} is not in lowest terms")
            value = Fraction(num, den)
        else:
            if not s.isdigit():
                raise ValueError(f"malformed rational {text!r}")
            value = Fraction(int(s))
    else:
        raise ValueError(f"not a rational: {text!r}")
    if value < 0:
        raise ValueError(f"negative rational {text!r}")
    return value


def render_rat(value: RatLike) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_grid(text: str | Iterable[RatLike]) -> tuple[Fraction, ...]:
    """Comma-separated (or iterable) grid of positive rationals, sorted, deduplicated."""
    items = text.split(",") if isinstance(text, str) else list(text)
    values = sorted({parse_rat(item) for item in items if str(item).strip()})
    if not values:
        raise ValueError("empty grid")
    if values[0] <= 0:
        raise ValueError("grid values must be positive")
    return tuple(values)


def common_denominator(values: Iterable[Fraction]) -> int:
    den = 1
    for v in values:
        den = math.lcm(den, v.denominator)
    return den
