"""Exact rational helpers for threshold comparisons."""

from __future__ import annotations

import math
from fractions import Fraction

__all__ = ["as_fraction", "ceil_frac", "floor_frac", "round_half_up"]


def as_fraction(x: float | int | str | Fraction) -> Fraction:
    """Decimal reading of ``x``: ``0.1`` becomes exactly ``1/10``, not the binary float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


def ceil_frac(x: Fraction) -> int:
    return math.ceil(x)


def floor_frac(x: Fraction) -> int:
    return math.floor(x)


def round_half_up(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))
