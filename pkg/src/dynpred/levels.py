"""Delay levels and prediction windows shared by the leveled algorithms."""

from __future__ import annotations


def doubling_levels(limit: int, include_small: bool = True) -> list[int]:
    """Levels 0, 1, 2, 4, ... up to the first power of two >= limit.

    With ``include_small=False`` the levels start at 2.
    """
    levels = [0, 1] if include_small else []
    p = 2
    while True:
        levels.append(p)
        if p >= limit:
            return levels
        p *= 2


def window(t: int, d: int, T: int) -> tuple[int, int]:
    """Positions [t-d, t+d] clipped to [1, T] (may be empty)."""
    return max(1, t - d), min(T, t + d)
