"""Golden-section minimization of a convex scalar function on an interval."""

from __future__ import annotations

from typing import Callable

import numpy as np

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section_min(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12
) -> tuple[float, float]:
    """Minimize a convex ``f`` on ``[lo, hi]``; return ``(argmin, min value)``.

    The bracket shrinks until its width is below ``tol``.  Endpoints are
    evaluated and included as candidates, so monotone (or constant) functions
    resolve to the correct boundary point.
    """
    if not hi > lo:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    candidates = [(f(lo), lo), (f(hi), hi), (f(x), x)]
    fbest, xbest = min(candidates, key=lambda t: t[0])
    return xbest, fbest
