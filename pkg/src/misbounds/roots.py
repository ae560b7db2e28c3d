"""Bracketed scalar root finding: bisection, then Newton with bisection fallback."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable


class NoSignChange(ArithmeticError):
    pass


@dataclass(frozen=True)
class Root:
    x: float
    lo: float
    hi: float
    fx: float
    iterations: int


def _sign(v: float) -> int:
    return int(v > 0) - int(v < 0)


def bisect_newton(
    f: Callable[[float], float],
    fprime: Callable[[float], float] | None,
    lo: float,
    hi: float,
    *,
    xtol: float,
    newton_width: float | None = None,
    maxiter: int = 400,
) -> Root:
    """Find a root of ``f`` inside the sign-change bracket ``[lo, hi]``.

    Bisection runs until the bracket is narrower than ``newton_width``; after
    that Newton steps are taken from the current iterate whenever they stay
    inside the bracket, otherwise the bracket is bisected.  The bracket is
    kept straddling a sign change throughout and the returned ``lo``/``hi``
    are at most ``xtol`` apart unless ``f`` hit an exact zero.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return Root(lo, lo, lo, 0.0, 0)
    if fhi == 0.0:
        return Root(hi, hi, hi, 0.0, 0)
    if _sign(flo) == _sign(fhi) or math.isnan(flo) or math.isnan(fhi):
        raise NoSignChange(f"f({lo!r})={flo!r} and f({hi!r})={fhi!r} do not bracket a root")
    if newton_width is None:
        newton_width = hi - lo
    if fprime is None:
        newton_width = 0.0

    x, fx = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
    for it in range(1, maxiter + 1):
        width = hi - lo
        if width <= xtol:
            return Root(x, lo, hi, fx, it)
        cand = None
        if width <= newton_width:
            d = fprime(x)
            if d != 0.0 and math.isfinite(d):
                step = fx / d
                trial = x - step
                if lo < trial < hi:
                    cand = trial
                    if abs(step) < 0.5 * xtol:
                        # converged: confirm with a bracket of width xtol
                        a = max(lo, trial - 0.5 * xtol)
                        b = min(hi, trial + 0.5 * xtol)
                        fa = f(a) if a > lo else flo
                        fb = f(b) if b < hi else fhi
                        if fa == 0.0:
                            return Root(a, a, a, 0.0, it)
                        if fb == 0.0:
                            return Root(b, b, b, 0.0, it)
                        if _sign(fa) != _sign(fb):
                            return Root(trial, a, b, f(trial), it)
                        if _sign(fa) == _sign(flo):
                            lo, flo = b, fb
                        else:
                            hi, fhi = a, fa
                        cand = None
        if cand is None:
            cand = 0.5 * (lo + hi)
            if cand <= lo or cand >= hi:
                return Root(x, lo, hi, fx, it)
        fc = f(cand)
        if fc == 0.0:
            return Root(cand, cand, cand, 0.0, it)
        if _sign(fc) == _sign(flo):
            lo, flo = cand, fc
        else:
            hi, fhi = cand, fc
        x, fx = cand, fc
    return Root(x, lo, hi, fx, maxiter)
