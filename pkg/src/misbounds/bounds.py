"""Upper and lower bounds on the critical degree and density thresholds."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .analytic import entropy
from .roots import bisect_newton

X_THRESHOLD = 4.0 / math.e
Y_THRESHOLD = 4.0 * math.sqrt(2.0) / math.e
DEFAULT_X = 1.6
DEFAULT_Y = 2.2

EXPANSION_LABELS = (
    "ln c",
    "-ln ln c",
    "1",
    "-ln 2",
    "ln ln c / ln c",
    "-(1 - ln 2) / ln c",
    "(ln ln c)^2 / (2 (ln c)^2)",
    "-(2 - ln 2) ln ln c / (ln c)^2",
    "(3 + (ln 2)^2 - 4 ln 2) / (2 (ln c)^2)",
)


class ThresholdError(ValueError):
    """A constant is at or below the value its theorem requires."""


@dataclass(frozen=True)
class BoundsReport:
    alpha: float | None = None
    c: float | None = None
    x: float | None = None
    y: float | None = None
    c_upper_exact: float | None = None
    c_upper_simple: float | None = None
    c_lower: float | None = None
    alpha_upper: float | None = None
    alpha_lower: float | None = None
    alpha_first_moment: float | None = None
    w_value: float | None = None
    expansion_value: float | None = None
    expansion_terms: list[float] = field(default_factory=list)
    forced: bool = False


def lambert_w(z: float) -> float:
    """Principal branch of Lambert W for ``z > 0`` by Halley iteration."""
    if not z > 0.0 or not math.isfinite(z):
        raise ValueError(f"lambert_w needs a finite z > 0, got {z!r}")
    w = math.log1p(z)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= 4.0 * math.ulp(w):
            break
    # polish: take the neighbouring double with the smallest residual
    best = min(
        (w, math.nextafter(w, -math.inf), math.nextafter(w, math.inf)),
        key=lambda v: abs(v * math.exp(v) - z),
    )
    return best


def c_upper(alpha: float) -> tuple[float, float]:
    """First-moment degree bound, in exact and simplified form.

    The exact form is where the expected number of independent sets of
    density ``alpha`` stops growing; the simplified form dominates it.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"c_upper needs 0 < alpha < 1, got {alpha!r}")
    exact = 2.0 * float(entropy(alpha)) / -math.log1p(-alpha * alpha)
    simple = 2.0 * (math.log(1.0 / alpha) + 1.0) / alpha
    return exact, simple


def _check_constant(name, value, threshold, force):
    if value > threshold:
        return False
    if not force:
        raise ThresholdError(f"{name}={value!r} must exceed {threshold:.6f}")
    warnings.warn(f"{name}={value!r} is not above {threshold:.6f}; bound is not a theorem", stacklevel=3)
    return True


def c_lower(alpha: float, x: float = DEFAULT_X, *, force: bool = False) -> float:
    """Second-moment lower bound on the critical degree."""
    if not 0.0 < alpha < 0.5:
        raise ValueError(f"c_lower needs 0 < alpha < 1/2, got {alpha!r}")
    _check_constant("x", x, X_THRESHOLD, force)
    return c_upper(alpha)[1] - x / math.sqrt(alpha)


def alpha_upper(c: float) -> float:
    """Root of ``c = 2 (ln(1/alpha) + 1) / alpha`` via Lambert W."""
    return 2.0 / c * lambert_w(math.e * c / 2.0)


def alpha_bounds(c: float, y: float = DEFAULT_Y, *, force: bool = False) -> tuple[float, float]:
    """Lower and upper bounds on the critical density at degree ``c``."""
    if not c >= 2.0:
        raise ValueError(f"alpha_bounds needs c >= 2, got {c!r}")
    _check_constant("y", y, Y_THRESHOLD, force)
    hi = alpha_upper(c)
    back = c_upper(hi)[1] if hi < 1.0 else 2.0 * (math.log(1.0 / hi) + 1.0) / hi
    if abs(back - c) > 1e-10 * c:
        raise ArithmeticError(f"alpha_upper({c!r}) fails its defining equation: {back!r}")
    lo = hi - y * math.sqrt(math.log(c)) / c**1.5
    return lo, hi


def w_expansion(c: float, order: int = 9) -> tuple[float, list[float]]:
    """Partial sum of the large-``c`` expansion of ``W(e c / 2)``."""
    if not c > math.e:
        raise ValueError(f"w_expansion needs c > e, got {c!r}")
    if not 1 <= order <= len(EXPANSION_LABELS):
        raise ValueError(f"order must be between 1 and {len(EXPANSION_LABELS)}")
    L = math.log(c)
    LL = math.log(L)
    ln2 = math.log(2.0)
    terms = [
        L,
        -LL,
        1.0,
        -ln2,
        LL / L,
        -(1.0 - ln2) / L,
        0.5 * LL**2 / L**2,
        -(2.0 - ln2) * LL / L**2,
        (3.0 + ln2**2 - 4.0 * ln2) / (2.0 * L**2),
    ][:order]
    return math.fsum(terms), terms


def _first_moment_rate(alpha: float, c: float) -> float:
    return float(entropy(alpha)) + 0.5 * c * math.log1p(-alpha * alpha)


def first_moment_alpha(c: float) -> float:
    """Density at which the expected number of independent sets turns over."""
    if not c > 0.0:
        raise ValueError(f"first_moment_alpha needs c > 0, got {c!r}")
    f = lambda a: _first_moment_rate(a, c)
    fp = lambda a: math.log1p(-a) - math.log(a) - c * a / (1.0 - a * a)
    lo, hi = 1e-12, 1.0 - 1e-12
    root = bisect_newton(f, fp, lo, hi, xtol=1e-15, newton_width=1e-3)
    return root.x


def bounds_for_alpha(alpha: float, x: float = DEFAULT_X, *, force: bool = False) -> BoundsReport:
    exact, simple = c_upper(alpha)
    forced = x <= X_THRESHOLD
    return BoundsReport(
        alpha=alpha,
        x=x,
        c_upper_exact=exact,
        c_upper_simple=simple,
        c_lower=c_lower(alpha, x, force=force),
        forced=forced,
    )


def bounds_for_degree(c: float, y: float = DEFAULT_Y, *, force: bool = False) -> BoundsReport:
    lo, hi = alpha_bounds(c, y, force=force)
    report = dict(
        c=c,
        y=y,
        alpha_upper=hi,
        alpha_lower=lo,
        alpha_first_moment=first_moment_alpha(c),
        w_value=lambert_w(math.e * c / 2.0),
        forced=y <= Y_THRESHOLD,
    )
    if c > math.e:
        value, terms = w_expansion(c)
        report.update(expansion_value=value, expansion_terms=terms)
    return BoundsReport(**report)
