"""Closed-form rate functions for the weighted independent-set count.

Every function here is pure and accepts numpy arrays for the overlap
argument ``zeta`` (scalars come back as Python floats).  Entropy terms use
the convention ``0 * ln 0 = 0`` so the overlap endpoints ``0`` and ``alpha``
are finite.  Logarithms of quantities close to one always go through
``log1p``; at small ``alpha`` the rate functions are differences of terms of
size ``alpha * ln(1/alpha)`` and the interesting values sit many orders of
magnitude below that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Density ``alpha``, average degree ``c`` and edge weight ``mu``."""

    alpha: float
    c: float
    mu: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (0, 1/2), got {self.alpha!r}")
        if not self.c > 0.0:
            raise ValueError(f"c must be positive, got {self.c!r}")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must lie in [0, 1], got {self.mu!r}")

    @classmethod
    def tuned(cls, alpha: float, c: float) -> "ModelParams":
        """Parameters with the weight fixed at ``mu_star(alpha)``."""
        return cls(alpha, c, mu_star(alpha))

    @property
    def is_tuned(self) -> bool:
        return math.isclose(self.mu, mu_star(self.alpha), rel_tol=1e-12, abs_tol=0.0)


@dataclass(frozen=True)
class OverlapPoint:
    zeta: float
    phi: float
    psi: float


def _out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _pair_entropy(p, q):
    """-p ln p - q ln q for p + q = 1, with both halves supplied explicitly.

    The smaller of the two is fed to ``log`` and the larger goes through
    ``log1p`` of its complement, so neither logarithm loses digits.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        small_p = p <= q
        lp = np.where(small_p, np.log(p), np.log1p(-q))
        lq = np.where(small_p, np.log1p(-p), np.log(q))
        tp = np.where(p > 0, p * lp, 0.0)
        tq = np.where(q > 0, q * lq, 0.0)
    return -(tp + tq)


def entropy(a):
    """Binary entropy in nats, ``-a ln a - (1-a) ln(1-a)``."""
    a = np.asarray(a, dtype=float)
    if np.any((a < 0) | (a > 1)) or np.any(np.isnan(a)):
        raise ValueError("entropy argument must lie in [0, 1]")
    return _out(_pair_entropy(a, 1.0 - a))


def mu_star(alpha: float) -> float:
    """Edge weight making ``alpha**2`` a stationary point of the overlap rate."""
    if not 0.0 < alpha < 0.5:
        raise ValueError(f"mu_star needs 0 < alpha < 1/2, got {alpha!r}")
    return (1.0 - 2.0 * alpha) / (1.0 - alpha)


def _check_alpha_mu(alpha, mu):
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must lie in [0, 1], got {mu!r}")


def _check_zeta(alpha, zeta):
    zeta = np.asarray(zeta, dtype=float)
    lo = max(0.0, 2.0 * alpha - 1.0)
    # 2 alpha - 1 picks up rounding when alpha = k / n
    if np.any(zeta < lo - 4.0 * np.finfo(float).eps) or np.any(zeta > alpha) or np.any(np.isnan(zeta)):
        raise ValueError(f"overlap must lie in [{lo}, {alpha}]")
    return zeta


def w1(alpha: float, mu: float) -> float:
    """Expected per-edge weight factor for one fixed set of density ``alpha``.

    Valid for any ``alpha`` in [0, 1]; the moment oracle uses densities above
    one half.
    """
    _check_alpha_mu(alpha, mu)
    return (1.0 - alpha) ** 2 * mu + 2.0 * alpha * (1.0 - alpha)


def w2(alpha: float, zeta, mu: float):
    """Expected per-edge factor of ``w(S) w(T)`` for sets with overlap ``zeta``."""
    _check_alpha_mu(alpha, mu)
    zeta = _check_zeta(alpha, zeta)
    out_both = 1.0 - 2.0 * alpha + zeta
    only = alpha - zeta
    val = (
        out_both**2 * mu**2
        + 4.0 * only * out_both * mu
        + 2.0 * only**2
        + 2.0 * zeta * out_both
    )
    return _out(val)


def w2_tuned(alpha: float, zeta):
    """``w2`` at ``mu = mu_star(alpha)`` in its completed-square form."""
    zeta = _check_zeta(alpha, zeta)
    mu_star(alpha)
    one = 1.0 - alpha
    return _out(one**2 + (zeta - alpha * alpha) ** 2 / one**2)


def overlap_entropy(alpha: float, zeta):
    """alpha h(zeta/alpha) + (1-alpha) h((alpha-zeta)/(1-alpha)) - h(alpha).

    This is the exponential rate of the number of set pairs with overlap
    ``zeta`` divided by the square of the number of sets.  It vanishes at
    ``zeta = alpha**2`` and is at most zero elsewhere.
    """
    zeta = np.asarray(zeta, dtype=float)
    rest = alpha - zeta
    one = 1.0 - alpha
    out_both = (1.0 - 2.0 * alpha) + zeta
    inner = alpha * _pair_entropy(zeta / alpha, rest / alpha)
    outer = one * _pair_entropy(rest / one, out_both / one)
    return inner + outer - _pair_entropy(alpha, one)


def f1(alpha: float, c: float, mu: float) -> float:
    """Exponential growth rate of the first moment."""
    return float(entropy(alpha)) + 0.5 * c * math.log(w1(alpha, mu))


def f2(alpha: float, c: float, zeta, mu: float):
    """Exponential rate of the overlap-``zeta`` part of the second moment."""
    zeta = _check_zeta(alpha, zeta)
    rest = alpha - zeta
    one = 1.0 - alpha
    out_both = (1.0 - 2.0 * alpha) + zeta
    ent = (
        _pair_entropy(alpha, one)
        + alpha * _pair_entropy(zeta / alpha, rest / alpha)
        + one * _pair_entropy(rest / one, out_both / one)
    )
    with np.errstate(divide="ignore"):
        return _out(ent + 0.5 * c * np.log(np.asarray(w2(alpha, zeta, mu))))


def phi_general(alpha: float, c: float, zeta, mu: float):
    """Overlap rate ``f2 - 2 f1`` for an arbitrary edge weight."""
    zeta = _check_zeta(alpha, zeta)
    ratio = np.asarray(w2(alpha, zeta, mu)) / w1(alpha, mu) ** 2
    with np.errstate(divide="ignore"):
        return _out(overlap_entropy(alpha, zeta) + 0.5 * c * np.log(ratio))


def _tuned_args(params: ModelParams, zeta):
    if not params.is_tuned:
        raise ValueError("phi/psi are defined at the tuned weight mu_star(alpha)")
    return _check_zeta(params.alpha, zeta)


def phi(params: ModelParams, zeta):
    """Overlap rate at the tuned weight; exactly zero at ``zeta = alpha**2``."""
    zeta = _tuned_args(params, zeta)
    a = params.alpha
    x = ((zeta - a * a) / (1.0 - a) ** 2) ** 2
    val = overlap_entropy(a, zeta) + 0.5 * params.c * np.log1p(x)
    return _out(np.where(zeta == a * a, 0.0, val))


def psi(params: ModelParams, zeta):
    """Upper envelope of ``phi`` obtained from ``ln(1 + x) <= x``."""
    zeta = _tuned_args(params, zeta)
    a = params.alpha
    x = ((zeta - a * a) / (1.0 - a) ** 2) ** 2
    val = overlap_entropy(a, zeta) + 0.5 * params.c * x
    return _out(np.where(zeta == a * a, 0.0, val))


def _interior(params: ModelParams, zeta):
    zeta = _tuned_args(params, zeta)
    if np.any(zeta <= 0.0) or np.any(zeta >= params.alpha):
        raise ValueError("psi derivatives are only defined for 0 < zeta < alpha")
    return zeta


def psi_d1(params: ModelParams, zeta):
    zeta = _interior(params, zeta)
    a = params.alpha
    val = (
        params.c * (zeta - a * a) / (1.0 - a) ** 4
        + 2.0 * np.log(a - zeta)
        - np.log(zeta)
        - np.log1p(zeta - 2.0 * a)
    )
    return _out(val)


def psi_d2(params: ModelParams, zeta):
    zeta = _interior(params, zeta)
    a = params.alpha
    val = (
        params.c / (1.0 - a) ** 4
        - 2.0 / (a - zeta)
        - 1.0 / zeta
        - 1.0 / ((1.0 - 2.0 * a) + zeta)
    )
    return _out(val)


def psi_d3(params: ModelParams, zeta):
    """Third derivative; ``psi_d2`` is strictly concave so this is decreasing."""
    zeta = _interior(params, zeta)
    a = params.alpha
    val = -2.0 / (a - zeta) ** 2 + 1.0 / zeta**2 + 1.0 / ((1.0 - 2.0 * a) + zeta) ** 2
    return _out(val)


def inflection_cubic(params: ModelParams, zeta):
    """``psi_d2`` with its denominators cleared; same sign on (0, alpha)."""
    zeta = np.asarray(zeta, dtype=float)
    a = params.alpha
    rest = a - zeta
    out_both = (1.0 - 2.0 * a) + zeta
    val = params.c * zeta * rest * out_both - (1.0 - a) ** 4 * (
        2.0 * zeta * out_both + rest * out_both + zeta * rest
    )
    return _out(val)


def overlap_point(params: ModelParams, zeta: float) -> OverlapPoint:
    return OverlapPoint(float(zeta), phi(params, zeta), psi(params, zeta))


def phi_d1(params: ModelParams, zeta):
    """Derivative of ``phi``; never exceeds ``psi_d1`` to the right of alpha**2."""
    zeta = _interior(params, zeta)
    a = params.alpha
    one4 = (1.0 - a) ** 4
    x = (zeta - a * a) ** 2 / one4
    val = (
        params.c * (zeta - a * a) / one4 / (1.0 + x)
        + 2.0 * np.log(a - zeta)
        - np.log(zeta)
        - np.log1p(zeta - 2.0 * a)
    )
    return _out(val)
