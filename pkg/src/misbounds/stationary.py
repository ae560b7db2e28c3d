"""Stationary points of the overlap envelope and global-maximum certification.

``psi_d2`` is a constant minus three convex poles, hence strictly concave on
(0, alpha).  It therefore has at most two zeros: the inflection points
``zeta1 < zeta2`` on either side of its maximiser.  Between them ``psi`` is
convex, outside them concave, so ``psi`` has at most two local maxima: one in
[0, zeta1] (``alpha**2`` when the weight is tuned and ``c`` is not too large)
and one, ``zeta3``, in [zeta2, alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .analytic import ModelParams, entropy, phi, phi_d1, psi, psi_d1, psi_d2, psi_d3
from .roots import bisect_newton

EDGE = 1e-9
NEWTON_WIDTH = 1e-3
ROOT_RTOL = 1e-12


class NoInteriorRoot(ArithmeticError):
    """``psi'`` has no sign change on [zeta2, alpha): psi decreases there."""


class Verdict(str, Enum):
    MAX_AT_ALPHA_SQUARED = "MaxAtAlphaSquared"
    MAX_ELSEWHERE = "MaxElsewhere"


@dataclass(frozen=True)
class StationaryReport:
    alpha: float
    c: float
    zeta1: float | None
    zeta2: float | None
    zeta3: float | None
    delta2: float | None
    delta3: float | None
    psi_at_zeta3: float | None
    lemma2_ratio: float | None
    lemma3_ratio: float | None
    exists_second_max: bool
    status: str = "ok"


@dataclass(frozen=True)
class MaxCertificate:
    alpha: float
    c: float
    argmax_zeta: float
    phi_max: float
    second_peak_value: float
    verdict: Verdict
    grid_points: int
    refinement_tolerance: float
    margin: float
    tie_tolerance: float

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.MAX_AT_ALPHA_SQUARED


def _d4(params: ModelParams, z: float) -> float:
    a = params.alpha
    return -4.0 / (a - z) ** 3 - 2.0 / z**3 - 2.0 / ((1.0 - 2.0 * a) + z) ** 3


def _search_window(alpha: float) -> tuple[float, float]:
    return alpha * EDGE, alpha * (1.0 - EDGE)


def find_inflections(params: ModelParams) -> tuple[float, float] | None:
    """Zeros of ``psi''`` in (0, alpha), or ``None`` when ``psi''`` stays negative."""
    a = params.alpha
    lo, hi = _search_window(a)
    xtol = ROOT_RTOL * a
    top = bisect_newton(
        lambda z: psi_d3(params, z),
        lambda z: _d4(params, z),
        lo,
        hi,
        xtol=xtol,
        newton_width=NEWTON_WIDTH * a,
    ).x
    if psi_d2(params, top) <= 0.0:
        return None
    d2 = lambda z: psi_d2(params, z)
    d3 = lambda z: psi_d3(params, z)
    z1 = bisect_newton(d2, d3, lo, top, xtol=xtol, newton_width=NEWTON_WIDTH * a).x
    z2 = bisect_newton(d2, d3, top, hi, xtol=xtol, newton_width=NEWTON_WIDTH * a).x
    return z1, z2


def find_zeta3(params: ModelParams, zeta2: float) -> float:
    """The second local maximum of ``psi``, the zero of ``psi'`` in [zeta2, alpha)."""
    a = params.alpha
    if not 0.0 < zeta2 < a:
        raise ValueError("zeta2 must lie strictly inside (0, alpha)")
    d1 = lambda z: psi_d1(params, z)
    if d1(zeta2) <= 0.0:
        raise NoInteriorRoot(f"psi' <= 0 at zeta2 for alpha={a!r}, c={params.c!r}")
    # psi' -> -inf only logarithmically, so very large c pushes the root
    # closer to alpha than the default window edge
    for edge in (EDGE, 1e-12, 1e-15):
        hi = a * (1.0 - edge)
        if hi > zeta2 and d1(hi) < 0.0:
            break
    else:
        raise NoInteriorRoot(f"no sign change of psi' in [zeta2, alpha) for c={params.c!r}")
    root = bisect_newton(
        d1,
        lambda z: psi_d2(params, z),
        zeta2,
        hi,
        xtol=ROOT_RTOL * zeta2,
        newton_width=NEWTON_WIDTH * a,
    )
    return root.x


def stationary_report(params: ModelParams) -> StationaryReport:
    a, c = params.alpha, params.c
    pair = find_inflections(params)
    if pair is None:
        return StationaryReport(a, c, None, None, None, None, None, None, None, None, False, "no-second-max")
    z1, z2 = pair
    delta2 = 1.0 - z2 / a
    lemma2 = delta2 * math.log(1.0 / a)
    try:
        z3 = find_zeta3(params, z2)
    except NoInteriorRoot:
        return StationaryReport(a, c, z1, z2, None, delta2, None, None, lemma2, None, False, "no-interior-root")
    delta3 = 1.0 - z3 / a
    return StationaryReport(
        alpha=a,
        c=c,
        zeta1=z1,
        zeta2=z2,
        zeta3=z3,
        delta2=delta2,
        delta3=delta3,
        psi_at_zeta3=psi(params, z3),
        lemma2_ratio=lemma2,
        lemma3_ratio=delta3 * math.e / math.sqrt(a),
        exists_second_max=True,
    )


def _noise_floor(params: ModelParams) -> float:
    # rounding level of the terms that cancel inside phi and psi
    a = params.alpha
    scale = float(entropy(a)) + 0.5 * params.c * a * a
    return 64.0 * np.finfo(float).eps * scale


def _phi_peak(params: ModelParams, z2: float, z3: float) -> float | None:
    """Zero of ``phi'`` in [zeta2, zeta3]; ``phi' <= psi'`` right of alpha**2."""
    d1 = lambda z: phi_d1(params, z)
    if not d1(z2) > 0.0 or not d1(z3) < 0.0:
        return None
    return bisect_newton(d1, None, z2, z3, xtol=ROOT_RTOL * z2).x


def certify_global_max(
    params: ModelParams,
    grid_points: int = 4096,
    margin: float = 1e-10,
    tie_tolerance: float | None = None,
) -> MaxCertificate:
    """Decide numerically whether ``phi`` peaks on [0, alpha] at ``alpha**2``.

    ``psi`` is evaluated first on the grid plus the refined stationary
    points; ``phi`` is only computed where the envelope is positive.  A
    second peak within ``tie_tolerance`` of zero counts as a failure.
    """
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    a, c = params.alpha, params.c
    target = a * a
    if tie_tolerance is None:
        tie_tolerance = _noise_floor(params)

    extra = [target]
    pair = find_inflections(params)
    z2 = None
    if pair is not None:
        z1, z2 = pair
        extra += [z1, z2]
        try:
            z3 = find_zeta3(params, z2)
        except NoInteriorRoot:
            pass
        else:
            extra.append(z3)
            if psi(params, z3) > 0.0:
                peak = _phi_peak(params, z2, z3)
                if peak is not None:
                    extra.append(peak)

    zeta = np.unique(np.concatenate([np.linspace(0.0, a, grid_points), extra]))
    zeta = np.clip(zeta, 0.0, a)
    bound = np.asarray(psi(params, zeta), dtype=float)
    over = bound > 0.0
    if np.any(over):
        bound[over] = phi(params, zeta[over])

    i = int(np.argmax(bound))
    phi_max = float(bound[i])
    argmax = float(zeta[i])

    if z2 is None:
        second = -math.inf
    else:
        far = zeta >= z2
        second = float(bound[far].max()) if np.any(far) else -math.inf

    resolution = a / (grid_points - 1)
    ok = (
        phi_max <= margin
        and abs(argmax - target) <= resolution
        and second < -tie_tolerance
    )
    return MaxCertificate(
        alpha=a,
        c=c,
        argmax_zeta=argmax,
        phi_max=phi_max,
        second_peak_value=second,
        verdict=Verdict.MAX_AT_ALPHA_SQUARED if ok else Verdict.MAX_ELSEWHERE,
        grid_points=grid_points,
        refinement_tolerance=ROOT_RTOL * a,
        margin=margin,
        tie_tolerance=tie_tolerance,
    )


LEMMA_MODES = ("lemma2", "lemma3", "lemma4")


def lemma_degree(alpha: float, mode: str, x: float = 1.6) -> float:
    """Average degree used by each scaling lemma at density ``alpha``."""
    L = math.log(1.0 / alpha)
    if mode == "lemma2":
        return 2.0 * L / alpha
    if mode == "lemma3":
        return (2.0 * L + 2.0) / alpha
    if mode == "lemma4":
        return (2.0 * L + 2.0 - x * math.sqrt(alpha)) / alpha
    raise ValueError(f"unknown lemma mode {mode!r}")


def lemma_diagnostics(
    alphas: Iterable[float], mode: str = "lemma3", x: float = 1.6
) -> list[StationaryReport]:
    """One :class:`StationaryReport` per density, with ``c`` set by ``mode``.

    Missing stationary points are recorded in ``status`` rather than raised
    so a sweep always yields a full table.
    """
    out = []
    for a in alphas:
        if not 0.0 < a <= 1e-2:
            raise ValueError(f"lemma diagnostics need 0 < alpha <= 1e-2, got {a!r}")
        out.append(stationary_report(ModelParams.tuned(a, lemma_degree(a, mode, x))))
    return out
