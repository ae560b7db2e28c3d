"""Exact finite-n moments of the weighted independent-set count and their checks.

``X`` is the total weight of the independent sets of size ``k`` in
G~(n, m).  Both moments have exact closed forms for every ``n``; this module
evaluates them and provides brute-force and Monte Carlo estimates to compare
against.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

import numpy as np

from .analytic import ModelParams, phi, w1, w2
from .graphs import SizeError, sample, weight

WORK_BUDGET = int(float(os.environ.get("MISBOUNDS_WORK_BUDGET", "1e8")))
EXACT_INT_N = 30


@dataclass(frozen=True)
class MomentReport:
    n: int
    m: int
    k: int
    mu: float
    e_x_formula: float
    e_x2_formula: float
    e_x_brute: float | None = None
    e_x2_brute: float | None = None
    e_x_mc: float | None = None
    e_x_mc_se: float | None = None
    e_x2_mc: float | None = None
    e_x2_mc_se: float | None = None
    mc_trials: int | None = None
    max_abs_discrepancy: float | None = None


@dataclass(frozen=True)
class RatioProfile:
    z: np.ndarray
    log_contribution: np.ndarray
    contribution: np.ndarray
    argmax_z: int
    independent_z: int
    log_ratio: float


def _check(n, m, k, mu):
    if n < 1 or m < 0 or not 0 <= k <= n:
        raise ValueError(f"need n >= 1, m >= 0 and 0 <= k <= n; got n={n}, m={m}, k={k}")
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")


def _log(x: float) -> float:
    return math.log(x) if x > 0.0 else -math.inf


def _logsumexp(v) -> float:
    v = np.asarray(v, dtype=float)
    top = v.max()
    if top == -math.inf:
        return -math.inf
    return float(top + math.log(math.fsum(np.exp(v - top).tolist())))


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def overlap_range(n: int, k: int) -> range:
    return range(max(0, 2 * k - n), k + 1)


def log_expected_x(n: int, m: int, k: int, mu: float) -> float:
    _check(n, m, k, mu)
    base = w1(k / n, mu)
    if m and base == 0.0:
        return -math.inf
    return _log_comb(n, k) + (m * math.log(base) if m else 0.0)


def expected_x_formula(n: int, m: int, k: int, mu: float) -> float:
    """``C(n, k) * w1(k/n, mu)**m``, exact for every finite ``n``."""
    _check(n, m, k, mu)
    if n <= EXACT_INT_N:
        return math.comb(n, k) * w1(k / n, mu) ** m
    return math.exp(log_expected_x(n, m, k, mu))


def log_overlap_terms(n: int, m: int, k: int, mu: float) -> tuple[np.ndarray, np.ndarray]:
    """Overlap sizes ``z`` and the log of each term of the second-moment sum."""
    _check(n, m, k, mu)
    zs = np.array(list(overlap_range(n, k)))
    logs = []
    for z in zs.tolist():
        lm = _log_comb(n, k) + _log_comb(k, z) + _log_comb(n - k, k - z)
        base = w2(k / n, z / n, mu)
        logs.append(lm + (m * _log(base) if m else 0.0))
    return zs, np.array(logs)


def log_expected_x2(n: int, m: int, k: int, mu: float) -> float:
    return _logsumexp(log_overlap_terms(n, m, k, mu)[1])


def expected_x2_formula(n: int, m: int, k: int, mu: float) -> float:
    """Sum over overlaps ``z`` of multinomial(z) * w2(k/n, z/n, mu)**m."""
    _check(n, m, k, mu)
    if n <= EXACT_INT_N:
        terms = []
        for z in overlap_range(n, k):
            count = math.comb(n, k) * math.comb(k, z) * math.comb(n - k, k - z)
            terms.append(count * w2(k / n, z / n, mu) ** m)
        return math.fsum(terms)
    return math.exp(log_expected_x2(n, m, k, mu))


def _budget(work: int, budget: int | None):
    budget = WORK_BUDGET if budget is None else budget
    if work > budget:
        raise SizeError(f"enumeration needs {work} steps, budget is {budget}")


def brute_moments(n: int, m: int, k: int, mu: float, budget: int | None = None) -> tuple[float, float]:
    """E[X] and E[X^2] by averaging over all ``n**(2m)`` edge sequences."""
    _check(n, m, k, mu)
    _budget(n ** (2 * m) * math.comb(n, k), budget)
    sets = list(itertools.combinations(range(n), k))
    from .graphs import MultiGraph

    xs = []
    for flat in itertools.product(range(n), repeat=2 * m):
        g = MultiGraph(n, np.array(flat, dtype=np.int64).reshape(m, 2))
        xs.append(math.fsum(weight(g, s, mu) for s in sets))
    total = n ** (2 * m)
    return math.fsum(xs) / total, math.fsum(x * x for x in xs) / total


def _membership(n: int, k: int) -> np.ndarray:
    sets = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64).reshape(-1, k)
    mem = np.zeros((len(sets), n), dtype=bool)
    if k:
        mem[np.arange(len(sets))[:, None], sets] = True
    return mem


def graph_weights(edges: np.ndarray, membership: np.ndarray, mu: float) -> np.ndarray:
    """X for a batch of edge lists, shape (batch, m, 2) -> (batch,)."""
    a = membership[:, edges[..., 0]]  # (sets, batch, m)
    b = membership[:, edges[..., 1]]
    killed = np.any(a & b, axis=2)
    outside = np.count_nonzero(~a & ~b, axis=2)
    w = np.where(killed, 0.0, np.power(mu, outside, dtype=float))
    return w.sum(axis=0)


def mc_moments(
    n: int,
    m: int,
    k: int,
    mu: float,
    trials: int,
    seed,
    batch: int = 2000,
    budget: int | None = None,
) -> tuple[float, float, float, float]:
    """Monte Carlo (E[X], se, E[X^2], se); X is computed exactly per graph.

    Standard errors are NaN when ``trials < 2``.
    """
    _check(n, m, k, mu)
    if trials < 1:
        raise ValueError("trials must be positive")
    _budget(math.comb(n, k), budget)
    mem = _membership(n, k)
    rng = np.random.default_rng(seed)
    xs = []
    left = trials
    while left:
        b = min(batch, left)
        edges = rng.integers(0, n, size=(b, m, 2))
        xs.append(graph_weights(edges, mem, mu))
        left -= b
    x = np.concatenate(xs)
    x2 = x * x
    if trials < 2:
        nan = math.nan
        return float(x.mean()), nan, float(x2.mean()), nan
    root = math.sqrt(trials)
    return (
        float(x.mean()),
        float(x.std(ddof=1) / root),
        float(x2.mean()),
        float(x2.std(ddof=1) / root),
    )


def ratio_profile(n: int, m: int, k: int, mu: float) -> RatioProfile:
    """Per-overlap share of E[X^2] / E[X]^2."""
    zs, logs = log_overlap_terms(n, m, k, mu)
    rel = logs - 2.0 * log_expected_x(n, m, k, mu)
    i = int(np.argmax(rel))
    return RatioProfile(
        z=zs,
        log_contribution=rel,
        contribution=np.exp(rel),
        argmax_z=int(zs[i]),
        independent_z=int(round(k * k / n)),
        log_ratio=_logsumexp(rel),
    )


def rate_gap(n: int, m: int, k: int, z: int) -> float:
    """Relative gap between the log contribution at ``z`` and ``n * phi(z / n)``."""
    alpha = k / n
    params = ModelParams.tuned(alpha, 2.0 * m / n)
    prof = ratio_profile(n, m, k, params.mu)
    target = n * phi(params, z / n)
    got = prof.log_contribution[list(prof.z).index(z)]
    return abs(got - target) / abs(target)


def moment_report(
    n: int,
    m: int,
    k: int,
    mu: float,
    *,
    brute: bool = False,
    mc_trials: int = 0,
    seed=0,
    budget: int | None = None,
) -> MomentReport:
    ex = expected_x_formula(n, m, k, mu)
    ex2 = expected_x2_formula(n, m, k, mu)
    fields: dict = {}
    gaps = []
    if brute:
        bx, bx2 = brute_moments(n, m, k, mu, budget)
        fields.update(e_x_brute=bx, e_x2_brute=bx2)
        gaps += [abs(bx - ex), abs(bx2 - ex2)]
    if mc_trials:
        mx, mse, mx2, mse2 = mc_moments(n, m, k, mu, mc_trials, seed, budget=budget)
        fields.update(e_x_mc=mx, e_x_mc_se=mse, e_x2_mc=mx2, e_x2_mc_se=mse2, mc_trials=mc_trials)
        gaps += [abs(mx - ex), abs(mx2 - ex2)]
    return MomentReport(
        n, m, k, mu, ex, ex2, max_abs_discrepancy=max(gaps) if gaps else None, **fields
    )
