import math

import numpy as np
import pytest

from misbounds.analytic import ModelParams, phi, psi, psi_d1, psi_d2
from misbounds.stationary import (
    NoInteriorRoot,
    Verdict,
    certify_global_max,
    find_inflections,
    find_zeta3,
    lemma_degree,
    lemma_diagnostics,
    stationary_report,
)

# psi(zeta3) from a 60-digit mpmath evaluation (bracketed findroot on psi')
MPMATH_PSI3 = {
    (1.6, 1e-4): 1.62206562975e-7,
    (1.6, 1e-6): -3.16053929213e-11,
    (1.6, 1e-8): -5.99922852384e-14,
    (1.5, 1e-6): 1.83577034459e-11,
    (1.5, 1e-8): -9.99596581181e-15,
    (1.4, 1e-6): 6.8320801672e-11,
    (1.4, 1e-8): 4.00003536332e-14,
}


def _grid_sign_changes(params, points=10**6):
    a = params.alpha
    z = np.linspace(a * 1e-9, a * (1 - 1e-9), points)
    s = np.sign(psi_d2(params, z))
    idx = np.flatnonzero(s[:-1] != s[1:])
    return z, idx


class TestInflections:
    def test_two_roots_match_grid_oracle(self):
        a = 0.01
        p = ModelParams.tuned(a, 2 * (math.log(100) + 1) / a)
        z1, z2 = find_inflections(p)
        z, idx = _grid_sign_changes(p)
        assert len(idx) == 2
        step = z[1] - z[0]
        assert abs(z1 - z[idx[0]]) <= step
        assert abs(z2 - z[idx[1]]) <= step
        assert a * a < z1 < z2 < a
        assert 0 < 1 - z2 / a < 1
        assert abs(psi_d2(p, z2)) <= 1e-6 * p.c

    def test_sign_pattern(self):
        p = ModelParams.tuned(0.01, 1121.0)
        z1, z2 = find_inflections(p)
        assert psi_d2(p, z1 * 0.5) < 0
        assert psi_d2(p, 0.5 * (z1 + z2)) > 0
        assert psi_d2(p, 0.5 * (z2 + 0.01)) < 0

    def test_no_second_max(self):
        p = ModelParams.tuned(0.1, 1.0)
        assert find_inflections(p) is None
        z, idx = _grid_sign_changes(p)
        assert len(idx) == 0
        assert np.all(psi_d2(p, z) < 0)

    def test_lemma1_regime_keeps_alpha_squared_a_local_max(self):
        for a in (1e-2, 1e-3, 1e-4):
            p = ModelParams.tuned(a, 0.5 / a**2)
            assert psi_d2(p, a * a) < 0
            pair = find_inflections(p)
            if pair is not None:
                assert pair[0] > a * a


class TestZeta3:
    def test_lemma3_scaling(self):
        a = 1e-6
        p = ModelParams.tuned(a, lemma_degree(a, "lemma3"))
        _, z2 = find_inflections(p)
        z3 = find_zeta3(p, z2)
        ratio = (1 - z3 / a) * math.e / math.sqrt(a)
        assert 0.75 <= ratio <= 1.25
        # oracle: plain bisection on psi' to a 1e-15 relative bracket
        lo, hi = z2, a * (1 - 1e-9)
        while hi - lo > 1e-15 * a:
            mid = 0.5 * (lo + hi)
            if psi_d1(p, mid) > 0:
                lo = mid
            else:
                hi = mid
        assert z3 == pytest.approx(0.5 * (lo + hi), rel=1e-12)

    def test_residual_contract(self):
        for a in (1e-4, 1e-6, 1e-8):
            for mode in ("lemma2", "lemma3", "lemma4"):
                p = ModelParams.tuned(a, lemma_degree(a, mode))
                _, z2 = find_inflections(p)
                z3 = find_zeta3(p, z2)
                assert abs(psi_d1(p, z3)) <= 1e-8 * p.c
                assert z2 < z3 < a

    def test_ratio_improves_with_smaller_alpha(self):
        r6, r8 = lemma_diagnostics([1e-6, 1e-8], "lemma3")
        assert abs(r8.lemma3_ratio - 1) < abs(r6.lemma3_ratio - 1)

    def test_no_interior_root(self):
        # lower degree: psi' is already negative at zeta2
        a = 1e-3
        p = ModelParams.tuned(a, 1.5 * math.log(1 / a) / a)
        pair = find_inflections(p)
        assert pair is not None
        with pytest.raises(NoInteriorRoot):
            find_zeta3(p, pair[1])
        rep = stationary_report(p)
        assert rep.status == "no-interior-root" and not rep.exists_second_max


class TestCertificate:
    def test_theorem_case_certifies(self):
        a = 1e-6
        p = ModelParams.tuned(a, lemma_degree(a, "lemma4", 1.6))
        cert = certify_global_max(p)
        assert cert.verdict is Verdict.MAX_AT_ALPHA_SQUARED
        assert cert.argmax_zeta == a * a
        assert cert.phi_max == 0.0
        predicted = (2 / math.e - 0.8) * a**1.5
        assert cert.second_peak_value < 0
        assert abs(predicted) / 3 <= abs(cert.second_peak_value) <= 3 * abs(predicted)

    def test_above_first_moment_bound_fails(self):
        a = 1e-6
        p = ModelParams.tuned(a, (2 * math.log(1e6) + 3) / a)
        cert = certify_global_max(p)
        assert cert.verdict is Verdict.MAX_ELSEWHERE
        assert cert.phi_max > 0
        # grid-scan oracle on phi directly
        z = np.linspace(0, a, 20001)
        assert np.max(phi(p, z)) > 0

    def test_dense_case_without_second_max(self):
        p = ModelParams.tuned(0.3, 1.0)
        cert = certify_global_max(p)
        assert cert.verdict is Verdict.MAX_AT_ALPHA_SQUARED
        assert cert.second_peak_value == -math.inf
        z = np.linspace(0, 0.3, 100001)
        assert np.max(phi(p, z)) <= 0

    @pytest.mark.parametrize(
        "alpha,c",
        [
            (1e-6, lemma_degree(1e-6, "lemma4", 1.6)),
            (1e-8, lemma_degree(1e-8, "lemma4", 1.6)),
            (1e-6, lemma_degree(1e-6, "lemma4", 1.4)),
            (1e-6, (2 * math.log(1e6) + 3) / 1e-6),
            (0.3, 1.0),
            (0.01, 1000.0),
            (0.01, 1121.0),
        ],
    )
    def test_grid_doubling_invariance(self, alpha, c):
        p = ModelParams.tuned(alpha, c)
        assert certify_global_max(p, 4096).verdict == certify_global_max(p, 8192).verdict

    def test_negative_envelope_suffices(self):
        a = 1e-8
        p = ModelParams.tuned(a, lemma_degree(a, "lemma4", 1.6))
        z = np.linspace(0, a, 4096)
        away = np.abs(z - a * a) > a / 4095
        assert np.all(psi(p, z[away]) < 0)
        assert certify_global_max(p).certified

    def test_tie_is_a_failure(self):
        a = 1e-6
        p = ModelParams.tuned(a, lemma_degree(a, "lemma4", 1.6))
        cert = certify_global_max(p, tie_tolerance=1e-10)
        assert cert.verdict is Verdict.MAX_ELSEWHERE

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            certify_global_max(ModelParams.tuned(0.3, 1.0), grid_points=1)


class TestLemmaDiagnostics:
    grid = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8]

    def test_lemma2(self):
        rows = lemma_diagnostics(self.grid, "lemma2")
        ratios = [r.lemma2_ratio for r in rows]
        assert all(0.5 <= r <= 2.0 for r in ratios)
        gaps = [abs(r - 1) for r in ratios]
        assert sum(b > a for a, b in zip(gaps, gaps[1:])) <= 1
        assert all(0 < r.delta2 < 1 for r in rows)

    def test_lemma3(self):
        rows = lemma_diagnostics(self.grid, "lemma3")
        ratios = [r.lemma3_ratio for r in rows]
        assert all(0.7 <= r <= 1.4 for r in ratios)
        gaps = [abs(r - 1) for r in ratios]
        assert sum(b > a for a, b in zip(gaps, gaps[1:])) <= 1
        for r in rows:
            assert 0 < r.zeta1 < r.zeta2 < r.zeta3 < r.alpha
            assert 0 < r.delta3 < 1

    @pytest.mark.parametrize("key,expected", sorted(MPMATH_PSI3.items()))
    def test_lemma4_against_high_precision(self, key, expected):
        x, a = key
        (row,) = lemma_diagnostics([a], "lemma4", x)
        assert row.psi_at_zeta3 == pytest.approx(expected, rel=1e-6)

    def test_lemma4_threshold_sides(self):
        (below,) = lemma_diagnostics([1e-8], "lemma4", 1.5)
        assert below.psi_at_zeta3 < 0
        for a in (1e-6, 1e-7, 1e-8):
            (above,) = lemma_diagnostics([a], "lemma4", 1.4)
            assert above.psi_at_zeta3 > 0

    def test_leading_coefficient_sign(self):
        # coefficient 2b(1 - ln b)/e - x/2 is maximised at b = 1
        b = np.linspace(0.05, 3, 2000)
        coeff = 2 * b * (1 - np.log(b)) / math.e
        assert b[np.argmax(coeff)] == pytest.approx(1.0, abs=2e-3)
        assert 2 / math.e - 1.4 / 2 == pytest.approx(0.0358, abs=1e-4)

    def test_alpha_range(self):
        with pytest.raises(ValueError):
            lemma_diagnostics([0.05])
