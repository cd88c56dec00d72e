import math

import numpy as np
import pytest

from talbot_lab.measures import (
    AtomicMeasure,
    TimeSamplingPlan,
    cantor_measure,
    carleson_l2_ratio,
    convolve_dirichlet_sup,
    dirichlet_abs_max_envelope,
    dirichlet_l1,
    exponent_fit,
    frostman_constant,
    maximal_lp_norm,
    transference_ratio,
    uniform_measure,
)
from talbot_lab.schrodinger import FourierData, RationalTime, dirichlet_kernel_1d

TAU = 2 * math.pi


def dirichlet_datum(n):
    ks = np.arange(-n, n + 1, dtype=np.int64).reshape(-1, 1)
    return FourierData(1, ks, np.ones(ks.shape[0], dtype=complex))


class TestCantorMeasure:
    def test_similarity_dimension(self):
        mu = cantor_measure(1, 1 / 3, 6)
        assert mu.alpha == pytest.approx(math.log(2) / math.log(3))

    def test_level_zero_is_point_mass(self):
        mu = cantor_measure(1, 1 / 3, 0)
        assert mu.n_atoms == 1

    def test_probability_mass_is_exact(self):
        mu = cantor_measure(1, 1 / 3, 10)
        assert mu.total_mass == 1.0  # dyadic masses sum exactly

    def test_atom_count(self):
        assert cantor_measure(1, 0.4, 8).n_atoms == 256
        assert cantor_measure(2, 1 / 3, 4).n_atoms == 256

    def test_rejects_bad_ratio(self):
        with pytest.raises(ValueError):
            cantor_measure(1, 0.5, 3)
        with pytest.raises(ValueError):
            cantor_measure(1, 1 / 3, 30)


class TestFrostman:
    def test_uniform_measure_close_to_inverse_pi(self):
        mu = uniform_measure(4096)
        radii = [TAU * 2.0**-m for m in range(2, 9)]
        est = frostman_constant(mu, 1.0, radii)
        assert est.value == pytest.approx(1 / math.pi, rel=0.1)

    def test_point_mass_alpha_zero(self):
        mu = AtomicMeasure(1, np.array([[1.0]]), np.array([1.0]), 0.0)
        est = frostman_constant(mu, 0.0, [0.1, 0.5, 1.0])
        assert est.value == 1.0

    def test_middle_thirds_golden(self):
        # frozen at calibration; stable across construction depth
        values = {}
        for level in (10, 11, 12):
            mu = cantor_measure(1, 1 / 3, level)
            radii = [TAU * 3.0**-m for m in range(1, level + 1)]
            values[level] = frostman_constant(mu, mu.alpha, radii).value
        assert values[12] == pytest.approx(0.627241, abs=1e-3)
        assert max(values.values()) / min(values.values()) <= 1.1

    def test_scales_linearly_with_mass(self):
        mu = cantor_measure(1, 1 / 3, 6)
        doubled = mu.scaled(2.0)
        radii = [TAU * 3.0**-m for m in range(1, 7)]
        a = frostman_constant(mu, mu.alpha, radii)
        b = frostman_constant(doubled, mu.alpha, radii)
        assert b.value == pytest.approx(2.0 * a.value, rel=1e-12)

    def test_needs_positive_radii(self):
        mu = cantor_measure(1, 1 / 3, 3)
        with pytest.raises(ValueError):
            frostman_constant(mu, mu.alpha, [])
        with pytest.raises(ValueError):
            frostman_constant(mu, mu.alpha, [0.0])


class TestConvolution:
    def test_point_mass_attains_kernel_peak(self):
        mu = AtomicMeasure(1, np.array([[0.0]]), np.array([1.0]), 0.0)
        n = 32
        assert convolve_dirichlet_sup(mu, n, 64 * n) == pytest.approx(2 * n + 1, rel=1e-12)

    def test_uniform_matches_kernel_integral(self):
        # for the uniform measure the convolution is constant in x and
        # equals the normalized kernel integral; quadrature is the oracle
        n = 64
        mu = uniform_measure(1 << 12)
        value = convolve_dirichlet_sup(mu, n, 1 << 12)
        oracle = dirichlet_l1(n) / TAU
        assert value == pytest.approx(oracle, rel=0.02)

    def test_uniform_log_growth_band(self):
        mu = uniform_measure(1 << 16)
        vals = []
        for e in range(8, 15):
            n = 2**e
            m = 1 << max(int(math.ceil(math.log2(63 * n))), 16)
            vals.append(convolve_dirichlet_sup(mu, n, m) / math.log(n))
        geo = float(np.exp(np.mean(np.log(vals))))
        assert max(vals) / geo <= 1.2 and geo / min(vals) <= 1.2

    def test_maximal_dominates_plain(self):
        mu = cantor_measure(1, 1 / 3, 8)
        grid = 2 * 3**8
        for n in (16, 64, 128):
            plain = convolve_dirichlet_sup(mu, n, grid)
            maximal = convolve_dirichlet_sup(mu, n, grid, maximal=True)
            assert maximal >= plain

    def test_envelope_dominates_every_truncation(self):
        xs = np.linspace(1e-4, math.pi, 400)
        n = 40
        env = dirichlet_abs_max_envelope(n, xs)
        for m in (1, 5, 17, 40):
            assert np.all(env >= np.abs(dirichlet_kernel_1d(m, xs)) - 1e-9)

    def test_under_resolved_grid_rejected(self):
        mu = cantor_measure(1, 1 / 3, 4)
        with pytest.raises(ValueError, match="resolve"):
            convolve_dirichlet_sup(mu, 512, 128)

    def test_growth_exponent_short_sweep(self):
        mu = cantor_measure(1, 1 / 3, 10)
        grid = 2 * 3**10
        pts = [(float(2**e), convolve_dirichlet_sup(mu, 2**e, grid)) for e in range(6, 11)]
        fit = exponent_fit(pts)
        assert fit.slope == pytest.approx(1 - math.log(2) / math.log(3), abs=0.15)


class TestKernelIntegral:
    def test_bandwidth_one_analytic(self):
        assert dirichlet_l1(1) == pytest.approx(2 * math.pi / 3 + 4 * math.sqrt(3), rel=1e-6)

    def test_product_power(self):
        base = dirichlet_l1(5)
        assert dirichlet_l1(5, d=2) == pytest.approx(base**2, rel=1e-12)

    def test_maximal_dominates(self):
        for n in (1, 4, 64, 512):
            assert dirichlet_l1(n, maximal=True) >= dirichlet_l1(n)

    def test_quadrature_is_converged(self):
        for n in (3, 37, 256):
            coarse = dirichlet_l1(n)
            fine = dirichlet_l1(n, num_points=max(320 * n, 32000))
            assert coarse == pytest.approx(fine, rel=2e-4 * 1.5)

    def test_log_band(self):
        vals = [dirichlet_l1(2**e) / (e * math.log(2)) for e in range(4, 13)]
        assert max(vals) / min(vals) <= 2.0


class TestMaximalLpNorm:
    def test_single_mode_gives_total_mass_power(self):
        mu = cantor_measure(1, 1 / 3, 6)
        f = FourierData.from_dict(1, {3: 1.0})
        plan = TimeSamplingPlan(q_max=16, grid=8)
        for p in (1.0, 2.0, 6.0):
            expected = mu.total_mass ** (1.0 / p)
            assert maximal_lp_norm(f, mu, p, plan) == pytest.approx(expected, rel=1e-12)

    def test_monotone_under_plan_refinement(self):
        mu = uniform_measure(128)
        f = dirichlet_datum(16)
        coarse = TimeSamplingPlan(q_max=16, grid=8)
        fine = TimeSamplingPlan(q_max=32, grid=16)
        assert maximal_lp_norm(f, mu, 6.0, coarse) <= maximal_lp_norm(f, mu, 6.0, fine)

    def test_p_mean_below_atom_maximum(self):
        # probability weights: the p-mean never exceeds the atom maximum
        mu = cantor_measure(1, 1 / 3, 6)
        f = dirichlet_datum(8)
        plan = TimeSamplingPlan(q_max=16, grid=8)
        from talbot_lab.measures import _maximal_values_at_atoms

        sup = float(_maximal_values_at_atoms(f, mu, plan.times()).max())
        for p in (1.0, 2.0, 6.0):
            assert maximal_lp_norm(f, mu, p, plan) <= sup + 1e-12

    def test_rejects_bad_p(self):
        mu = uniform_measure(16)
        with pytest.raises(ValueError):
            maximal_lp_norm(dirichlet_datum(4), mu, 0.5, TimeSamplingPlan(8, 4))


class TestTransference:
    def test_zero_datum_gives_zero(self):
        mu = cantor_measure(1, 1 / 3, 6)
        f = FourierData.from_dict(1, {})
        plan = TimeSamplingPlan(q_max=16, grid=8)
        assert transference_ratio(f, mu, 6.0, 0.9, mu.alpha, plan) == 0.0

    def test_scaling_invariance(self):
        mu = cantor_measure(1, 1 / 3, 8)
        f = dirichlet_datum(16)
        doubled = FourierData(1, f.ks, 2.0 * f.coeffs)
        plan = TimeSamplingPlan(q_max=16, grid=8)
        s = (1 - mu.alpha) / 6 + 1 / 3 + 0.05
        a = transference_ratio(f, mu, 6.0, s, mu.alpha, plan)
        b = transference_ratio(doubled, mu, 6.0, s, mu.alpha, plan)
        assert a == pytest.approx(b, rel=1e-12)

    def test_chain_recomputes_to_same_ratio(self):
        # plumbing audit: numerator and denominator recomputed independently
        from talbot_lab.measures import DEFAULT_FROSTMAN_RADII
        from talbot_lab.schrodinger import sobolev_norm

        mu = cantor_measure(1, 1 / 3, 8)
        f = dirichlet_datum(16)
        plan = TimeSamplingPlan(q_max=16, grid=8)
        s = (1 - mu.alpha) / 6 + 1 / 3 + 0.05
        ratio = transference_ratio(f, mu, 6.0, s, mu.alpha, plan)
        num = maximal_lp_norm(f, mu, 6.0, plan)
        den = frostman_constant(mu, mu.alpha, DEFAULT_FROSTMAN_RADII).value ** (1 / 6.0) * sobolev_norm(f, s)
        assert ratio == pytest.approx(num / den, rel=1e-12)

    def test_regularity_floor_enforced(self):
        mu = cantor_measure(1, 1 / 3, 6)
        with pytest.raises(ValueError, match="transfer"):
            transference_ratio(dirichlet_datum(8), mu, 6.0, 0.1, mu.alpha, TimeSamplingPlan(8, 4))

    def test_bounded_over_short_sweep(self):
        mu = cantor_measure(1, 1 / 3, 10)
        plan = TimeSamplingPlan(q_max=32, grid=32)
        s = (1 - mu.alpha) / 6 + 1 / 3 + 0.05
        vals = [
            transference_ratio(dirichlet_datum(2**e), mu, 6.0, s, mu.alpha, plan)
            for e in range(5, 9)
        ]
        assert max(vals) <= 2.0 * float(np.median(vals))


class TestCarleson:
    def test_single_truncation_reduces_to_weighted_norm(self):
        mu = cantor_measure(1, 1 / 3, 8)
        n = 16
        f = dirichlet_datum(n)
        t = RationalTime(8)
        radii = [TAU * 3.0**-k for k in range(1, 9)]
        ratio = carleson_l2_ratio(f, mu, 0.4, mu.alpha, [n], t, eps=0.05, radii=radii)
        from talbot_lab.schrodinger import partial_sum_direct

        weighted = math.sqrt(
            sum(
                m * abs(partial_sum_direct(f, n, t, [x[0]])) ** 2
                for x, m in zip(mu.positions, mu.masses)
            )
        )
        denom = (
            math.sqrt(frostman_constant(mu, mu.alpha, radii).value)
            * n ** ((1 - mu.alpha) / 2 + 0.05)
            * f.l2()
        )
        assert ratio == pytest.approx(weighted / denom, rel=1e-9)

    def test_near_point_mass_edge_shape(self):
        # alpha = 0 itself is rejected by the well-posedness gate; just
        # above it the ratio obeys the coefficient-counting bound shape
        mu = AtomicMeasure(1, np.array([[0.5]]), np.array([1.0]), 0.01)
        n = 32
        f = dirichlet_datum(n)
        ratio = carleson_l2_ratio(f, mu, 0.5, 0.01, [2, 8, n], RationalTime(4), eps=0.05)
        assert math.isfinite(ratio)
        assert ratio * n ** (0.5 * (1 - 0.01) + 0.05) / math.sqrt(2 * n + 1) <= 1.5

    def test_illposed_regime_rejected(self):
        mu = cantor_measure(1, 1 / 3, 6)
        with pytest.raises(ValueError, match="ill-posed"):
            carleson_l2_ratio(dirichlet_datum(8), mu, 0.3, 0.4, [4, 8], RationalTime(4))

    def test_bounded_over_short_sweep(self):
        mu = cantor_measure(1, 1 / 3, 10)
        vals = []
        for e in range(5, 9):
            n = 2**e
            vals.append(
                carleson_l2_ratio(
                    dirichlet_datum(n), mu, 0.3, mu.alpha,
                    [2**i for i in range(1, e + 1)], RationalTime(8),
                )
            )
        assert max(vals) <= 2.0 * float(np.median(vals))


class TestExponentFit:
    def test_exact_square_law(self):
        fit = exponent_fit([(n, float(n) ** 2) for n in (4, 8, 16, 32, 64)])
        assert fit.slope == pytest.approx(2.0, abs=1e-12)
        assert fit.residual <= 1e-12

    def test_polylog_synthetic(self):
        pts = [(n, 5.0 * n**0.37 * math.log(n)) for n in (8, 16, 32, 64, 128)]
        fit = exponent_fit(pts, polylog=True)
        assert fit.slope == pytest.approx(0.37, abs=1e-6)
        assert fit.residual <= 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            exponent_fit([(2, 4.0), (4, 16.0)])
        with pytest.raises(ValueError):
            exponent_fit([(2, 4.0), (4, -1.0), (8, 64.0)])
