import math
from fractions import Fraction

import numpy as np
import pytest

from talbot_lab.counterexample import (
    CounterexampleParams,
    blowup_trajectory,
    claim_regime,
    datum_block,
    full_datum_value,
    make_blowup_ladder,
    sample_points,
    time_set,
    trajectory_growth_fit,
    verify_claim_i,
    verify_claim_ii,
    verify_claim_iii,
)
from talbot_lab.counterexample import _block_eval
from talbot_lab.schrodinger import RationalTime, SamplePoint, block_split, partial_sum_direct

DESK = dict(d=1, alpha=1.0, lam=16, delta=0.05, kappa=0.25)

# Blow-up demonstration parameters: the decoherence of the first level above
# j needs lam * c1 >= 1/2, which the small-base desk parameters do not give.
BLOWUP = dict(
    d=1, alpha=1.0, lam=256, delta=0.1, kappa=1 / 16,
    c1=Fraction(1, 8), c2=Fraction(1, 4),
)


class TestParams:
    def test_derived_quantities(self):
        p = CounterexampleParams(**DESK)
        assert p.s_alpha == pytest.approx(0.25)
        assert p.tau == pytest.approx(2.0)

    def test_two_dimensional_derivations(self):
        p = CounterexampleParams(d=2, alpha=2.0, lam=8, delta=0.05, kappa=1 / 4)
        assert p.s_alpha == pytest.approx(2 * (3 - 2) / 6)
        assert p.tau == pytest.approx(1.5)

    def test_delta_must_stay_below_s_alpha(self):
        with pytest.raises(ValueError, match="s_alpha"):
            CounterexampleParams(d=1, alpha=1.0, lam=16, delta=0.3, kappa=0.25)

    def test_window_cover_condition(self):
        # lam^(1/tau) = 4 > 1/kappa = 2
        with pytest.raises(ValueError, match="overlap"):
            CounterexampleParams(d=1, alpha=1.0, lam=16, delta=0.05, kappa=0.5)

    def test_offset_order_enforced(self):
        with pytest.raises(ValueError, match="c1 < c2"):
            CounterexampleParams(**DESK, c1=Fraction(1, 50), c2=Fraction(1, 100))


class TestDatumBlock:
    def test_smallest_block_single_coefficient(self):
        p = CounterexampleParams(d=1, alpha=1.0, lam=2, delta=0.05, kappa=0.5)
        f = datum_block(p, 1)
        assert f.nnz == 1
        assert tuple(f.ks[0]) == (1,)
        assert abs(f.coeffs[0]) == pytest.approx(2.0 ** -(p.s_alpha + 0.5 - p.delta))

    def test_block_count_and_range(self):
        p = CounterexampleParams(**DESK)
        f = datum_block(p, 2)
        assert f.nnz == 240
        assert f.ks.min() == 16 and f.ks.max() == 255

    def test_count_formula_across_parameters(self):
        for d, lam, j in [(1, 4, 2), (2, 4, 2), (1, 8, 3), (2, 8, 2)]:
            p = CounterexampleParams(d=d, alpha=float(d), lam=lam, delta=0.01, kappa=1 / 8)
            assert datum_block(p, j).nnz == (lam**j - lam ** (j - 1)) ** d

    def test_spectral_disjointness(self):
        p = CounterexampleParams(**DESK)
        supports = [set(map(tuple, datum_block(p, j).ks)) for j in (1, 2, 3)]
        assert supports[0] & supports[1] == set()
        assert supports[1] & supports[2] == set()


class TestTimeSet:
    def test_window_example(self):
        p = CounterexampleParams(**DESK)
        assert [t.q for t in time_set(p, 2)] == [4, 8, 12, 16]

    def test_all_divisible_by_four(self):
        p = CounterexampleParams(**DESK)
        for j in (1, 2, 3, 4):
            assert all(t.q % 4 == 0 for t in time_set(p, j))

    def test_empty_window_is_named(self):
        # [kappa * 3, 3] = [1, 3] holds no multiple of 4
        p = CounterexampleParams(d=1, alpha=1.0, lam=9, delta=0.05, kappa=1 / 3)
        with pytest.raises(ValueError, match="cover condition"):
            time_set(p, 1)


class TestSamplePoints:
    def test_anchor_window_q8(self):
        p = CounterexampleParams(**DESK)
        pts = sample_points(p, 2, RationalTime(8), 40, seed=3)
        assert {pt.p[0] for pt in pts} <= {2, 4}

    def test_offsets_inside_window(self):
        p = CounterexampleParams(**DESK)
        lo, hi = p.eps_window(3)
        pts = sample_points(p, 3, RationalTime(16), 50, seed=4)
        assert all(lo <= pt.eps[0] <= hi for pt in pts)

    def test_deterministic_in_seed(self):
        p = CounterexampleParams(**DESK)
        a = sample_points(p, 2, RationalTime(12), 10, seed=9)
        b = sample_points(p, 2, RationalTime(12), 10, seed=9)
        assert a == b

    def test_empty_anchor_window_rejected(self):
        p = CounterexampleParams(**DESK)
        with pytest.raises(ValueError, match="no even integer"):
            sample_points(p, 2, RationalTime(2), 1, seed=0)


class TestClaimGrowth:
    def test_factor_ratios_in_frozen_band(self):
        p = CounterexampleParams(**DESK)
        for j in (2, 3):
            for t in time_set(p, j):
                rep = verify_claim_i(p, j, sample_points(p, j, t, 8, seed=5 * j), p.lam**j + 1)
                for row in rep.rows:
                    for fr in row.factor_ratios:
                        assert 1 / 8 <= fr <= 8  # measured range [1.32, 2.66]

    def test_growth_slope_matches_delta(self):
        p = CounterexampleParams(**DESK)
        from talbot_lab.measures import exponent_fit

        pts = []
        for j in (2, 3, 4):
            t = time_set(p, j)[-1]
            rep = verify_claim_i(p, j, sample_points(p, j, t, 12, seed=7), p.lam**j + 1)
            pts.append((16.0**j, rep.ratio_geomean * 16.0 ** (j * p.delta)))
        fit = exponent_fit(pts)
        assert abs(fit.slope - p.delta) / p.delta <= 0.25

    def test_degenerate_block_flagged_boundary_only(self):
        p = CounterexampleParams(d=1, alpha=1.0, lam=2, delta=0.05, kappa=0.5 - 1e-9)
        x = SamplePoint((2,), 8, (1e-3,))
        rep = verify_claim_i(p, 2, [x], 5)
        assert rep.rows[0].boundary_only

    def test_requires_large_truncation(self):
        p = CounterexampleParams(**DESK)
        with pytest.raises(ValueError, match="N >"):
            verify_claim_i(p, 2, [SamplePoint((2,), 8, (1e-4,))], 16)

    def test_coherence_window_invariant(self):
        # every claim-(i) sample keeps all complete-period phases small
        p = CounterexampleParams(**DESK)
        for j in (2, 3):
            for t in time_set(p, j)[-2:]:
                for s in sample_points(p, j, t, 8, seed=13):
                    _, _, _, r = block_split(p.lam, j, s.q)
                    assert r * s.q * max(s.eps) < 1 / 100

    def test_n_stability(self):
        p = CounterexampleParams(**DESK)
        f = datum_block(p, 2)
        t = RationalTime(16)
        x = SamplePoint((4,), 16, (2e-4,))
        assert partial_sum_direct(f, 16**2, t, x) == partial_sum_direct(f, 16**3, t, x)


class TestClaimBelow:
    def test_regime_classification(self):
        p = CounterexampleParams(**DESK)
        assert claim_regime(p, 3, 1) == "first_derivative"
        assert claim_regime(p, 3, 2) == "upper"
        assert claim_regime(p, 4, 2) == "second_derivative"

    def test_upper_regime_ratios_below_frozen_cap(self):
        p = CounterexampleParams(**DESK)
        for j, k in [(3, 2), (4, 3)]:
            t = time_set(p, j)[-1]
            rep = verify_claim_ii(p, j, k, sample_points(p, j, t, 8, seed=3 * j), p.lam**j + 1)
            assert rep.rows[0].regime == "upper"
            assert rep.ratio_max <= 4.0  # frozen: measured max 1.33

    def test_extended_estimate_band(self):
        p = CounterexampleParams(**DESK)
        t = time_set(p, 4)[-1]
        rep = verify_claim_ii(p, 4, 3, sample_points(p, 4, t, 8, seed=21), p.lam**4 + 1)
        for row in rep.rows:
            assert 1 / 8 <= row.extra <= 8

    def test_derivative_regime_factor_sums_bounded(self):
        from talbot_lab.expsum import vdc_first_derivative_bound

        p = CounterexampleParams(**DESK)
        cap = 8 * vdc_first_derivative_bound(1 / 8)
        for j in (3, 4):
            t = time_set(p, j)[-1]
            rep = verify_claim_ii(p, j, 1, sample_points(p, j, t, 8, seed=4 * j), p.lam**j + 1)
            assert rep.rows[0].regime == "first_derivative"
            for row in rep.rows:
                assert max(row.factor_mags) <= cap

    def test_consistency_with_growth_code_path(self):
        # shared samples: the k-level magnitudes must agree between the two
        # verification entry points to rounding error
        p = CounterexampleParams(**DESK)
        j, k = 4, 3
        t = time_set(p, j)[-1]
        samples = sample_points(p, j, t, 6, seed=77)
        n = p.lam**j + 1
        rep_ii = verify_claim_ii(p, j, k, samples, n)
        rep_i = verify_claim_i(p, k, samples, n)
        lam = float(p.lam)
        for a, b in zip(rep_ii.rows, rep_i.rows):
            v_ii = a.ratio * lam ** (k * p.delta)
            v_i = b.ratio * lam ** (k * p.delta)
            assert v_ii == pytest.approx(v_i, rel=1e-12)

    def test_k_range_validated(self):
        p = CounterexampleParams(**DESK)
        with pytest.raises(ValueError, match="1 <= k < j"):
            verify_claim_ii(p, 3, 3, [SamplePoint((4,), 16, (1e-4,))], 16**3 + 1)


class TestClaimAbove:
    def test_factor_ratios_below_frozen_cap(self):
        p = CounterexampleParams(**DESK)
        for j in (2, 3):
            t = time_set(p, j)[-1]
            samples = sample_points(p, j, t, 6, seed=6 * j)
            for k in (j + 1, j + 2):
                lo, hi = p.lam ** (k - 1), p.lam**k
                rep = verify_claim_iii(p, j, k, samples, [lo, hi - 1])
                for row in rep.rows:
                    assert max(row.factor_ratios) <= 256.0  # frozen: measured <= 148

    def test_decay_rate_positive(self):
        p = CounterexampleParams(**DESK)
        j = 2
        t = time_set(p, j)[-1]
        samples = sample_points(p, j, t, 6, seed=14)
        mags = {}
        for k in (j + 1, j + 2):
            rep = verify_claim_iii(p, j, k, samples, [p.lam**k - 1])
            mags[k] = rep.ratio_geomean * 16.0 ** (j * p.delta - (p.s_alpha / 2) * (k - j))
        c = (math.log(mags[j + 1]) - math.log(mags[j + 2])) / math.log(16.0)
        assert c >= p.s_alpha / 4

    def test_truncation_below_block_is_exactly_zero(self):
        p = CounterexampleParams(**DESK)
        f = datum_block(p, 3)
        value = partial_sum_direct(f, p.lam**2 - 1, RationalTime(16), SamplePoint((4,), 16, (1e-4,)))
        assert value == 0.0

    def test_offsets_below_window_rejected(self):
        p = CounterexampleParams(**DESK)
        bad = SamplePoint((4,), 16, (1e-9,))
        with pytest.raises(ValueError, match="lower bound"):
            verify_claim_iii(p, 2, 3, [bad], [p.lam**2])

    def test_truncations_outside_block_rejected(self):
        p = CounterexampleParams(**DESK)
        good = sample_points(p, 2, RationalTime(16), 1, seed=1)
        with pytest.raises(ValueError, match="outside the block"):
            verify_claim_iii(p, 2, 3, good, [p.lam**3])


class TestBlowup:
    def test_trajectory_times_and_positivity(self):
        p = CounterexampleParams(**BLOWUP)
        ladder = make_blowup_ladder(p, 3, seed=2)
        traj = blowup_trajectory(p, ladder, 3)
        lam = float(p.lam)
        for j, t_j, value in traj:
            assert value > 0 and math.isfinite(value)
            assert 2 * math.pi * lam ** (-j / p.tau) <= t_j + 1e-12
            assert t_j <= 2 * math.pi / p.kappa * lam ** (-j / p.tau) + 1e-12
        assert traj[0][1] > traj[1][1] > traj[2][1]

    def test_growth_slope_within_band(self):
        p = CounterexampleParams(**BLOWUP)
        slopes = []
        for seed in range(5):
            traj = blowup_trajectory(p, make_blowup_ladder(p, 3, seed=100 + seed), 3)
            slopes.append(trajectory_growth_fit(p, traj).slope)
        median = float(np.median(slopes))
        assert abs(median - p.delta) / p.delta <= 0.30

    def test_triangle_ledger_on_accepted_samples(self):
        # the off-level blocks stay below half of the main term
        p = CounterexampleParams(**BLOWUP)
        n = p.lam**3
        for j in (2, 3):
            t = time_set(p, j)[-1]
            for s in sample_points(p, j, t, 6, seed=19 * j):
                mags, _ = _block_eval(p, j, s, n)
                main = p.amplitude(j) * float(np.prod(mags))
                rest = sum(
                    p.amplitude(k) * float(np.prod(_block_eval(p, k, s, n)[0]))
                    for k in range(1, 4)
                    if k != j
                )
                assert rest <= 0.5 * main

    def test_block_sobolev_norm_tracks_exponent(self):
        # ||f_j||_{H^s} against lam^(-j(s_alpha - delta - s)): the quotient
        # stays inside [1/4, 4] across the first five levels
        from talbot_lab.schrodinger import sobolev_norm

        p = CounterexampleParams(**DESK)
        s = 0.15
        for j in range(1, 6):
            f = datum_block(p, j)
            ratio = sobolev_norm(f, s) / (16.0 ** (-j * (p.s_alpha - p.delta - s)))
            assert 0.25 <= ratio <= 4.0

    def test_full_datum_splits_into_blocks(self):
        p = CounterexampleParams(**DESK)
        t = time_set(p, 2)[-1]
        x = sample_points(p, 2, t, 1, seed=8)[0]
        n = p.lam**3
        total = full_datum_value(p, 3, t, x, n)
        direct = sum(
            partial_sum_direct(datum_block(p, k), n, t, x) for k in (1, 2, 3)
        )
        assert total == pytest.approx(direct, rel=1e-9)
