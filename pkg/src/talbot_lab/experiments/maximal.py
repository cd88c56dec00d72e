"""Experiment `maximal`: kernel growth, measure convolutions, weighted norms."""

from __future__ import annotations

import math

import numpy as np

from .. import goldens
from ..measures import (
    TimeSamplingPlan,
    cantor_measure,
    carleson_l2_ratio,
    convolve_dirichlet_sup,
    dirichlet_l1,
    exponent_fit,
    frostman_constant,
    maximal_lp_norm,
    transference_ratio,
    uniform_measure,
)
from ..schrodinger import FourierData, RationalTime
from .report import GoldenDiff, RunReport, Sweep


def _dirichlet_datum(n: int) -> FourierData:
    ks = np.arange(-n, n + 1, dtype=np.int64).reshape(-1, 1)
    return FourierData(1, ks, np.ones(ks.shape[0], dtype=complex))


def run(cfg: dict, jobs: int = 1) -> RunReport:
    report = RunReport("maximal", {})
    level = int(cfg["cantor_level"])
    mu = cantor_measure(1, 1.0 / 3.0, level)
    alpha = mu.alpha

    # measure-convolution growth exponent on the atom-aligned grid
    grid = 2 * 3**level
    conv_pts = []
    for e in range(int(cfg["conv_exp_min"]), int(cfg["conv_exp_max"]) + 1):
        n = 2**e
        conv_pts.append((float(n), convolve_dirichlet_sup(mu, n, grid)))
    fit_plain = exponent_fit(conv_pts)
    fit_poly = exponent_fit(conv_pts, polylog=True)
    target = 1.0 - math.log(2.0) / math.log(3.0)
    report.add_check(
        "convolution_polylog_slope_error",
        abs(fit_poly.slope - target),
        float(cfg["conv_slope_tol"]),
        "<=",
    )
    report.golden_diffs.append(
        GoldenDiff("convolution_plain_slope", target, fit_plain.slope)
    )
    report.sweeps.append(
        Sweep(
            "convolution_growth",
            ["n", "sup_value"],
            [[s, v] for s, v in conv_pts],
            fit={"slope": fit_plain.slope, "intercept": fit_plain.intercept, "polylog": False},
        )
    )

    # kernel integral: value / ln N in a factor-2 band, maximal >= plain
    plain_band, max_band = [], []
    l1_rows = []
    dominance_ok = 1.0
    for e in range(int(cfg["l1_exp_min"]), int(cfg["l1_exp_max"]) + 1):
        n = 2**e
        plain = dirichlet_l1(n)
        maxi = dirichlet_l1(n, maximal=True)
        dominance_ok = min(dominance_ok, float(maxi >= plain))
        plain_band.append(plain / math.log(n))
        max_band.append(maxi / math.log(n))
        l1_rows.append([float(n), plain, maxi])
    report.add_check("l1_plain_band", max(plain_band) / min(plain_band), float(cfg["l1_band"]), "<=")
    report.add_check("l1_maximal_band", max(max_band) / min(max_band), float(cfg["l1_band"]), "<=")
    report.add_check("l1_maximal_dominates", dominance_ok, 1.0, ">=")
    report.golden_diffs.append(
        GoldenDiff("l1_bandwidth_one", goldens.DIRICHLET_L1_N1, dirichlet_l1(1))
    )
    report.sweeps.append(Sweep("kernel_l1", ["n", "plain", "maximal"], l1_rows))

    # weighted maximal norm of the full-band datum against uniform weight
    plan = TimeSamplingPlan(q_max=int(cfg["plan_q_max"]), grid=int(cfg["plan_grid"]))
    mu_uniform = uniform_measure(512)
    lp_ratios = []
    lp_rows = []
    for e in range(int(cfg["lp_exp_min"]), int(cfg["lp_exp_max"]) + 1):
        n = 2**e
        f = _dirichlet_datum(n)
        value = maximal_lp_norm(f, mu_uniform, 6.0, plan)
        ratio = value / (n ** (1.0 / 3.0 + 0.01) * f.l2())
        lp_ratios.append(ratio)
        lp_rows.append([float(n), ratio, value])
    report.add_check(
        "maximal_lp_ratio_band",
        max(lp_ratios) / float(np.median(lp_ratios)),
        float(cfg["sweep_band"]),
        "<=",
    )
    report.sweeps.append(Sweep("maximal_lp", ["n", "ratio", "norm"], lp_rows))

    # transfer to the fractal weight and the truncation-maximal ratio
    s_transfer = (1.0 - alpha) / 6.0 + 1.0 / 3.0 + 0.05
    s_carleson = float(cfg["carleson_s"])
    t_fixed = RationalTime(int(cfg["carleson_q"]))
    trans, carl = [], []
    trans_rows, carl_rows = [], []
    for e in range(int(cfg["sweep_exp_min"]), int(cfg["sweep_exp_max"]) + 1):
        n = 2**e
        f = _dirichlet_datum(n)
        tr = transference_ratio(f, mu, 6.0, s_transfer, alpha, plan)
        cr = carleson_l2_ratio(
            f, mu, s_carleson, alpha, [2**i for i in range(1, e + 1)], t_fixed
        )
        trans.append(tr)
        carl.append(cr)
        trans_rows.append([float(n), tr])
        carl_rows.append([float(n), cr])
    band = float(cfg["sweep_band"])
    report.add_check("transference_max_over_median", max(trans) / float(np.median(trans)), band, "<=")
    report.add_check("carleson_max_over_median", max(carl) / float(np.median(carl)), band, "<=")
    report.sweeps.append(Sweep("transference", ["n", "ratio"], trans_rows))
    report.sweeps.append(Sweep("carleson", ["n", "ratio"], carl_rows))

    # the ill-posed weighted regime must be rejected
    rejected = 0.0
    try:
        carleson_l2_ratio(
            _dirichlet_datum(16), mu, s_carleson, 1.0 - 2 * s_carleson - 0.01,
            [4, 8, 16], t_fixed,
        )
    except ValueError:
        rejected = 1.0
    report.add_check("illposed_regime_rejected", rejected, 1.0, ">=")

    report.golden_diffs.append(
        GoldenDiff(
            "middle_thirds_frostman",
            goldens.MIDDLE_THIRDS_FROSTMAN,
            frostman_constant(
                mu, alpha, [2 * math.pi * 3.0 ** (-m) for m in range(1, level + 1)]
            ).value,
        )
    )
    return report
