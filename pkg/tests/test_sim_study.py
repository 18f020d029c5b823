import math

import numpy as np
import pytest

from covertkey.channel import CovertConfig
from covertkey.sim import decay_study, fit_log_slope
from covertkey.sim.study import DECAY_COLUMNS

RHO_STAR = (0.28, 0.72)


def test_fit_log_slope_recovers_exact_line():
    x = np.array([1.0, 2.0, 3.0, 5.0])
    fit = fit_log_slope(x, 2.0 ** (3.0 - 0.5 * x), "m")
    assert fit.slope == pytest.approx(-0.5)
    assert fit.intercept == pytest.approx(3.0)
    assert fit.residual == pytest.approx(0.0, abs=1e-12)
    assert fit.points == 4


def test_fit_log_slope_skips_nonpositive_values():
    fit = fit_log_slope([1, 2, 3, 4], [0.0, 0.5, 0.25, math.nan])
    assert fit.points == 2 and fit.slope == pytest.approx(-1.0)
    assert math.isnan(fit_log_slope([1, 2], [0.0, 1.0]).slope)
    assert math.isnan(fit_log_slope([1, 1], [0.5, 0.25]).slope)


def test_zero_amplitude_schedule_is_error_free(ch1):
    table = decay_study(ch1, lambda n: CovertConfig(RHO_STAR, 0.0), [4, 6],
                        trials_per_n=500, seed=3)
    for row in table.rows:
        assert row["p_err"] == 0.0
        assert row["source_tv"] == 0.0
        assert row["covertness_kl"] == 0.0
        assert row["secrecy_tv"] == pytest.approx(0.0, abs=1e-12)
    assert all(math.isnan(f.slope) for f in table.fits.values())


def test_rows_carry_covertness_and_columns(ch1):
    alpha = 0.3
    cfg = CovertConfig(RHO_STAR, alpha)
    table = decay_study(ch1, lambda n: cfg, [4, 6], trials_per_n=200, seed=5)
    # single-letter divergence by direct summation over the two Z symbols
    w1, w2 = cfg.weights
    wz = ch1.wz_table
    qz = sum(p1 * p2 * wz[a, b] for a, p1 in ((0, 1 - w1), (1, w1))
             for b, p2 in ((0, 1 - w2), (1, w2)))
    d = float(sum(qz[z] * math.log2(qz[z] / wz[0, 0][z]) for z in range(qz.size)))
    for row in table.rows:
        assert row["covertness_kl"] == pytest.approx(row["n"] * d, rel=1e-12)
        assert set(DECAY_COLUMNS) <= set(row)
    assert table.to_csv().splitlines()[0] == ",".join(DECAY_COLUMNS)
    assert len(table.column("n")) == 2


def test_decay_study_is_seed_deterministic(ch1):
    a = decay_study(ch1, RHO_STAR, [8], trials_per_n=300, seed=11)
    b = decay_study(ch1, RHO_STAR, [8], trials_per_n=300, seed=11)
    assert a.rows == b.rows
