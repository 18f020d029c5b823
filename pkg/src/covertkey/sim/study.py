"""Block-length sweeps of the full simulation pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..channel import BinaryMacPair, CovertConfig, alpha_schedule
from .codebook import sample_codebooks
from .plan import rate_plan
from .protocol import protocol_metrics
from .report import rows_to_csv

DECAY_COLUMNS = ["n", "alpha", "n_alpha", "p_err", "p_err_half_width", "secrecy_tv",
                 "secrecy_source", "source_tv", "source_tv_1", "source_tv_2",
                 "covertness_kl", "empty_preimage_prob", "feasible", "violations",
                 "G1", "M1", "N1", "G2", "M2", "N2"]

FIT_METRICS = ("p_err", "secrecy_tv", "source_tv")


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line log2(metric) = intercept + slope * n * alpha_n."""

    metric: str
    slope: float
    intercept: float
    residual: float
    points: int

    def fitted(self, x) -> np.ndarray:
        return self.intercept + self.slope * np.asarray(x, dtype=float)


@dataclass(frozen=True)
class DecayTable:
    rows: list
    fits: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        return rows_to_csv(self.rows, DECAY_COLUMNS)

    def to_dict(self) -> dict:
        return {"rows": self.rows,
                "fits": {k: vars(v) for k, v in self.fits.items()}}


def fit_log_slope(x, metric_values, metric: str = "") -> SlopeFit:
    """Fit log2(metric) against x; NaN slope when fewer than two positive finite values."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(metric_values, dtype=float)
    ok = np.isfinite(v) & (v > 0)
    if ok.sum() < 2 or np.ptp(x[ok]) == 0:
        return SlopeFit(metric, math.nan, math.nan, math.nan, int(ok.sum()))
    coef, res, *_ = np.polyfit(x[ok], np.log2(v[ok]), 1, full=True)
    rms = math.sqrt(float(res[0]) / ok.sum()) if res.size else 0.0
    return SlopeFit(metric, float(coef[0]), float(coef[1]), rms, int(ok.sum()))


def decay_study(mac: BinaryMacPair, cfg_schedule, n_list: Sequence[int], mu=(0.1, 0.1, 0.1),
                trials_per_n: int = 10**4, seed: int = 0, decoder: str = "map",
                budget: float | None = None) -> DecayTable:
    """Plan, sample and simulate at every n, then fit each metric's log2 against n * alpha_n.

    ``cfg_schedule`` is either a callable ``n -> CovertConfig`` or a weight
    split ``rho`` used with the default amplitude schedule. Plans are built
    with the relaxed policy, so rows whose integer sizes miss a constraint
    are kept and flagged.
    """
    if callable(cfg_schedule):
        make: Callable[[int], CovertConfig] = cfg_schedule
    else:
        rho = tuple(cfg_schedule)

        def make(n):
            return CovertConfig(rho, alpha_schedule(n))

    mu1, mu2, mu3 = mu
    rows = []
    for idx, n in enumerate(n_list):
        cfg = make(int(n))
        plan = rate_plan(mac, cfg, int(n), mu1, mu2, mu3, policy="relaxed")
        cb = sample_codebooks(plan, cfg, _child_seed(seed, idx, 0))
        rep = protocol_metrics(cb, mac, cfg, trials_per_n, _child_seed(seed, idx, 1),
                               decoder, budget)
        (s1, s2) = plan.sizes
        rows.append({
            "n": int(n), "alpha": cfg.alpha, "n_alpha": n * cfg.alpha,
            "p_err": rep.p_err, "p_err_half_width": rep.p_err_half_width,
            "secrecy_tv": rep.secrecy_tv, "secrecy_source": rep.secrecy_source,
            "source_tv": rep.source_tv_1 + rep.source_tv_2,
            "source_tv_1": rep.source_tv_1, "source_tv_2": rep.source_tv_2,
            "covertness_kl": rep.covertness_kl,
            "empty_preimage_prob": rep.empty_preimage_prob,
            "feasible": plan.feasible, "violations": ";".join(plan.violations),
            "G1": s1.G, "M1": s1.M, "N1": s1.N, "G2": s2.G, "M2": s2.M, "N2": s2.N,
        })
    x = [r["n_alpha"] for r in rows]
    fits = {m: fit_log_slope(x, [r[m] for r in rows], m) for m in FIT_METRICS}
    return DecayTable(rows, fits)


def _child_seed(seed: int, *key: int) -> int:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(99,) + key)
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))
