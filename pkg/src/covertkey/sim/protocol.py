"""Monte Carlo simulation of the likelihood-encoder key-generation protocol."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np
from scipy.stats import chisquare

from ..channel import BinaryMacPair, CovertConfig
from ..errors import BudgetExceeded
from .codebook import BLOCK, TAG_AUX, TAG_PROTOCOL, CodebookPair, sequence_codes, substream
from .decode import aux_rounds, decode_batch, sample_outputs
from .exact import (aux_secrecy, check_budget, covertness_kl, index_posterior_table,
                    protocol_secrecy, source_tv)
from .report import SimReport, wilson_interval


@dataclass(frozen=True, eq=False)
class ProtocolTrials:
    """Per-trial records; row r of every array belongs to trial r."""

    x1: np.ndarray
    x2: np.ndarray
    y: np.ndarray
    z: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    j1: np.ndarray
    j2: np.ndarray
    k1_hat: np.ndarray
    k2_hat: np.ndarray
    empty1: np.ndarray
    empty2: np.ndarray

    @property
    def key_error(self) -> np.ndarray:
        return (self.k1_hat != self.k1) | (self.k2_hat != self.k2)

    @property
    def failure(self) -> np.ndarray:
        return self.key_error | self.empty1 | self.empty2

    def __len__(self) -> int:
        return self.x1.shape[0]


def _pick_indices(cb: CodebookPair, user: int, x: np.ndarray, u_pick, u_fallback):
    """Uniform draw from the preimage of each row of ``x``; uniform over all indices if empty."""
    lo, hi = cb.preimage_ranges(user, sequence_codes(x))
    count = hi - lo
    empty = count == 0
    pos = lo + np.minimum((u_pick * count).astype(np.int64), np.maximum(count - 1, 0))
    total = cb.flat(user).shape[0]
    fallback = np.minimum((u_fallback * total).astype(np.int64), total - 1)
    flat = np.where(empty, fallback, cb.sorted_index(user, np.where(empty, 0, pos)))
    return flat, empty


def _run_block(cb, mac, cfg, seed, block, size, decoder):
    rng = substream(seed, TAG_PROTOCOL, block)
    n = cb.n
    w1p, w2p = cfg.weights
    x1 = (rng.random((size, n)) < w1p).astype(np.uint8)
    x2 = (rng.random((size, n)) < w2p).astype(np.uint8)
    y = sample_outputs(mac.wy_table, x1, x2, rng.random((size, n)))
    z = sample_outputs(mac.wz_table, x1, x2, rng.random((size, n)))
    u = rng.random((5, size))
    t1, e1 = _pick_indices(cb, 1, x1, u[0], u[1])
    t2, e2 = _pick_indices(cb, 2, x2, u[2], u[3])
    w1, k1, j1 = cb.unflatten(1, t1)
    w2, k2, j2 = cb.unflatten(2, t2)
    kh1, kh2 = decode_batch(cb, mac, w1, w2, y, decoder, u[4])
    return ProtocolTrials(x1, x2, y, z, w1, w2, k1, k2, j1, j2, kh1, kh2, e1, e2)


def _blocks(trials: int):
    return [(b, min(BLOCK, trials - s)) for b, s in enumerate(range(0, trials, BLOCK))]


def _concat(parts) -> ProtocolTrials:
    return ProtocolTrials(*(np.concatenate([getattr(p, f.name) for p in parts])
                            for f in fields(ProtocolTrials)))


def protocol_run(cb: CodebookPair, mac: BinaryMacPair, cfg: CovertConfig, seed: int,
                 trials: int = 1, decoder: str = "map", workers: int = 1) -> ProtocolTrials:
    """Simulate ``trials`` independent runs of the key-generation protocol.

    Each user draws X_i ~ Q^n and picks (W_i, K_i, J_i) uniformly from the
    codewords equal to X_i, falling back to a uniform index (flagged empty)
    when there are none. Charlie observes Y and W and estimates the keys
    with ``decoder``. Trials are generated in fixed blocks, each from its own
    substream of ``seed``, so the records do not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    jobs = _blocks(int(trials))

    def run(job):
        return _run_block(cb, mac, cfg, seed, job[0], job[1], decoder)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    return _concat(parts)


def _secrecy_fields(cb, mac, cfg, budget):
    try:
        sec = protocol_secrecy(cb, mac, cfg, budget)
        return {"secrecy_tv": sec["tv"], "secrecy_kl": sec["kl"], "secrecy_source": "exact",
                "protocol_secrecy_tv": sec["tv"], "protocol_secrecy_kl": sec["kl"]}
    except BudgetExceeded:
        pass
    s1, s2 = source_tv(cb, cfg, 1), source_tv(cb, cfg, 2)
    try:
        tv, kl = aux_secrecy(cb, mac, cfg, budget)
    except BudgetExceeded:
        return {"secrecy_source": "unavailable"}
    return {"secrecy_tv": min(tv + s1 + s2, 1.0), "secrecy_kl": kl,
            "secrecy_source": "triangle_bound"}


def protocol_metrics(cb: CodebookPair, mac: BinaryMacPair, cfg: CovertConfig,
                     trials: int = 10**4, seed: int = 0, decoder: str = "map",
                     budget: float | None = None, workers: int = 1) -> SimReport:
    """Monte Carlo protocol failure rate with a 95% Wilson interval.

    Secrecy is exact when the enumeration fits the budget, otherwise the
    auxiliary value plus both source-simulation distances (a triangle bound).
    Covertness is n * D(Q_Z || Q_0) because the protocol's Z-marginal is
    exactly Q_Z^n.
    """
    rec = protocol_run(cb, mac, cfg, seed, trials, decoder, workers)
    fails = int(rec.failure.sum())
    lo, hi = wilson_interval(fails, trials)
    empties = int((rec.empty1 | rec.empty2).sum())
    p = fails / trials
    return SimReport(
        mode="monte_carlo", scheme="protocol", decoder=decoder, n=cb.n,
        p_err=p, p_err_half_width=(hi - lo) / 2, p_err_interval=(lo, hi),
        source_tv_1=source_tv(cb, cfg, 1), source_tv_2=source_tv(cb, cfg, 2),
        covertness_kl=covertness_kl(mac, cfg, cb.n), trials=int(trials),
        protocol_p_err=p, empty_preimage_prob=empties / trials, seed=seed,
        **_secrecy_fields(cb, mac, cfg, budget))


def aux_monte_carlo(cb: CodebookPair, mac: BinaryMacPair, trials: int, seed: int,
                    decoder: str = "map") -> tuple:
    """Auxiliary-scheme error rate with uniform (w, k, j); returns (rate, wilson interval)."""
    fails = 0
    for b, size in _blocks(int(trials)):
        rng = substream(seed, TAG_AUX, b + 1)
        idx = []
        for user in (1, 2):
            G, M, N = cb.shape(user)
            idx.extend([rng.integers(G, size=size), rng.integers(M, size=size),
                        rng.integers(N, size=size)])
        w1, k1, j1, w2, k2, j2 = idx
        _, _, kh1, kh2 = aux_rounds(cb, mac, w1, k1, j1, w2, k2, j2, rng, decoder)
        fails += int(((kh1 != k1) | (kh2 != k2)).sum())
    return fails / trials, wilson_interval(fails, trials)


def index_law_chisquare(cb: CodebookPair, cfg: CovertConfig, rec: ProtocolTrials,
                        user: int = 1, min_expected: float = 5.0,
                        budget: float | None = None) -> tuple:
    """Chi-square goodness of fit of the sampled (X_i, W_i, K_i, J_i) against the exact law.

    Cells with expected count below ``min_expected`` are pooled into one
    cell. Returns (statistic, p-value, degrees of freedom).
    """
    A = cb.flat(user).shape[0]
    check_budget(float(2 ** cb.n) * A, budget, "index law enumeration")
    law = index_posterior_table(cb, cfg, user).ravel()
    x = rec.x1 if user == 1 else rec.x2
    w, k, j = (rec.w1, rec.k1, rec.j1) if user == 1 else (rec.w2, rec.k2, rec.j2)
    G, M, N = cb.shape(user)
    t = (w * M + k) * N + j
    observed = np.bincount(sequence_codes(x) * A + t, minlength=law.size).astype(float)
    expected = law * len(rec)
    big = expected >= min_expected
    obs = np.append(observed[big], observed[~big].sum())
    exp = np.append(expected[big], expected[~big].sum())
    if exp[-1] == 0:
        obs, exp = obs[:-1], exp[:-1]
    exp = exp * obs.sum() / exp.sum()
    stat, pval = chisquare(obs, exp)
    return float(stat), float(pval), int(obs.size - 1)
