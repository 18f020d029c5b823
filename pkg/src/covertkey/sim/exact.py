"""Exact evaluation of small codes by full enumeration."""

from __future__ import annotations

import itertools
import os

import numpy as np

from ..channel import BinaryMacPair, CovertConfig, output_dists
from ..errors import BudgetExceeded
from ..prob import kl_divergence
from .codebook import CodebookPair, sequence_codes, sequence_probs
from .decode import decide, key_posterior, log_table, tuple_loglik
from .report import SimReport

DEFAULT_BUDGET = 10**8


def enumeration_budget(budget: float | None = None) -> float:
    """Explicit budget, else ``COVERTKEY_BUDGET`` from the environment, else 1e8."""
    if budget is not None:
        return float(budget)
    env = os.environ.get("COVERTKEY_BUDGET")
    return float(env) if env else float(DEFAULT_BUDGET)


def check_budget(required: float, budget: float | None, what: str) -> None:
    b = enumeration_budget(budget)
    if required > b:
        raise BudgetExceeded(required, b, what)


def all_sequences(q: int, n: int) -> np.ndarray:
    """Every sequence in {0..q-1}^n, lexicographic with the first symbol most significant."""
    return np.array(list(itertools.product(range(q), repeat=n)), dtype=np.intp).reshape(-1, n)


def product_law(dist: np.ndarray, n: int) -> np.ndarray:
    """P^n over ``all_sequences(len(dist), n)`` in the same order."""
    out = np.ones(1)
    for _ in range(n):
        out = np.outer(out, dist).ravel()
    return out


def covertness_kl(mac: BinaryMacPair, cfg: CovertConfig, n: int) -> float:
    """n * D(Q_Z || Q_0): the warden's divergence when the Z-marginal is Q_Z^n."""
    _, qz = output_dists(mac, cfg)
    return n * kl_divergence(qz, mac.Q(0))


def spec_cost(cb: CodebookPair, mac: BinaryMacPair) -> float:
    """Term count G*M1*N1*M2*N2*|Y|^n*|Z|^n of a full auxiliary enumeration."""
    G1, M1, N1 = cb.shape(1)
    G2, M2, N2 = cb.shape(2)
    return float(G1 * G2 * M1 * N1 * M2 * N2) * \
        float(len(mac.y_alphabet)) ** cb.n * float(len(mac.z_alphabet)) ** cb.n


def _sizes(cb):
    (_, M1, N1), (_, M2, N2) = cb.shape(1), cb.shape(2)
    return (M1, N1), (M2, N2)


def _likelihoods(cb, table, w1, w2, outs):
    return tuple_loglik(cb.for_message(1, w1)[None], cb.for_message(2, w2)[None],
                        log_table(table), outs)


def tuple_errors(cb: CodebookPair, mac: BinaryMacPair, decoder: str = "map",
                 budget: float | None = None) -> np.ndarray:
    """P(k_hat != (k1, k2) | codeword tuple) for every tuple, shape (G1, G2, A1, A2).

    ``A_i = M_i * N_i`` with row ``k * N_i + j``. For the posterior-sampling
    decoder the error is 1 - P(true keys | w, y) averaged over y.
    """
    (G1, M1, N1), (G2, M2, N2) = cb.shape(1), cb.shape(2)
    ny = len(mac.y_alphabet)
    check_budget(float(G1 * G2 * M1 * N1 * M2 * N2) * ny ** cb.n, budget, "error enumeration")
    ys = all_sequences(ny, cb.n)
    sizes = _sizes(cb)
    keys1 = np.arange(M1 * N1) // N1
    keys2 = np.arange(M2 * N2) // N2
    out = np.empty((G1, G2, M1 * N1, M2 * N2))
    for w1 in range(G1):
        for w2 in range(G2):
            ll = _likelihoods(cb, mac.wy_table, w1, w2, ys)
            lik = np.exp(ll)
            if decoder == "posterior":
                post = key_posterior(ll, sizes)
                correct = post[:, keys1[:, None], keys2[None, :]]
            else:
                k1h, k2h = decide(ll, sizes, decoder)
                correct = (k1h[:, None, None] == keys1[None, :, None]) & \
                    (k2h[:, None, None] == keys2[None, None, :])
            out[w1, w2] = 1.0 - np.sum(lik * correct, axis=0)
    return np.clip(out, 0.0, 1.0)


def aux_error(cb: CodebookPair, mac: BinaryMacPair, decoder: str = "map",
              budget: float | None = None) -> float:
    """Exact auxiliary-scheme error with (w, k, j) uniform."""
    return float(tuple_errors(cb, mac, decoder, budget).mean())


def _kl_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """D(p_r || q) in bits for each row r of p."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log2(p / q), 0.0)
    return np.maximum(terms.sum(axis=-1), 0.0)


def aux_key_output_law(cb: CodebookPair, mac: BinaryMacPair) -> np.ndarray:
    """P(z | k1, k2, w1, w2) under the auxiliary scheme, shape (G1, G2, M1, M2, |Z|^n)."""
    (G1, M1, N1), (G2, M2, N2) = cb.shape(1), cb.shape(2)
    zs = all_sequences(len(mac.z_alphabet), cb.n)
    out = np.empty((G1, G2, M1, M2, zs.shape[0]))
    for w1 in range(G1):
        for w2 in range(G2):
            lik = np.exp(_likelihoods(cb, mac.wz_table, w1, w2, zs))
            lik = lik.reshape(-1, M1, N1, M2, N2).mean(axis=(2, 4))
            out[w1, w2] = np.moveaxis(lik, 0, -1)
    return out


def aux_secrecy(cb: CodebookPair, mac: BinaryMacPair, cfg: CovertConfig,
                budget: float | None = None) -> tuple:
    """(TV, KL in bits) between the auxiliary (K1, K2, W, Z) law and uniform keys/messages x Q_Z^n."""
    (G1, M1, N1), (G2, M2, N2) = cb.shape(1), cb.shape(2)
    check_budget(float(G1 * G2 * M1 * N1 * M2 * N2) * len(mac.z_alphabet) ** cb.n, budget,
                 "secrecy enumeration")
    _, qz = output_dists(mac, cfg)
    qzn = product_law(qz.probs, cb.n)
    cond = aux_key_output_law(cb, mac).reshape(-1, qzn.size)
    tv = 0.5 * np.abs(cond - qzn[None, :]).sum(axis=1).mean()
    kl = _kl_rows(cond, qzn[None, :]).mean()
    return float(tv), float(kl)


def source_tv(cb: CodebookPair, cfg: CovertConfig, user: int) -> float:
    """TV(P~_{X_i}, Q_{X_i}^n) in closed form over the distinct codewords."""
    rows, counts = cb.distinct(user)
    total = cb.flat(user).shape[0]
    q = sequence_probs(rows, cfg.weights[user - 1])
    inside = 0.5 * np.abs(counts / total - q).sum()
    return float(min(inside + 0.5 * max(1.0 - q.sum(), 0.0), 1.0))


def preimage_weights(cb: CodebookPair, cfg: CovertConfig, user: int) -> tuple:
    """Per-codeword protocol weight Q(x)/|preimage(x)| and the codebook's total Q-mass."""
    flat = cb.flat(user)
    codes = sequence_codes(flat)
    _, inv, counts = np.unique(codes, return_inverse=True, return_counts=True)
    q = sequence_probs(flat, cfg.weights[user - 1])
    weights = q / counts[inv]
    return weights, float(weights.sum())


def protocol_error(cb: CodebookPair, mac: BinaryMacPair, cfg: CovertConfig,
                   decoder: str = "map", budget: float | None = None,
                   errors: np.ndarray | None = None) -> tuple:
    """Exact protocol failure probability and the empty-preimage probability.

    A failure is an empty preimage for either user or a wrong key estimate.
    """
    if errors is None:
        errors = tuple_errors(cb, mac, decoder, budget)
    (G1, M1, N1), (G2, M2, N2) = cb.shape(1), cb.shape(2)
    q1, m1 = preimage_weights(cb, cfg, 1)
    q2, m2 = preimage_weights(cb, cfg, 2)
    q1 = q1.reshape(G1, M1 * N1)
    q2 = q2.reshape(G2, M2 * N2)
    empty = 1.0 - m1 * m2
    err = empty + float(np.einsum("ga,hb,ghab->", q1, q2, errors))
    return min(max(err, 0.0), 1.0), max(empty, 0.0)


def index_posterior_table(cb: CodebookPair, cfg: CovertConfig, user: int) -> np.ndarray:
    """P^(x, t) = Q(x) P(t | x) over all x in {0,1}^n and flat indices t, shape (2^n, A).

    Indices are drawn uniformly from the preimage, or uniformly from all
    indices when the preimage is empty.
    """
    n = cb.n
    flat = cb.flat(user)
    A = flat.shape[0]
    xs = all_sequences(2, n)
    qx = sequence_probs(xs, cfg.weights[user - 1])
    member = np.zeros((xs.shape[0], A))
    member[sequence_codes(flat), np.arange(A)] = 1.0
    counts = member.sum(axis=1, keepdims=True)
    cond = np.where(counts > 0, member / np.maximum(counts, 1.0), 1.0 / A)
    return qx[:, None] * cond


def protocol_secrecy(cb: CodebookPair, mac: BinaryMacPair, cfg: CovertConfig,
                     budget: float | None = None) -> dict:
    """Exact protocol law of (K1, K2, W, Z) against uniform keys/messages x Q_Z^n.

    Returns TV, KL (bits) and the largest deviation of the Z-marginal from Q_Z^n.
    """
    n = cb.n
    (G1, M1, N1), (G2, M2, N2) = cb.shape(1), cb.shape(2)
    nz = len(mac.z_alphabet)
    X = 2 ** n
    cost = float(G1 * M1) * X * X * nz ** n + float(G1 * M1 * G2 * M2) * X * nz ** n
    check_budget(cost, budget, "protocol secrecy enumeration")
    xs = all_sequences(2, n)
    zs = all_sequences(nz, n)
    v = []
    for user, (G, M, N) in ((1, cb.shape(1)), (2, cb.shape(2))):
        t = index_posterior_table(cb, cfg, user).reshape(X, G, M, N).sum(axis=3)
        v.append(t.reshape(X, G * M))
    logw = log_table(mac.wz_table)
    law = np.zeros((G1 * M1, G2 * M2, zs.shape[0]))
    for x1 in range(X):
        if not np.any(v[0][x1]):
            continue
        wz = np.exp(tuple_loglik(xs[x1][None, None, :], xs[None], logw, zs))[:, 0, :]
        # wz[z, x2] = W_Z^n(z | x1, x2)
        law += np.einsum("a,xb,zx->abz", v[0][x1], v[1], wz)
    _, qz = output_dists(mac, cfg)
    qzn = product_law(qz.probs, n)
    K = G1 * M1 * G2 * M2
    target = qzn / K
    tv = 0.5 * float(np.abs(law - target[None, None, :]).sum())
    kl = float(_kl_rows(law.reshape(1, -1), np.broadcast_to(target, law.shape).reshape(1, -1))[0])
    z_dev = float(np.abs(law.sum(axis=(0, 1)) - qzn).max())
    return {"tv": tv, "kl": kl, "z_marginal_dev": z_dev, "law": law}


def source_identity(cb: CodebookPair, cfg: CovertConfig, budget: float | None = None) -> tuple:
    """Both sides of the source-simulation identity, each by full enumeration.

    Returns (TV between the protocol and auxiliary laws of (X1, X2, T1, T2),
    TV between Q_X1^n x Q_X2^n and P~_X1 x P~_X2).
    """
    n = cb.n
    A1 = cb.flat(1).shape[0]
    A2 = cb.flat(2).shape[0]
    check_budget(float(4 ** n) * A1 * A2, budget, "source identity enumeration")
    hat, tilde, qs, ps = [], [], [], []
    for user, A in ((1, A1), (2, A2)):
        h = index_posterior_table(cb, cfg, user)
        tl = np.zeros_like(h)
        tl[sequence_codes(cb.flat(user)), np.arange(A)] = 1.0 / A
        hat.append(h.ravel())
        tilde.append(tl.ravel())
        qs.append(h.sum(axis=1))
        ps.append(tl.sum(axis=1))
    lhs = 0.5 * np.abs(np.outer(hat[0], hat[1]) - np.outer(tilde[0], tilde[1])).sum()
    rhs = 0.5 * np.abs(np.outer(qs[0], qs[1]) - np.outer(ps[0], ps[1])).sum()
    return float(lhs), float(rhs)


def exact_metrics(cb: CodebookPair, mac: BinaryMacPair, cfg: CovertConfig,
                  decoder: str = "map", budget: float | None = None,
                  protocol: bool = True) -> SimReport:
    """Exact auxiliary metrics, plus exact protocol metrics when ``protocol`` is set.

    Raises ``BudgetExceeded`` when the auxiliary enumeration is too large.
    Protocol figures that exceed the budget are left as NaN.
    """
    check_budget(spec_cost(cb, mac), budget, "exact metrics")
    errs = tuple_errors(cb, mac, decoder, budget)
    tv, kl = aux_secrecy(cb, mac, cfg, budget)
    extra = {}
    rep = dict(mode="exact", scheme="auxiliary", decoder=decoder, n=cb.n,
               p_err=float(errs.mean()), secrecy_tv=tv, secrecy_kl=kl,
               source_tv_1=source_tv(cb, cfg, 1), source_tv_2=source_tv(cb, cfg, 2),
               covertness_kl=covertness_kl(mac, cfg, cb.n), seed=cb.seed)
    if protocol:
        p_err, empty = protocol_error(cb, mac, cfg, decoder, budget, errs)
        rep.update(protocol_p_err=p_err, empty_preimage_prob=empty)
        try:
            sec = protocol_secrecy(cb, mac, cfg, budget)
        except BudgetExceeded as exc:
            extra["protocol_secrecy"] = str(exc)
        else:
            rep.update(protocol_secrecy_tv=sec["tv"], protocol_secrecy_kl=sec["kl"])
            extra["z_marginal_dev"] = sec["z_marginal_dev"]
    return SimReport(**rep, extra=extra)

