"""Channel sampling and key decoders for the auxiliary scheme."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ..channel import BinaryMacPair
from .codebook import TAG_AUX, CodebookPair, substream

DECODERS = ("map", "joint_ml", "posterior")

# cap on B * A1 * A2 log-likelihood cells held at once
CELL_CHUNK = 1 << 22


def log_table(w: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(w)


def tuple_loglik(c1: np.ndarray, c2: np.ndarray, logw: np.ndarray, out: np.ndarray) -> np.ndarray:
    """Natural log of W^n(out | c1[a1], c2[a2]) for every codeword pair.

    ``c1`` is (B or 1, A1, n), ``c2`` is (B or 1, A2, n), ``out`` is (B, n)
    output indices. Returns an array of shape (B, A1, A2).
    """
    c1 = np.asarray(c1, dtype=np.intp)
    c2 = np.asarray(c2, dtype=np.intp)
    out = np.asarray(out, dtype=np.intp)
    B = out.shape[0]
    ll = np.zeros((B, c1.shape[1], c2.shape[1]))
    for t in range(out.shape[1]):
        ll += logw[c1[:, :, None, t], c2[:, None, :, t], out[:, None, None, t]]
    return ll


def key_log_posterior(ll: np.ndarray, sizes) -> np.ndarray:
    """Unnormalized log P(k1, k2 | w, y) from tuple log-likelihoods, shape (B, M1, M2)."""
    (M1, N1), (M2, N2) = sizes
    B = ll.shape[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        return logsumexp(ll.reshape(B, M1, N1, M2, N2), axis=(2, 4))


def key_posterior(ll: np.ndarray, sizes) -> np.ndarray:
    """Normalized P(k1, k2 | w, y); uniform when every tuple has zero likelihood."""
    lp = key_log_posterior(ll, sizes)
    top = lp.max(axis=(1, 2), keepdims=True)
    dead = ~np.isfinite(top)
    with np.errstate(invalid="ignore"):
        p = np.exp(lp - np.where(dead, 0.0, top))
    p = np.where(dead, 1.0, p)
    return p / p.sum(axis=(1, 2), keepdims=True)


def decide(ll: np.ndarray, sizes, decoder: str = "map", u=None):
    """Key estimates (k1_hat, k2_hat) per row of ``ll``.

    ``map`` maximizes the key posterior with the codeword-randomness index
    marginalized out; ``joint_ml`` takes the keys of the most likely
    (k1, j1, k2, j2) tuple; ``posterior`` samples keys from the posterior
    using the uniforms ``u``. Ties go to the smallest flat index.
    """
    (M1, N1), (M2, N2) = sizes
    B = ll.shape[0]
    if decoder == "map":
        idx = np.argmax(key_log_posterior(ll, sizes).reshape(B, -1), axis=1)
        return idx // M2, idx % M2
    if decoder == "joint_ml":
        idx = np.argmax(ll.reshape(B, -1), axis=1)
        a1, a2 = idx // (M2 * N2), idx % (M2 * N2)
        return a1 // N1, a2 // N2
    if decoder == "posterior":
        if u is None:
            raise ValueError("posterior decoding needs uniforms")
        cdf = np.cumsum(key_posterior(ll, sizes).reshape(B, -1), axis=1)
        idx = np.minimum((np.asarray(u)[:, None] >= cdf).sum(axis=1), M1 * M2 - 1)
        return idx // M2, idx % M2
    raise ValueError(f"decoder must be one of {DECODERS}, got {decoder!r}")


def sample_outputs(table: np.ndarray, x1: np.ndarray, x2: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Output indices of a memoryless MAC by inverse-CDF sampling."""
    cdf = np.cumsum(table, axis=-1)[np.asarray(x1, np.intp), np.asarray(x2, np.intp)]
    out = (u[..., None] >= cdf).sum(axis=-1)
    return np.minimum(out, table.shape[-1] - 1)


def message_codewords(cb: CodebookPair, user: int, w: np.ndarray) -> np.ndarray:
    """Codewords under each row's public message, shape (B, M*N, n)."""
    t = cb.tables[user - 1][np.asarray(w, np.intp)]
    return t.reshape(t.shape[0], -1, cb.n)


def decode_batch(cb: CodebookPair, mac: BinaryMacPair, w1, w2, y, decoder="map", u=None):
    """Charlie's key estimates for public messages (w1, w2) and observations y."""
    G1, M1, N1 = cb.shape(1)
    G2, M2, N2 = cb.shape(2)
    logw = log_table(mac.wy_table)
    B = y.shape[0]
    step = max(1, CELL_CHUNK // (M1 * N1 * M2 * N2))
    k1 = np.empty(B, np.int64)
    k2 = np.empty(B, np.int64)
    for s in range(0, B, step):
        sl = slice(s, min(s + step, B))
        ll = tuple_loglik(message_codewords(cb, 1, w1[sl]), message_codewords(cb, 2, w2[sl]),
                          logw, y[sl])
        k1[sl], k2[sl] = decide(ll, ((M1, N1), (M2, N2)), decoder,
                                None if u is None else u[sl])
    return k1, k2


@dataclass(frozen=True)
class AuxRound:
    """Outputs of one auxiliary transmission and Charlie's key estimates."""

    y: np.ndarray
    z: np.ndarray
    k1_hat: int
    k2_hat: int


def aux_rounds(cb: CodebookPair, mac: BinaryMacPair, w1, k1, j1, w2, k2, j2,
               rng: np.random.Generator, decoder: str = "map"):
    """Vectorized auxiliary transmissions; returns (y, z, k1_hat, k2_hat) arrays."""
    w1, k1, j1, w2, k2, j2 = (np.atleast_1d(np.asarray(v, np.intp)) for v in (w1, k1, j1, w2, k2, j2))
    x1 = cb.tables[0][w1, k1, j1]
    x2 = cb.tables[1][w2, k2, j2]
    B, n = x1.shape
    y = sample_outputs(mac.wy_table, x1, x2, rng.random((B, n)))
    z = sample_outputs(mac.wz_table, x1, x2, rng.random((B, n)))
    u = rng.random(B)
    kh1, kh2 = decode_batch(cb, mac, w1, w2, y, decoder, u)
    return y, z, kh1, kh2


def aux_round(cb: CodebookPair, mac: BinaryMacPair, w, k1: int, j1: int, k2: int, j2: int,
              seed: int, decoder: str = "map") -> AuxRound:
    """One use of the auxiliary scheme with public message ``w = (w1, w2)``."""
    w1, w2 = w
    for (G, M, N), (wi, ki, ji) in zip((cb.shape(1), cb.shape(2)),
                                      ((w1, k1, j1), (w2, k2, j2))):
        if not (0 <= wi < G and 0 <= ki < M and 0 <= ji < N):
            raise ValueError(f"index ({wi}, {ki}, {ji}) out of range for sizes {(G, M, N)}")
    y, z, kh1, kh2 = aux_rounds(cb, mac, w1, k1, j1, w2, k2, j2,
                                substream(seed, TAG_AUX, 0), decoder)
    return AuxRound(y[0], z[0], int(kh1[0]), int(kh2[0]))
