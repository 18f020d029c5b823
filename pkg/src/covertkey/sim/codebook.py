"""Random codebooks for the auxiliary scheme and the counter-based RNG they use."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channel import CovertConfig
from .plan import RatePlan

BLOCK = 4096
MAX_CODEWORDS = 10**7

# stream tags keep codebook, protocol and auxiliary draws disjoint
TAG_CODEBOOK = 1
TAG_PROTOCOL = 2
TAG_AUX = 3


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the substream ``key`` of ``seed``; independent of call order."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def sequence_codes(bits: np.ndarray) -> np.ndarray:
    """Integer code of each binary row, first symbol most significant."""
    bits = np.asarray(bits, dtype=np.int64)
    n = bits.shape[-1]
    if n > 62:
        raise ValueError("sequence codes support n <= 62")
    weights = np.left_shift(np.int64(1), np.arange(n - 1, -1, -1, dtype=np.int64))
    return bits @ weights


@dataclass(frozen=True, eq=False)
class CodebookPair:
    """Per-user codeword tables ``table[i][w, k, j]`` of binary sequences of length n.

    Bits index the user's input alphabet (0 innocent, 1 meaningful).
    Flat codeword index within user i is ``(w * M + k) * N + j``.
    """

    tables: tuple
    n: int
    seed: int | None
    _codes: tuple = field(init=False, repr=False)
    _order: tuple = field(init=False, repr=False)

    def __post_init__(self):
        tables = []
        for t in self.tables:
            t = np.ascontiguousarray(t, dtype=np.uint8)
            if t.ndim != 4 or t.shape[3] != self.n:
                raise ValueError(f"codebook table must have shape (G, M, N, {self.n})")
            if np.any(t > 1):
                raise ValueError("codewords must be binary")
            t.setflags(write=False)
            tables.append(t)
        object.__setattr__(self, "tables", tuple(tables))
        codes, orders = [], []
        for t in tables:
            c = sequence_codes(t.reshape(-1, self.n))
            o = np.argsort(c, kind="stable")
            codes.append(c[o])
            orders.append(o)
        object.__setattr__(self, "_codes", tuple(codes))
        object.__setattr__(self, "_order", tuple(orders))

    def shape(self, user: int) -> tuple:
        return self.tables[user - 1].shape[:3]

    def flat(self, user: int) -> np.ndarray:
        """Codewords of ``user`` as an array of shape (G*M*N, n)."""
        return self.tables[user - 1].reshape(-1, self.n)

    def for_message(self, user: int, w: int) -> np.ndarray:
        """Codewords under public message ``w`` as (M*N, n), row ``k * N + j``."""
        t = self.tables[user - 1]
        return t[w].reshape(-1, self.n)

    def unflatten(self, user: int, idx):
        G, M, N = self.shape(user)
        idx = np.asarray(idx)
        return idx // (M * N), (idx // N) % M, idx % N

    def preimage(self, user: int, x) -> np.ndarray:
        """Sorted flat indices of all codewords equal to ``x``."""
        lo, hi = self.preimage_ranges(user, sequence_codes(np.asarray(x)[None, :]))
        return np.sort(self._order[user - 1][lo[0]:hi[0]])

    def preimage_ranges(self, user: int, codes: np.ndarray):
        """Index ranges into the sorted code list matching each code."""
        c = self._codes[user - 1]
        return np.searchsorted(c, codes, "left"), np.searchsorted(c, codes, "right")

    def sorted_index(self, user: int, pos: np.ndarray) -> np.ndarray:
        return self._order[user - 1][pos]

    def distinct(self, user: int):
        """Distinct codewords of ``user`` and their multiplicities."""
        rows, counts = np.unique(self.flat(user), axis=0, return_counts=True)
        return rows, counts


def sample_codebooks(plan: RatePlan, cfg: CovertConfig, seed: int) -> CodebookPair:
    """Draw every codeword symbol i.i.d.; P(meaningful) = rho_i * alpha.

    Rows are generated in blocks of ``BLOCK`` codewords, each from its own
    substream of ``seed``, so any row is reproducible from (seed, user, block).
    """
    n = plan.n
    tables = []
    for user, (s, w) in enumerate(zip(plan.sizes, cfg.weights), start=1):
        count = s.codewords
        if count > MAX_CODEWORDS:
            raise ValueError(f"user {user} needs {count} codewords, cap is {MAX_CODEWORDS}")
        flat = np.empty((count, n), dtype=np.uint8)
        for b, start in enumerate(range(0, count, BLOCK)):
            stop = min(start + BLOCK, count)
            u = substream(seed, TAG_CODEBOOK, user, b).random((stop - start, n))
            flat[start:stop] = u < w
        tables.append(flat.reshape(s.G, s.M, s.N, n))
    return CodebookPair(tuple(tables), n, int(seed))


def sequence_probs(bits: np.ndarray, weight: float) -> np.ndarray:
    """Q^n of each binary row when P(1) = weight."""
    bits = np.asarray(bits)
    ones = bits.sum(axis=-1)
    zeros = bits.shape[-1] - ones
    with np.errstate(divide="ignore"):
        return np.where(ones > 0, weight ** ones, 1.0) * (1.0 - weight) ** zeros
