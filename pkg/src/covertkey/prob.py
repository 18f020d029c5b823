"""Exact finite-alphabet probability and information measures.

All logarithms are base 2. ``to_nats`` converts a bit-valued divergence for
the few inequalities (Pinsker, second-order divergence expansions) whose
constants only hold in natural units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .errors import (
    AbsoluteContinuityViolation,
    AxisOverlap,
    DomainError,
    SumOverflow,
    SupportMismatch,
)

NORM_TOL = 1e-12
IDENTITY_TOL = 1e-10
MERGE_TOL = 1e-12
DEFAULT_ATOM_CAP = 10**7

LN2 = math.log(2.0)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteDist:
    """Probability vector over an ordered, finite alphabet."""

    support: tuple
    probs: np.ndarray

    def __init__(self, support: Sequence[Hashable], probs, tol: float = NORM_TOL):
        support = tuple(support)
        probs = _frozen(probs)
        if probs.ndim != 1 or probs.shape[0] != len(support):
            raise ValueError(f"{len(support)} symbols but probs has shape {probs.shape}")
        if len(set(support)) != len(support):
            raise ValueError(f"support symbols are not distinct: {support}")
        if np.any(probs < 0) or np.any(probs > 1):
            raise ValueError(f"probabilities outside [0, 1]: {probs}")
        if abs(probs.sum() - 1.0) > tol:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def bernoulli(cls, p: float) -> "DiscreteDist":
        """Law on {0, 1} with P(1) = p."""
        return cls((0, 1), [1.0 - p, p])

    @classmethod
    def point_mass(cls, support: Sequence[Hashable], symbol: Hashable) -> "DiscreteDist":
        support = tuple(support)
        probs = np.zeros(len(support))
        probs[support.index(symbol)] = 1.0
        return cls(support, probs)

    @classmethod
    def uniform(cls, support: Sequence[Hashable]) -> "DiscreteDist":
        support = tuple(support)
        return cls(support, np.full(len(support), 1.0 / len(support)))

    def __getitem__(self, symbol) -> float:
        return float(self.probs[self.support.index(symbol)])

    def __len__(self) -> int:
        return len(self.support)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteDist):
            return NotImplemented
        return self.support == other.support and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.support, self.probs.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"{s!r}: {p:.6g}" for s, p in zip(self.support, self.probs))
        return f"DiscreteDist({{{body}}})"


@dataclass(frozen=True, eq=False)
class JointDist:
    """Dense joint law over named axes.

    ``names[i]`` labels axis ``i`` and ``alphabets[i]`` lists its symbols in
    table order.
    """

    names: tuple
    alphabets: tuple
    probs: np.ndarray

    def __init__(self, names, alphabets, probs, tol: float = NORM_TOL):
        names = tuple(names)
        alphabets = tuple(tuple(a) for a in alphabets)
        probs = _frozen(probs)
        if len(names) != len(alphabets) or probs.ndim != len(names):
            raise ValueError("names, alphabets and table rank disagree")
        if tuple(len(a) for a in alphabets) != probs.shape:
            raise ValueError(f"alphabet sizes do not match table shape {probs.shape}")
        if len(set(names)) != len(names):
            raise ValueError(f"axis names are not distinct: {names}")
        if np.any(probs < 0):
            raise ValueError("negative joint probability")
        if abs(probs.sum() - 1.0) > tol:
            raise ValueError(f"joint sums to {probs.sum()!r}, not 1")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "alphabets", alphabets)
        object.__setattr__(self, "probs", probs)

    def axis(self, key) -> int:
        if isinstance(key, (int, np.integer)):
            if not 0 <= key < len(self.names):
                raise IndexError(f"axis {key} out of range")
            return int(key)
        return self.names.index(key)

    def marginal_table(self, keep) -> np.ndarray:
        """Marginal table over ``keep`` with axes in the joint's order."""
        keep = sorted({self.axis(k) for k in keep})
        drop = tuple(i for i in range(self.probs.ndim) if i not in keep)
        return self.probs.sum(axis=drop)

    def marginal(self, key) -> DiscreteDist:
        i = self.axis(key)
        return DiscreteDist(self.alphabets[i], self.marginal_table([i]))


def _check_same_support(p: DiscreteDist, q: DiscreteDist) -> None:
    if p.support != q.support:
        raise SupportMismatch(f"{p.support} != {q.support}")


def _kl_terms(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    bad = (p > 0) & (q <= 0)
    if np.any(bad):
        raise AbsoluteContinuityViolation(
            f"p > 0 where q = 0 at positions {np.flatnonzero(bad).tolist()}")
    terms = np.zeros_like(p, dtype=float)
    pos = p > 0
    # log1p of the relative gap keeps precision when p and q nearly agree
    terms[pos] = p[pos] * np.log1p((p[pos] - q[pos]) / q[pos]) / LN2
    return terms


def kl_divergence(p: DiscreteDist, q: DiscreteDist) -> float:
    """D(p || q) in bits."""
    _check_same_support(p, q)
    return max(float(_kl_terms(p.probs, q.probs).sum()), 0.0)


def kl_divergence_table(p: np.ndarray, q: np.ndarray) -> float:
    """D(p || q) in bits for raw, equally shaped probability tables."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise SupportMismatch(f"table shapes {p.shape} and {q.shape} differ")
    return max(float(_kl_terms(p.ravel(), q.ravel()).sum()), 0.0)


def to_nats(bits: float) -> float:
    return bits * LN2


def kl_divergence_nats(p: DiscreteDist, q: DiscreteDist) -> float:
    return to_nats(kl_divergence(p, q))


def tv_distance(p: DiscreteDist, q: DiscreteDist) -> float:
    """Total variation distance, half the L1 distance."""
    _check_same_support(p, q)
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


def chi_squared(p: DiscreteDist, q: DiscreteDist) -> float:
    _check_same_support(p, q)
    bad = (p.probs > 0) & (q.probs <= 0)
    if np.any(bad):
        raise AbsoluteContinuityViolation(
            f"p > 0 where q = 0 at positions {np.flatnonzero(bad).tolist()}")
    pos = q.probs > 0
    diff = p.probs[pos] - q.probs[pos]
    return float(np.sum(diff * diff / q.probs[pos]))


def entropy_table(probs) -> float:
    p = np.asarray(probs, dtype=float).ravel()
    p = p[p > 0]
    return max(float(-np.sum(p * np.log2(p))), 0.0)


def entropy(p: DiscreteDist) -> float:
    return entropy_table(p.probs)


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"binary entropy needs x in [0, 1], got {x}")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def mutual_information(joint: JointDist, left, right, cond=()) -> float:
    """I(left; right | cond) in bits by exact summation over the joint table.

    Each argument is an axis name or index, or a sequence of them.
    """

    def group(g):
        if isinstance(g, (str, int, np.integer)):
            g = [g]
        return {joint.axis(k) for k in g}

    a, b, c = group(left), group(right), group(cond)
    if not a or not b:
        raise ValueError("left and right axis groups must be nonempty")
    if a & b or a & c or b & c:
        raise AxisOverlap(f"axis groups overlap: {sorted(a)}, {sorted(b)}, {sorted(c)}")
    # drop everything outside the three groups, then order as (a, b, c)
    keep = sorted(a | b | c)
    table = joint.marginal_table(keep)
    order = [keep.index(i) for i in sorted(a)] + [keep.index(i) for i in sorted(b)] + \
        [keep.index(i) for i in sorted(c)]
    table = np.transpose(table, order)
    na, nb = len(a), len(b)
    sa = int(np.prod(table.shape[:na]))
    sb = int(np.prod(table.shape[na:na + nb]))
    t = table.reshape(sa, sb, -1)
    p_ac = t.sum(axis=1, keepdims=True)
    p_bc = t.sum(axis=0, keepdims=True)
    p_c = t.sum(axis=(0, 1), keepdims=True)
    pos = t > 0
    num = t * p_c
    den = p_ac * p_bc
    val = np.sum(t[pos] * np.log2(num[pos] / den[pos]))
    return max(float(val), 0.0)


@dataclass(frozen=True, eq=False)
class IidSumDist:
    """Exact law of the sum of ``n`` i.i.d. copies of a finite atom law."""

    atom_values: np.ndarray
    atom_probs: np.ndarray
    n: int
    values: np.ndarray
    probs: np.ndarray

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))


def _merge(values: np.ndarray, probs: np.ndarray, tol: float):
    order = np.argsort(values, kind="stable")
    v = values[order]
    p = probs[order]
    keep = p > 0
    v, p = v[keep], p[keep]
    if v.size == 0:
        return v, p
    # cluster consecutive values closer than tol; each cluster reported at its smallest value
    starts = np.concatenate(([True], np.diff(v) > tol))
    idx = np.cumsum(starts) - 1
    merged_p = np.bincount(idx, weights=p)
    merged_v = v[starts]
    return merged_v, merged_p


def iid_sum_law(values, probs, n: int, tol: float = MERGE_TOL,
                cap: int = DEFAULT_ATOM_CAP) -> IidSumDist:
    """n-fold self-convolution of the atom law ``(values, probs)``."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    n = int(n)
    values = np.asarray(values, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if values.shape != probs.shape or values.ndim != 1:
        raise ValueError("atom values and probabilities must be equal-length vectors")
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > NORM_TOL:
        raise ValueError("atom probabilities do not form a distribution")
    if not np.all(np.isfinite(values[probs > 0])):
        raise DomainError("atom values must be finite")
    base_v, base_p = _merge(values, probs, tol)
    cur_v, cur_p = base_v, base_p
    for _ in range(n - 1):
        size = cur_v.size * base_v.size
        if size > cap:
            raise SumOverflow(size, cap)
        cur_v, cur_p = _merge((cur_v[:, None] + base_v[None, :]).ravel(),
                              (cur_p[:, None] * base_p[None, :]).ravel(), tol)
    if cur_v.size > cap:
        raise SumOverflow(cur_v.size, cap)
    cur_p = cur_p / cur_p.sum()
    return IidSumDist(_frozen(values), _frozen(probs), n, _frozen(cur_v), _frozen(cur_p))


def tail_probability(d: IidSumDist, threshold: float, direction: str = "above",
                     tol: float = 1e-9) -> float:
    """P(S > t) for ``direction="above"`` or P(S < t) for ``"below"``.

    Atoms within ``tol * max(1, |t|)`` of the threshold count as equal to it.
    """
    slack = tol * max(1.0, abs(threshold))
    if direction == "above":
        mask = d.values > threshold + slack
    elif direction == "below":
        mask = d.values < threshold - slack
    else:
        raise ValueError(f"direction must be 'above' or 'below', got {direction!r}")
    return float(min(max(d.probs[mask].sum(), 0.0), 1.0))
