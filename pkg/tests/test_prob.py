import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covertkey.errors import (AbsoluteContinuityViolation, AxisOverlap, DomainError, SumOverflow,
                              SupportMismatch)
from covertkey.prob import (DiscreteDist, JointDist, binary_entropy, chi_squared, entropy,
                            iid_sum_law, kl_divergence, kl_divergence_nats, mutual_information,
                            tail_probability, tv_distance)


def kl_loop(p, q):
    total = 0.0
    for a, b in zip(p, q):
        if a > 0:
            total += a * math.log(a / b, 2)
    return total


@st.composite
def prob_vectors(draw, size=None, positive=False):
    k = size or draw(st.integers(2, 5))
    lo = 0.01 if positive else 0.0
    raw = draw(st.lists(st.floats(lo, 1.0), min_size=k, max_size=k))
    raw = np.array(raw) + (1e-3 if not positive else 0.0)
    return raw / raw.sum()


def test_dist_validation():
    with pytest.raises(ValueError):
        DiscreteDist((0, 1), [0.5, 0.6])
    with pytest.raises(ValueError):
        DiscreteDist((0, 0), [0.5, 0.5])
    with pytest.raises(ValueError):
        DiscreteDist((0, 1, 2), [0.5, 0.5])
    d = DiscreteDist.bernoulli(0.3)
    assert d[1] == pytest.approx(0.3)
    with pytest.raises(ValueError):
        d.probs[0] = 1.0


def test_kl_matches_loop_and_errors():
    p = DiscreteDist((0, 1, 2), [0.2, 0.5, 0.3])
    q = DiscreteDist((0, 1, 2), [0.4, 0.4, 0.2])
    assert kl_divergence(p, q) == pytest.approx(kl_loop(p.probs, q.probs), abs=1e-14)
    assert kl_divergence_nats(p, q) == pytest.approx(kl_loop(p.probs, q.probs) * math.log(2))
    with pytest.raises(SupportMismatch):
        kl_divergence(p, DiscreteDist((0, 1), [0.5, 0.5]))
    with pytest.raises(AbsoluteContinuityViolation):
        kl_divergence(p, DiscreteDist((0, 1, 2), [0.5, 0.5, 0.0]))
    assert kl_divergence(DiscreteDist((0, 1, 2), [0.5, 0.5, 0.0]), q) == pytest.approx(
        kl_loop([0.5, 0.5, 0.0], q.probs))


def test_kl_precision_near_identity():
    eps = 1e-9
    p = DiscreteDist((0, 1), [0.5 + eps, 0.5 - eps])
    q = DiscreteDist((0, 1), [0.5, 0.5])
    # second-order term: 2 eps^2 / ln 2 in bits
    assert kl_divergence(p, q) == pytest.approx(2 * eps * eps / math.log(2), rel=1e-5)


def test_entropy_and_binary_entropy():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    with pytest.raises(DomainError):
        binary_entropy(1.2)
    assert entropy(DiscreteDist.uniform(range(8))) == pytest.approx(3.0)


def test_chi_squared_oracle():
    p = DiscreteDist((0, 1), [0.6, 0.4])
    q = DiscreteDist((0, 1), [0.7, 0.3])
    assert chi_squared(p, q) == pytest.approx(0.01 / 0.7 + 0.01 / 0.3)


def _random_joint(seed, shape):
    t = np.random.default_rng(seed).random(shape)
    return t / t.sum()


def _h(t, keep):
    drop = tuple(i for i in range(t.ndim) if i not in keep)
    m = t.sum(axis=drop).ravel()
    m = m[m > 0]
    return -float(np.sum(m * np.log2(m)))


def test_mutual_information_matches_entropy_identities():
    t = _random_joint(3, (2, 3, 2, 2))
    j = JointDist(("A", "B", "C", "D"), [range(2), range(3), range(2), range(2)], t)
    oracle = _h(t, (0,)) + _h(t, (1,)) - _h(t, (0, 1))
    assert mutual_information(j, "A", "B") == pytest.approx(oracle, abs=1e-12)
    cond = _h(t, (0, 2)) + _h(t, (1, 2)) - _h(t, (0, 1, 2)) - _h(t, (2,))
    assert mutual_information(j, "A", "B", "C") == pytest.approx(cond, abs=1e-12)
    grouped = _h(t, (0,)) + _h(t, (1, 3)) - _h(t, (0, 1, 3))
    assert mutual_information(j, "A", ["B", "D"]) == pytest.approx(grouped, abs=1e-12)
    with pytest.raises(AxisOverlap):
        mutual_information(j, "A", ["A", "B"])


def test_mutual_information_independent_is_zero():
    t = np.outer([0.3, 0.7], [0.1, 0.5, 0.4])
    j = JointDist(("X", "Y"), [range(2), range(3)], t)
    assert mutual_information(j, "X", "Y") == pytest.approx(0.0, abs=1e-15)


def test_iid_sum_law_matches_enumeration():
    vals, probs, n = np.array([-1.0, 0.5, 2.0]), np.array([0.2, 0.5, 0.3]), 4
    law = iid_sum_law(vals, probs, n)
    oracle = {}
    for combo in itertools.product(range(3), repeat=n):
        s = round(sum(vals[i] for i in combo), 9)
        oracle[s] = oracle.get(s, 0.0) + math.prod(probs[i] for i in combo)
    assert len(law.values) == len(oracle)
    for v, p in zip(law.values, law.probs):
        assert p == pytest.approx(oracle[round(v, 9)], abs=1e-14)
    assert law.mean() == pytest.approx(n * np.dot(vals, probs))
    above = sum(p for v, p in oracle.items() if v > 1.0)
    below = sum(p for v, p in oracle.items() if v < 1.0)
    assert tail_probability(law, 1.0, "above") == pytest.approx(above)
    assert tail_probability(law, 1.0, "below") == pytest.approx(below)


def test_iid_sum_law_errors():
    with pytest.raises(SumOverflow):
        iid_sum_law(np.sqrt([2.0, 3.0, 5.0, 7.0, 11.0]), np.full(5, 0.2), 8, cap=100)
    with pytest.raises(DomainError):
        iid_sum_law([0.0, 1.0], [0.5, 0.5], 0)
    with pytest.raises(ValueError):
        tail_probability(iid_sum_law([0.0, 1.0], [0.5, 0.5], 2), 0.5, "sideways")


@settings(max_examples=60, deadline=None)
@given(prob_vectors(size=4), prob_vectors(size=4, positive=True))
def test_divergence_properties(p, q):
    P = DiscreteDist(range(4), p)
    Q = DiscreteDist(range(4), q)
    d = kl_divergence(P, Q)
    assert d >= 0.0
    assert kl_divergence(P, P) == pytest.approx(0.0, abs=1e-12)
    tv = tv_distance(P, Q)
    assert 0.0 <= tv <= 1.0
    assert tv == pytest.approx(tv_distance(Q, P))
    # Pinsker, natural units
    assert tv <= math.sqrt(kl_divergence_nats(P, Q) / 2) + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_mutual_information_bounds(seed):
    t = _random_joint(seed, (3, 2))
    j = JointDist(("X", "Y"), [range(3), range(2)], t)
    mi = mutual_information(j, "X", "Y")
    assert 0.0 <= mi <= min(_h(t, (0,)), _h(t, (1,))) + 1e-12
    assert mi == pytest.approx(mutual_information(j, "Y", "X"), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(prob_vectors(size=3), st.integers(1, 6))
def test_iid_sum_mean_and_mass(p, n):
    vals = np.array([0.0, 1.0, 3.0])
    law = iid_sum_law(vals, p, n)
    assert law.probs.sum() == pytest.approx(1.0)
    assert law.mean() == pytest.approx(n * float(np.dot(vals, p)), abs=1e-9)
