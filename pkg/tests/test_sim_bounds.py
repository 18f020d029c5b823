import math

import numpy as np
import pytest

from covertkey.channel import BinaryMacPair, CovertConfig
from covertkey.errors import DomainError
from covertkey.prob import iid_sum_law, tail_probability
from covertkey.sim import (bernstein_bound, fixed_plan, hoeffding_bound,
                           lemma3_reliability_rhs, lemma3_resolvability_rhs,
                           oneshot_resolvability_bound, rate_plan, reliability_terms,
                           resolvability_terms, source_simulation_rhs)
from covertkey.sim.bounds import resolvability_prefactor

RHO_STAR = (0.28, 0.72)


def test_hoeffding_single_unit_variable():
    assert hoeffding_bound([(0.0, 1.0)], 1.0) == pytest.approx(math.exp(-2.0))
    assert hoeffding_bound([(0, 1)] * 4, 1.0) == pytest.approx(math.exp(-0.5))
    with pytest.raises(DomainError):
        hoeffding_bound([(1.0, 0.0)], 1.0)
    with pytest.raises(DomainError):
        hoeffding_bound([(0.0, 1.0)], 0.0)


def test_bernstein_decreases_to_zero():
    vals = [bernstein_bound(1.0, 2.0, t) for t in (0.5, 1, 2, 5, 10, 50, 200)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-100
    assert bernstein_bound(1.0, 2.0, 1.0) == pytest.approx(math.exp(-0.5 / (2 + 1 / 3)))
    with pytest.raises(DomainError):
        bernstein_bound(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        bernstein_bound(1.0, 1.0, -1.0)


def test_oneshot_bound():
    q = np.array([0.8, 0.2])
    n = 6
    top = n * math.log2(1 / 0.2)
    assert oneshot_resolvability_bound(top + 1, math.inf, q, n) == pytest.approx(0.0, abs=1e-12)
    assert oneshot_resolvability_bound(top + 1, 1e30, q, n) < 1e-12
    # probability term by enumeration of the binomial count of rare symbols
    gamma = 5.0
    p = sum(math.comb(n, k) * 0.2 ** k * 0.8 ** (n - k) for k in range(n + 1)
            if k * math.log2(5) + (n - k) * math.log2(1.25) >= gamma)
    assert oneshot_resolvability_bound(gamma, 64, q, n) == pytest.approx(p + math.sqrt(32 / 64))
    with pytest.raises(DomainError):
        oneshot_resolvability_bound(0.0, 4, q, n)


def test_reliability_rhs_structure(ch1, cfg_quarter):
    plan = rate_plan(ch1, cfg_quarter, 12, policy="relaxed")
    terms = reliability_terms(plan, ch1, cfg_quarter)
    assert terms.total >= 0 and math.isfinite(terms.total)
    assert all(0 <= v <= 1 for v in terms.probability.values())
    assert terms.total == pytest.approx(sum(terms.exponential.values())
                                        + sum(terms.probability.values()))
    assert lemma3_reliability_rhs(plan, ch1, cfg_quarter) == terms.total
    gamma = terms.thresholds["12"]
    assert terms.exponential["12"] == pytest.approx(2 ** -gamma * plan.M_T((1, 2)) * plan.N_T((1, 2)))


def test_resolvability_rhs_structure(ch1, cfg_quarter):
    plan = rate_plan(ch1, cfg_quarter, 12, policy="relaxed")
    terms = resolvability_terms(plan, ch1, cfg_quarter)
    w1, w2 = cfg_quarter.weights
    v_min = float(ch1.Q(0).probs.min())
    pref = 12 * math.log2(4 / ((1 - w1) * (1 - w2) * v_min))
    assert terms.prefactor == pytest.approx(pref)
    assert resolvability_prefactor(ch1, cfg_quarter, 12) == pytest.approx(pref)
    assert terms.total == pytest.approx(sum(terms.exponential.values())
                                        + pref * sum(terms.probability.values()))
    assert lemma3_resolvability_rhs(plan, ch1, cfg_quarter) >= 0


def test_input_independent_reliability_channel_is_vacuous():
    mac = BinaryMacPair.from_binary((0.4,) * 4, (0.3, 0.6, 0.5, 0.2))
    cfg = CovertConfig(RHO_STAR, 0.3)
    plan = fixed_plan(mac, cfg, 8, [(1, 2, 1), (1, 1, 2)])
    terms = reliability_terms(plan, mac, cfg)
    assert all(abs(v) < 1e-12 for v in terms.thresholds.values())
    assert terms.exponential["12"] == pytest.approx(4.0)
    assert terms.total >= 1


def test_small_slack_probability_terms_near_half(ch1):
    cfg = CovertConfig(RHO_STAR, 0.5)
    plan = rate_plan(ch1, cfg, 20, policy="relaxed")
    terms = reliability_terms(plan, ch1, cfg, mu=1e-6)
    assert all(0.4 < v < 0.6 for v in terms.probability.values())
    assert terms.total > 1


def test_tail_matches_direct_enumeration(ch1, cfg_quarter):
    from covertkey.channel import density_atoms
    vals, probs = density_atoms(ch1, cfg_quarter, (1,), "y")
    law = iid_sum_law(vals, probs, 3)
    thr = 0.2
    direct = sum(probs[a] * probs[b] * probs[c]
                 for a in range(len(vals)) for b in range(len(vals)) for c in range(len(vals))
                 if vals[a] + vals[b] + vals[c] < thr)
    assert tail_probability(law, thr, "below") == pytest.approx(direct, abs=1e-14)


def test_source_simulation_rhs(ch1, cfg_quarter):
    plan = rate_plan(ch1, cfg_quarter, 12, policy="relaxed")
    for user in (1, 2):
        v = source_simulation_rhs(plan, cfg_quarter, user)
        assert v >= 0 and math.isfinite(v)
    zero = CovertConfig(RHO_STAR, 0.0)
    assert source_simulation_rhs(rate_plan(ch1, zero, 8), zero, 1) == 0.0
