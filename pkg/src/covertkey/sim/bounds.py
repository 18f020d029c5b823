"""Finite-length bounds: reliability/resolvability right-hand sides and concentration inequalities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..channel import SUBSETS, BinaryMacPair, CovertConfig, density_atoms, subset_informations
from ..errors import DomainError
from ..prob import iid_sum_law, tail_probability
from .plan import RatePlan, subset_label


@dataclass(frozen=True)
class BoundTerms:
    """Total right-hand side with its exponential and tail-probability parts per subset."""

    total: float
    exponential: dict = field(default_factory=dict)
    probability: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    prefactor: float = 1.0

    def to_dict(self) -> dict:
        return {"total": self.total, "exponential": dict(self.exponential),
                "probability": dict(self.probability), "thresholds": dict(self.thresholds),
                "prefactor": self.prefactor}


def _slack(plan: RatePlan, mu, default):
    mu = default if mu is None else float(mu)
    if not 0.0 < mu < 1.0:
        raise DomainError(f"threshold slack must lie in (0, 1), got {mu}")
    return mu


def reliability_terms(plan: RatePlan, mac: BinaryMacPair, cfg: CovertConfig,
                      mu: float | None = None) -> BoundTerms:
    """Union-bound reliability right-hand side.

    sum_T 2^-gamma_T M_T N_T + sum_T P(sum of n letter densities < gamma_T),
    with gamma_T = (1 - mu) n I(X_T; Y | X_Tc) and mu defaulting to mu1 / 2.
    """
    mu = _slack(plan, mu, plan.mu1 / 2)
    info = subset_informations(mac, cfg)
    exp_t, prob_t, thr = {}, {}, {}
    for T in SUBSETS:
        lab = subset_label(T)
        gamma = (1 - mu) * plan.n * info[T]["I_Y"]
        law = iid_sum_law(*density_atoms(mac, cfg, T, "y"), plan.n)
        thr[lab] = gamma
        exp_t[lab] = 2.0 ** (-gamma) * plan.M_T(T) * plan.N_T(T)
        prob_t[lab] = tail_probability(law, gamma, "below")
    total = sum(exp_t.values()) + sum(prob_t.values())
    return BoundTerms(total, exp_t, prob_t, thr)


def resolvability_prefactor(mac: BinaryMacPair, cfg: CovertConfig, n: int, users: int = 2) -> float:
    """n log2(2^U / (prod_u (1 - rho_u alpha) v_min)), v_min = min_z Q_0(z)."""
    q0 = mac.Q(0).probs
    v_min = float(q0[q0 > 0].min())
    denom = math.prod(1.0 - w for w in cfg.weights) * v_min
    return n * math.log2(2.0 ** users / denom)


def resolvability_terms(plan: RatePlan, mac: BinaryMacPair, cfg: CovertConfig,
                        mu: float | None = None) -> BoundTerms:
    """Union-bound KL resolvability right-hand side.

    sum_T 2^eta_T / N_T + prefactor * sum_T P(sum of n letter densities > eta_T),
    with eta_T = (1 + mu) n I(X_T; Z) and mu defaulting to mu2 / 2.
    """
    mu = _slack(plan, mu, min(plan.mu2 / 2, 0.5))
    info = subset_informations(mac, cfg)
    exp_t, prob_t, thr = {}, {}, {}
    for T in SUBSETS:
        lab = subset_label(T)
        eta = (1 + mu) * plan.n * info[T]["I_Z"]
        law = iid_sum_law(*density_atoms(mac, cfg, T, "z"), plan.n)
        thr[lab] = eta
        exp_t[lab] = 2.0 ** eta / plan.N_T(T)
        prob_t[lab] = tail_probability(law, eta, "above")
    pref = resolvability_prefactor(mac, cfg, plan.n)
    total = sum(exp_t.values()) + pref * sum(prob_t.values())
    return BoundTerms(total, exp_t, prob_t, thr, pref)


def lemma3_reliability_rhs(plan: RatePlan, mac: BinaryMacPair, cfg: CovertConfig,
                           mu: float | None = None) -> float:
    return reliability_terms(plan, mac, cfg, mu).total


def lemma3_resolvability_rhs(plan: RatePlan, mac: BinaryMacPair, cfg: CovertConfig,
                             mu: float | None = None) -> float:
    return resolvability_terms(plan, mac, cfg, mu).total


def bernstein_bound(atom_bound_c: float, variance_sum: float, t: float) -> float:
    """exp(-t^2 / 2 / (variance_sum + c t / 3)) for zero-mean summands bounded by c."""
    if atom_bound_c <= 0 or t <= 0:
        raise DomainError("Bernstein needs c > 0 and t > 0")
    if variance_sum < 0:
        raise DomainError("variance sum must be nonnegative")
    return math.exp(-0.5 * t * t / (variance_sum + atom_bound_c * t / 3.0))


def hoeffding_bound(ranges, v: float) -> float:
    """exp(-2 v^2 / sum (b - a)^2) for independent summands in [a, b]."""
    ranges = np.asarray(ranges, dtype=float).reshape(-1, 2)
    if ranges.shape[0] == 0 or np.any(ranges[:, 1] < ranges[:, 0]):
        raise DomainError("ranges must be nonempty (a, b) pairs with a <= b")
    if v <= 0:
        raise DomainError("deviation v must be positive")
    spread = float(np.sum((ranges[:, 1] - ranges[:, 0]) ** 2))
    if spread == 0:
        return 0.0
    return math.exp(-2.0 * v * v / spread)


def oneshot_resolvability_bound(gamma: float, M: float, per_symbol_dist, n: int) -> float:
    """P(sum_i log2 1/Q(X_i) >= gamma) + sqrt(2^gamma / M) for X ~ Q^n.

    ``per_symbol_dist`` is a ``DiscreteDist`` or a probability vector for Q.
    """
    if gamma <= 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    if M <= 0:
        raise DomainError(f"M must be positive, got {M}")
    probs = np.asarray(getattr(per_symbol_dist, "probs", per_symbol_dist), dtype=float)
    probs = probs[probs > 0]
    law = iid_sum_law(-np.log2(probs), probs, n)
    tail = 1.0 - tail_probability(law, gamma, "below")
    return tail + math.sqrt(2.0 ** gamma / M) if math.isfinite(M) else tail


def source_simulation_rhs(plan: RatePlan, cfg: CovertConfig, user: int,
                          mu: float | None = None) -> float:
    """One-shot bound on TV(P~_{X_i}, Q^n) with gamma = (1 + mu) n H(X_i), mu defaulting to mu3 / 2."""
    w = cfg.weights[user - 1]
    if w == 0.0:
        return 0.0
    mu = plan.mu3 / 2 if mu is None else float(mu)
    probs = np.array([1.0 - w, w])
    h = float(-np.sum(probs * np.log2(probs)))
    return oneshot_resolvability_bound((1 + mu) * plan.n * h, plan.sizes[user - 1].codewords,
                                       probs, plan.n)
