"""Integer codebook sizes for the auxiliary channel-coding scheme."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from ..channel import SUBSETS, BinaryMacPair, CovertConfig, subset_informations
from ..errors import InfeasiblePlan


def subset_label(T) -> str:
    return "".join(str(t) for t in T)


# slack below which a constraint counts as met despite float noise in log2
LOG_TOL = 1e-9


@dataclass(frozen=True)
class UserSizes:
    """Public-message, key and randomness index set sizes of one user."""

    G: int
    M: int
    N: int

    def __post_init__(self):
        for name in ("G", "M", "N"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")
            object.__setattr__(self, name, int(v))

    @property
    def codewords(self) -> int:
        return self.G * self.M * self.N


@dataclass(frozen=True)
class RatePlan:
    """Codebook sizes plus the constraints they were checked against.

    ``target_logs`` maps constraint names to their real-valued right-hand
    sides in bits; ``slacks`` holds the signed margin of each constraint
    (nonnegative when satisfied).
    """

    n: int
    mu1: float
    mu2: float
    mu3: float
    sizes: tuple
    target_logs: dict = field(default_factory=dict)
    slacks: dict = field(default_factory=dict)
    violations: tuple = ()
    rho: tuple = ()
    alpha: float = 0.0

    @property
    def feasible(self) -> bool:
        return not self.violations

    @property
    def G(self) -> int:
        return self.sizes[0].G * self.sizes[1].G

    def M_T(self, T) -> int:
        return math.prod(self.sizes[t - 1].M for t in T)

    def N_T(self, T) -> int:
        return math.prod(self.sizes[t - 1].N for t in T)

    def to_dict(self) -> dict:
        return {
            "n": self.n, "mu1": self.mu1, "mu2": self.mu2, "mu3": self.mu3,
            "rho": list(self.rho), "alpha": self.alpha,
            "sizes": [{"G": s.G, "M": s.M, "N": s.N} for s in self.sizes],
            "target_logs": dict(self.target_logs),
            "slacks": dict(self.slacks),
            "violations": list(self.violations),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _check_mu(mu1, mu2, mu3):
    if not 0.0 < mu1 < 1.0:
        raise ValueError(f"mu1 must lie in (0, 1), got {mu1}")
    if mu2 <= 0 or mu3 <= 0:
        raise ValueError(f"mu2 and mu3 must be positive, got {mu2}, {mu3}")


def plan_targets(mac: BinaryMacPair, cfg: CovertConfig, n: int, mu1, mu2, mu3) -> dict:
    """Real-valued log2 targets of the reliability, resolvability and source constraints."""
    info = subset_informations(mac, cfg)
    t = {}
    for T in SUBSETS:
        lab = subset_label(T)
        t[f"reliability_{lab}"] = (1 - mu1) * n * info[T]["I_Y"]
        t[f"resolvability_{lab}"] = (1 + mu2) * n * info[T]["I_Z"]
    for i in (1, 2):
        t[f"source_{i}"] = (1 + mu3) * n * info["H"][i - 1]
    return t


def check_sizes(sizes, targets: dict) -> tuple:
    """Signed slack of every constraint and the names of the violated ones."""
    slacks = {}
    for T in SUBSETS:
        lab = subset_label(T)
        logN = sum(math.log2(sizes[t - 1].N) for t in T)
        logM = sum(math.log2(sizes[t - 1].M) for t in T)
        slacks[f"reliability_{lab}"] = targets[f"reliability_{lab}"] - (logN + logM)
        slacks[f"resolvability_{lab}"] = logN - targets[f"resolvability_{lab}"]
    for i in (1, 2):
        s = sizes[i - 1]
        slacks[f"source_{i}"] = math.log2(s.codewords) - targets[f"source_{i}"]
    violations = tuple(k for k, v in slacks.items() if v < -LOG_TOL)
    return slacks, violations


def _ceil_pow2(x: float) -> int:
    # 2**x rounded up, guarding against x landing a hair above an integer
    v = 2.0 ** x
    r = round(v)
    return max(1, r if abs(v - r) <= 1e-9 * max(1.0, v) else math.ceil(v))


def _floor_pow2(x: float) -> int:
    v = 2.0 ** x
    r = round(v)
    return max(1, r if abs(v - r) <= 1e-9 * max(1.0, v) else math.floor(v))


def rate_plan(mac: BinaryMacPair, cfg: CovertConfig, n: int, mu1: float = 0.1,
              mu2: float = 0.1, mu3: float = 0.1, policy: str = "strict") -> RatePlan:
    """Choose integer (G_i, M_i, N_i) meeting the reliability/resolvability/source constraints.

    Rounding goes N up, M down (at least 1) and G up. The joint resolvability
    constraint is restored by enlarging N_2 and the joint reliability one by
    shrinking the larger M. With ``policy="strict"`` any remaining violation
    raises ``InfeasiblePlan``; ``policy="relaxed"`` returns the plan with the
    violations recorded.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if policy not in ("strict", "relaxed"):
        raise ValueError(f"policy must be 'strict' or 'relaxed', got {policy!r}")
    _check_mu(mu1, mu2, mu3)
    n = int(n)
    tg = plan_targets(mac, cfg, n, mu1, mu2, mu3)

    N = [_ceil_pow2(tg["resolvability_1"]), _ceil_pow2(tg["resolvability_2"])]
    need12 = _ceil_pow2(tg["resolvability_12"])
    if N[0] * N[1] < need12:
        N[1] = -(-need12 // N[0])

    M = [_floor_pow2(tg[f"reliability_{i}"] - math.log2(N[i - 1])) for i in (1, 2)]
    while M[0] * M[1] > 1 and \
            math.log2(N[0] * N[1] * M[0] * M[1]) > tg["reliability_12"] + LOG_TOL:
        big = 0 if M[0] >= M[1] else 1
        M[big] -= 1

    G = [_ceil_pow2(tg[f"source_{i}"] - math.log2(N[i - 1] * M[i - 1])) for i in (1, 2)]
    sizes = (UserSizes(G[0], M[0], N[0]), UserSizes(G[1], M[1], N[1]))
    return _finish(n, (mu1, mu2, mu3), sizes, tg, cfg, policy)


def fixed_plan(mac: BinaryMacPair, cfg: CovertConfig, n: int, sizes, mu1: float = 0.1,
               mu2: float = 0.1, mu3: float = 0.1) -> RatePlan:
    """Plan with caller-chosen sizes; constraints are checked and recorded, never enforced.

    ``sizes`` is a pair of ``UserSizes`` or ``(G, M, N)`` triples.
    """
    _check_mu(mu1, mu2, mu3)
    sizes = tuple(s if isinstance(s, UserSizes) else UserSizes(*s) for s in sizes)
    if len(sizes) != 2:
        raise ValueError("sizes must hold one entry per user")
    tg = plan_targets(mac, cfg, int(n), mu1, mu2, mu3)
    return _finish(int(n), (mu1, mu2, mu3), sizes, tg, cfg, "relaxed")


def _finish(n, mus, sizes, tg, cfg, policy) -> RatePlan:
    slacks, violations = check_sizes(sizes, tg)
    plan = RatePlan(n, *mus, sizes=sizes, target_logs=tg, slacks=slacks,
                    violations=violations, rho=cfg.rho, alpha=cfg.alpha)
    if violations and policy == "strict":
        raise InfeasiblePlan(
            f"n={n}: integer sizes violate {', '.join(violations)}", violations)
    return plan
