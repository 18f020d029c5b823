"""Binary-input two-user MAC pairs and the low-weight covert input process.

A ``BinaryMacPair`` holds the legitimate receiver's channel ``W_Y`` and the
warden's channel ``W_Z``. Inputs are indexed by *bit* ``b in {0, 1}`` per user:
bit 0 is the innocent symbol, bit 1 the meaningful one. ``P[i]``/``Q[i]`` follow
the usual ordering: 0 = (innocent, innocent), 1 = (meaningful, innocent),
2 = (innocent, meaningful), 3 = (meaningful, meaningful).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import prob
from .errors import DegenerateChannel, DomainError
from .prob import DiscreteDist, JointDist

RANK_TOL = 1e-9
SUBSETS = ((1,), (2,), (1, 2))
BIT_PAIRS = ((0, 0), (1, 0), (0, 1), (1, 1))


def subset_label(T) -> str:
    return "{" + ",".join(str(t) for t in T) + "}"


@dataclass(frozen=True, eq=False)
class BinaryMacPair:
    """Two memoryless MACs sharing binary inputs.

    ``w_y`` and ``w_z`` map an input pair ``(x1, x2)`` (actual symbols) to the
    output law over ``y_alphabet`` / ``z_alphabet``.
    """

    y_alphabet: tuple
    z_alphabet: tuple
    w_y: dict
    w_z: dict
    innocent: tuple = (0, 0)
    meaningful: tuple = (1, 1)
    wy_table: np.ndarray = field(init=False, repr=False)
    wz_table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "y_alphabet", tuple(self.y_alphabet))
        object.__setattr__(self, "z_alphabet", tuple(self.z_alphabet))
        object.__setattr__(self, "innocent", tuple(self.innocent))
        object.__setattr__(self, "meaningful", tuple(self.meaningful))
        if self.innocent[0] == self.meaningful[0] or self.innocent[1] == self.meaningful[1]:
            raise ValueError("innocent and meaningful symbols must differ for each user")
        wy = np.empty((2, 2, len(self.y_alphabet)))
        wz = np.empty((2, 2, len(self.z_alphabet)))
        rows_y, rows_z = {}, {}
        for b1, b2 in BIT_PAIRS:
            x = self.inputs_for(b1, b2)
            ry = _as_dist(self.w_y[x], self.y_alphabet)
            rz = _as_dist(self.w_z[x], self.z_alphabet)
            rows_y[x], rows_z[x] = ry, rz
            wy[b1, b2] = ry.probs
            wz[b1, b2] = rz.probs
        wy.setflags(write=False)
        wz.setflags(write=False)
        object.__setattr__(self, "w_y", rows_y)
        object.__setattr__(self, "w_z", rows_z)
        object.__setattr__(self, "wy_table", wy)
        object.__setattr__(self, "wz_table", wz)

    @classmethod
    def from_tables(cls, wy, wz, y_alphabet=None, z_alphabet=None,
                    innocent=(0, 0), meaningful=(1, 1)) -> "BinaryMacPair":
        """Build from arrays indexed ``[b1, b2, output]`` (bit 0 = innocent)."""
        wy = np.asarray(wy, dtype=float)
        wz = np.asarray(wz, dtype=float)
        y_alphabet = tuple(range(wy.shape[-1])) if y_alphabet is None else tuple(y_alphabet)
        z_alphabet = tuple(range(wz.shape[-1])) if z_alphabet is None else tuple(z_alphabet)
        x1 = (innocent[0], meaningful[0])
        x2 = (innocent[1], meaningful[1])
        rows_y = {(x1[b1], x2[b2]): wy[b1, b2] for b1, b2 in BIT_PAIRS}
        rows_z = {(x1[b1], x2[b2]): wz[b1, b2] for b1, b2 in BIT_PAIRS}
        return cls(y_alphabet, z_alphabet, rows_y, rows_z, innocent, meaningful)

    @classmethod
    def from_binary(cls, py1, pz1, **kw) -> "BinaryMacPair":
        """Binary outputs given P(Y=1|x1,x2), P(Z=1|x1,x2) in the order (0,0),(1,0),(0,1),(1,1)."""
        wy = np.empty((2, 2, 2))
        wz = np.empty((2, 2, 2))
        for (b1, b2), a, c in zip(BIT_PAIRS, py1, pz1):
            wy[b1, b2] = (_complement(a), a)
            wz[b1, b2] = (_complement(c), c)
        return cls.from_tables(wy, wz, **kw)

    @property
    def x1_alphabet(self) -> tuple:
        return (self.innocent[0], self.meaningful[0])

    @property
    def x2_alphabet(self) -> tuple:
        return (self.innocent[1], self.meaningful[1])

    def inputs_for(self, b1: int, b2: int) -> tuple:
        return (self.x1_alphabet[b1], self.x2_alphabet[b2])

    def P(self, i: int) -> DiscreteDist:
        b1, b2 = BIT_PAIRS[i]
        return DiscreteDist(self.y_alphabet, self.wy_table[b1, b2])

    def Q(self, i: int) -> DiscreteDist:
        b1, b2 = BIT_PAIRS[i]
        return DiscreteDist(self.z_alphabet, self.wz_table[b1, b2])

    def gap(self, i: int) -> float:
        """D(P_i || P_0) - D(Q_i || Q_0), unclamped, for user i in {1, 2}."""
        return prob.kl_divergence(self.P(i), self.P(0)) - prob.kl_divergence(self.Q(i), self.Q(0))

    def to_json_dict(self) -> dict:
        def rows(table):
            return {f"{x1},{x2}": [float(v) for v in table[(x1, x2)].probs]
                    for x1, x2 in (self.inputs_for(b1, b2) for b1, b2 in BIT_PAIRS)}

        return {
            "y_alphabet": list(self.y_alphabet),
            "z_alphabet": list(self.z_alphabet),
            "innocent": list(self.innocent),
            "meaningful": list(self.meaningful),
            "w_y": rows(self.w_y),
            "w_z": rows(self.w_z),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "BinaryMacPair":
        missing = {"y_alphabet", "z_alphabet", "w_y", "w_z", "innocent", "meaningful"} - set(doc)
        if missing:
            raise ValueError(f"channel document lacks keys {sorted(missing)}")
        innocent = tuple(doc["innocent"])
        meaningful = tuple(doc["meaningful"])
        x1 = (innocent[0], meaningful[0])
        x2 = (innocent[1], meaningful[1])

        def rows(table):
            out = {}
            for a, b in product(x1, x2):
                key = f"{a},{b}"
                if key not in table:
                    raise ValueError(f"channel table lacks row {key!r}")
                out[(a, b)] = table[key]
            return out

        return cls(doc["y_alphabet"], doc["z_alphabet"], rows(doc["w_y"]), rows(doc["w_z"]),
                   innocent, meaningful)


def _complement(p: float) -> float:
    # keeps table decimals such as 0.33 exact instead of 0.32999999999999996
    return round(1.0 - p, 12)


def _as_dist(row, alphabet) -> DiscreteDist:
    if isinstance(row, DiscreteDist):
        if row.support != tuple(alphabet):
            raise ValueError(f"row support {row.support} != alphabet {tuple(alphabet)}")
        return row
    return DiscreteDist(alphabet, row)


def dump_channel(mac: BinaryMacPair) -> str:
    return json.dumps(mac.to_json_dict(), indent=2) + "\n"


def load_channel(path) -> BinaryMacPair:
    with open(path, "r", encoding="utf-8") as fh:
        return BinaryMacPair.from_json_dict(json.load(fh))


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


TABLE1 = {
    1: dict(py1=(0.67, 0.10, 0.27, 0.56), pz1=(0.33, 0.62, 0.48, 0.15)),
    2: dict(py1=(0.1, 0.3, 0.2, 0.9), pz1=(0.3, 0.4, 0.4, 0.8)),
}


def table1_channel(which: int) -> BinaryMacPair:
    """The two numerical MAC pairs used for the worked examples (binary in/out)."""
    return BinaryMacPair.from_binary(**TABLE1[which])


# --------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    ok: bool
    checks: dict
    violations: list
    advisories: list

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": self.checks, "violations": self.violations,
                "advisories": self.advisories}


def _rank(m: np.ndarray, tol: float) -> int:
    s = np.linalg.svd(np.atleast_2d(m), compute_uv=False)
    return int(np.sum(s > tol))


def validate(mac: BinaryMacPair, rank_tol: float = RANK_TOL) -> ValidationReport:
    """Check the modelling assumptions on a channel pair without raising.

    Blocking checks: ``P_i << P_0`` and ``Q_i << Q_0`` for i = 1, 2, 3, and that
    some ``Q_i`` (i = 1, 2) differs from ``Q_0``. The literal test "Q_0 is not a
    linear combination of Q_1, Q_2, Q_3" is reported as an advisory: whenever
    those three rows span the output space (any binary warden channel with two
    distinct rows) it fails regardless of the channel.
    """
    checks, violations, advisories = {}, [], []
    for name, rows in (("P", mac.P), ("Q", mac.Q)):
        base = rows(0).probs
        for i in (1, 2, 3):
            bad = np.flatnonzero((rows(i).probs > 0) & (base <= 0))
            key = f"{name}{i}<<{name}0"
            checks[key] = bad.size == 0
            if bad.size:
                violations.append(f"{name}{i} is not absolutely continuous w.r.t. {name}0 "
                                  f"at outputs {bad.tolist()}")

    q0 = mac.Q(0).probs
    distinct = any(not np.allclose(mac.Q(i).probs, q0, atol=rank_tol, rtol=0) for i in (1, 2))
    checks["Q_distinguishable"] = distinct
    if not distinct:
        violations.append("Q1 = Q2 = Q0: the warden sees no first-order change (chi = 0)")

    others = np.vstack([mac.Q(i).probs for i in (1, 2, 3)])
    r_without = _rank(others, rank_tol)
    r_with = _rank(np.vstack([others, q0]), rank_tol)
    independent = r_with > r_without
    checks["Q0_not_linear_combination"] = bool(independent)
    checks["linear_combination_test_informative"] = r_without < len(mac.z_alphabet)
    if not independent:
        advisories.append(
            f"Q0 lies in the span of Q1, Q2, Q3 (rank {r_without} with and without Q0)"
            + ("" if r_without < len(mac.z_alphabet)
               else "; those rows span the whole output space, so the test cannot pass"))
    return ValidationReport(ok=not violations, checks=checks, violations=violations,
                            advisories=advisories)


# --------------------------------------------------------------------------
# covert process


@dataclass(frozen=True)
class CovertConfig:
    """Weight split ``rho`` and per-use amplitude ``alpha`` of the covert process."""

    rho: tuple
    alpha: float

    def __post_init__(self):
        rho = tuple(float(r) for r in self.rho)
        if len(rho) != 2:
            raise ValueError("rho must be a pair")
        if not all(0.0 < r < 1.0 for r in rho):
            raise ValueError(f"rho entries must lie in (0, 1), got {rho}")
        if abs(sum(rho) - 1.0) > 1e-12:
            raise ValueError(f"rho must sum to 1, got {sum(rho)!r}")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if any(r * self.alpha >= 1.0 for r in rho):
            raise ValueError("rho_i * alpha must stay below 1")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def weights(self) -> tuple:
        """P(meaningful symbol) per user."""
        return (self.rho[0] * self.alpha, self.rho[1] * self.alpha)

    def with_alpha(self, alpha: float) -> "CovertConfig":
        return CovertConfig(self.rho, alpha)


def _bit_laws(cfg: CovertConfig):
    w1, w2 = cfg.weights
    return np.array([1.0 - w1, w1]), np.array([1.0 - w2, w2])


def input_dists(cfg: CovertConfig, mac: BinaryMacPair | None = None):
    """(Q_X1, Q_X2) over the users' input alphabets."""
    q1, q2 = _bit_laws(cfg)
    a1 = mac.x1_alphabet if mac is not None else (0, 1)
    a2 = mac.x2_alphabet if mac is not None else (0, 1)
    return DiscreteDist(a1, q1), DiscreteDist(a2, q2)


def input_table(cfg: CovertConfig) -> np.ndarray:
    q1, q2 = _bit_laws(cfg)
    return np.outer(q1, q2)


def output_dists(mac: BinaryMacPair, cfg: CovertConfig):
    """(Q_Y, Q_Z): the output laws induced by the product input law."""
    px = input_table(cfg)
    qy = np.einsum("ab,aby->y", px, mac.wy_table)
    qz = np.einsum("ab,abz->z", px, mac.wz_table)
    return (DiscreteDist(mac.y_alphabet, qy / qy.sum()),
            DiscreteDist(mac.z_alphabet, qz / qz.sum()))


def _rho_pair(rho) -> tuple:
    r1, r2 = (float(r) for r in rho)
    if r1 < 0 or r2 < 0 or abs(r1 + r2 - 1.0) > 1e-12:
        raise ValueError(f"rho must be a probability pair, got {rho}")
    return r1, r2


def zeta_vector(mac: BinaryMacPair, rho) -> np.ndarray:
    r1, r2 = _rho_pair(rho)
    q0 = mac.Q(0).probs
    return r1 * (mac.Q(1).probs - q0) + r2 * (mac.Q(2).probs - q0)


def zeta(mac: BinaryMacPair, rho, z) -> float:
    return float(zeta_vector(mac, rho)[mac.z_alphabet.index(z)])


def _weighted_square(v: np.ndarray, q0: np.ndarray) -> float:
    pos = q0 > 0
    if np.any(np.abs(v[~pos]) > 0):
        raise DegenerateChannel("perturbation is nonzero where Q0 = 0")
    return float(np.sum(v[pos] ** 2 / q0[pos]))


def chi(mac: BinaryMacPair, rho) -> float:
    return _weighted_square(zeta_vector(mac, rho), mac.Q(0).probs)


def kappa(mac: BinaryMacPair, rho) -> float:
    c = chi(mac, rho)
    if c <= 0.0:
        raise DegenerateChannel(f"chi(rho) = 0 for rho = {tuple(rho)}; kappa undefined")
    return math.sqrt(2.0 / c)


def zeta_n_vector(mac: BinaryMacPair, cfg: CovertConfig) -> np.ndarray:
    if cfg.alpha == 0.0:
        raise DomainError("zeta_n needs alpha > 0")
    px = input_table(cfg)
    q0 = mac.Q(0).probs
    # expand Q_Z - Q_0 over the input pairs to avoid cancellation at tiny alpha
    diff = sum(px[b1, b2] * (mac.wz_table[b1, b2] - q0) for b1, b2 in BIT_PAIRS[1:])
    return diff / cfg.alpha


def zeta_n(mac: BinaryMacPair, cfg: CovertConfig, z) -> float:
    return float(zeta_n_vector(mac, cfg)[mac.z_alphabet.index(z)])


def chi_n(mac: BinaryMacPair, cfg: CovertConfig) -> float:
    return _weighted_square(zeta_n_vector(mac, cfg), mac.Q(0).probs)


def default_alpha(n: int) -> float:
    return 1.0 / (math.log2(n) * math.sqrt(n))


def alpha_schedule(n: int, schedule: Callable[[int], float] | None = None) -> float:
    """Per-use amplitude alpha_n; defaults to 1 / (log2(n) sqrt(n))."""
    if int(n) != n or n < 2:
        raise DomainError(f"alpha schedule needs an integer n >= 2, got {n}")
    return float((schedule or default_alpha)(int(n)))


# --------------------------------------------------------------------------
# joint law and per-letter information densities


def joint_law(mac: BinaryMacPair, cfg: CovertConfig) -> JointDist:
    """Joint of (X1, X2, Y, Z); Y and Z are independent given the inputs."""
    px = input_table(cfg)
    t = px[:, :, None, None] * mac.wy_table[:, :, :, None] * mac.wz_table[:, :, None, :]
    return JointDist(("X1", "X2", "Y", "Z"),
                     (mac.x1_alphabet, mac.x2_alphabet, mac.y_alphabet, mac.z_alphabet),
                     t / t.sum())


def _y_density(mac: BinaryMacPair, cfg: CovertConfig, T):
    """Atoms of log W_Y(Y|X1X2) / W_{Y|X_Tc}(Y|X_Tc) under the covert joint."""
    q1, q2 = _bit_laws(cfg)
    w = mac.wy_table
    if T == (1,):
        ref = np.einsum("a,aby->by", q1, w)[None, :, :]
    elif T == (2,):
        ref = np.einsum("b,aby->ay", q2, w)[:, None, :]
    else:
        ref = np.einsum("a,b,aby->y", q1, q2, w)[None, None, :]
    weight = np.outer(q1, q2)[:, :, None] * w
    return _log_ratio_atoms(w, np.broadcast_to(ref, w.shape), weight)


def _z_density(mac: BinaryMacPair, cfg: CovertConfig, T):
    """Atoms of log W_{Z|X_T}(Z|X_T) / Q_Z(Z) under the covert joint."""
    q1, q2 = _bit_laws(cfg)
    w = mac.wz_table
    qz = np.einsum("a,b,abz->z", q1, q2, w)
    if T == (1,):
        num = np.einsum("b,abz->az", q2, w)[:, None, :]
    elif T == (2,):
        num = np.einsum("a,abz->bz", q1, w)[None, :, :]
    else:
        num = w
    weight = np.outer(q1, q2)[:, :, None] * w
    return _log_ratio_atoms(np.broadcast_to(num, w.shape), np.broadcast_to(qz, w.shape), weight)


def _log_ratio_atoms(num, den, weight):
    mask = weight > 0
    vals = np.log2(num[mask] / den[mask])
    return vals, weight[mask] / weight[mask].sum()


def density_atoms(mac: BinaryMacPair, cfg: CovertConfig, T, which: str):
    """Per-letter information-density atoms ``(values, probs)`` for subset T.

    ``which="y"``: log W_{Y|X1X2} / W_{Y|X_Tc} (reliability);
    ``which="z"``: log W_{Z|X_T} / Q_Z (resolvability).
    """
    T = tuple(sorted(T))
    if T not in SUBSETS:
        raise ValueError(f"T must be a nonempty subset of {{1,2}}, got {T}")
    if which == "y":
        return _y_density(mac, cfg, T)
    if which == "z":
        return _z_density(mac, cfg, T)
    raise ValueError(f"which must be 'y' or 'z', got {which!r}")


def subset_informations(mac: BinaryMacPair, cfg: CovertConfig) -> dict:
    """Exact I(X_T;Y|X_Tc), I(X_T;Z), I(X_T;Y,Z|X_Tc) and H(X_i) in bits."""
    j = joint_law(mac, cfg)
    out = {}
    for T in SUBSETS:
        left = [f"X{t}" for t in T]
        rest = [f"X{t}" for t in (1, 2) if t not in T]
        out[T] = {
            "I_Y": prob.mutual_information(j, left, "Y", rest),
            "I_Z": prob.mutual_information(j, left, "Z"),
            "I_YZ": prob.mutual_information(j, left, ["Y", "Z"], rest),
        }
    q1, q2 = input_dists(cfg, mac)
    out["H"] = (prob.entropy(q1), prob.entropy(q2))
    return out


# --------------------------------------------------------------------------
# expansion verification


@dataclass(frozen=True)
class ExpansionRecord:
    subset: tuple
    quantity: str
    exact: float
    predicted: float
    residual: float
    scaled_residual: float


@dataclass(frozen=True)
class ExpansionReport:
    rho: tuple
    alpha: float
    chi_n: float
    divergence_bits: float
    records: tuple
    variances: dict
    deviation_constants: dict

    def record(self, quantity: str, subset=()) -> ExpansionRecord:
        for r in self.records:
            if r.quantity == quantity and r.subset == tuple(subset):
                return r
        raise KeyError((quantity, subset))

    def to_dict(self) -> dict:
        return {
            "rho": list(self.rho),
            "alpha": self.alpha,
            "chi_n": self.chi_n,
            "divergence_bits": self.divergence_bits,
            "records": [
                {"subset": subset_label(r.subset) if r.subset else "", "quantity": r.quantity,
                 "exact": r.exact, "predicted": r.predicted, "residual": r.residual,
                 "scaled_residual": r.scaled_residual}
                for r in self.records
            ],
            "variances": {f"{k[0]}{subset_label(k[1])}": v for k, v in self.variances.items()},
            "deviation_constants": {f"{k[0]}{subset_label(k[1])}": v
                                    for k, v in self.deviation_constants.items()},
        }


def expansion_report(mac: BinaryMacPair, cfg: CovertConfig) -> ExpansionReport:
    """Exact information quantities of the covert process against their expansions.

    The divergence D(Q_Z||Q_0) is compared in nats with (1/2) alpha^2 chi_n,
    since the quadratic constant only holds in natural units; its residual is
    scaled by alpha^3. Information terms are compared in bits with their
    first-order predictions, residuals scaled by alpha^2.
    """
    a = cfg.alpha
    _, qz = output_dists(mac, cfg)
    d_bits = prob.kl_divergence(qz, mac.Q(0))
    cn = chi_n(mac, cfg) if a > 0 else 0.0
    d_pred = 0.5 * a * a * cn
    d_res = prob.to_nats(d_bits) - d_pred
    records = [ExpansionRecord((), "D(Q_Z||Q_0)", prob.to_nats(d_bits), d_pred, d_res,
                               d_res / a**3 if a > 0 else 0.0)]

    dp = {t: prob.kl_divergence(mac.P(t), mac.P(0)) for t in (1, 2)}
    dq = {t: prob.kl_divergence(mac.Q(t), mac.Q(0)) for t in (1, 2)}
    info = subset_informations(mac, cfg)
    variances, constants = {}, {}
    for T in SUBSETS:
        first = {
            "I_Y": sum(cfg.rho[t - 1] * a * dp[t] for t in T),
            "I_Z": sum(cfg.rho[t - 1] * a * dq[t] for t in T),
            "I_YZ": sum(cfg.rho[t - 1] * a * (dp[t] + dq[t]) for t in T),
        }
        for q, pred in first.items():
            exact = info[T][q]
            res = exact - pred
            records.append(ExpansionRecord(T, q, exact, pred, res, res / a**2 if a > 0 else 0.0))
        for which, q in (("y", "I_Y"), ("z", "I_Z")):
            vals, probs = density_atoms(mac, cfg, T, which)
            mean = float(np.dot(vals, probs))
            variances[(which, T)] = float(np.dot((vals - mean) ** 2, probs))
            constants[(which, T)] = float(np.max(np.abs(vals - info[T][q])))
    return ExpansionReport(cfg.rho, a, cn, d_bits, tuple(records), variances, constants)


ALPHA_GRID = (1e-2, 1e-3, 1e-4)
RATIO_LIMIT = 4.0


@dataclass(frozen=True)
class ScalingCheck:
    name: str
    values: tuple
    ratio: float
    passed: bool


def scaling_checks(mac: BinaryMacPair, rho, alphas: Sequence[float] = ALPHA_GRID,
                   limit: float = RATIO_LIMIT) -> list:
    """Bounded-ratio checks of every expansion over an alpha grid.

    For each expansion the scaled residual (residual/alpha^3 for the divergence,
    residual/alpha^2 otherwise) must keep the same sign and vary by less than
    ``limit`` across the grid. Variances divided by alpha obey the same rule;
    the deviation constants must not grow by more than ``limit`` as alpha
    shrinks.
    """
    reports = [expansion_report(mac, CovertConfig(tuple(rho), a)) for a in alphas]
    checks = []

    def ratio_check(name, vals):
        vals = tuple(float(v) for v in vals)
        mags = np.abs(vals)
        same_sign = bool(np.all(np.sign(vals) == np.sign(vals[0])))
        if mags.min() == 0.0:
            ratio = math.inf if mags.max() > 0 else 1.0
        else:
            ratio = float(mags.max() / mags.min())
        checks.append(ScalingCheck(name, vals, ratio, same_sign and ratio < limit))

    for rec in reports[0].records:
        label = rec.quantity + (subset_label(rec.subset) if rec.subset else "")
        ratio_check(f"residual {label}",
                    [r.record(rec.quantity, rec.subset).scaled_residual for r in reports])
    for key in reports[0].variances:
        label = f"Var_{key[0]}{subset_label(key[1])}/alpha"
        ratio_check(label, [r.variances[key] / r.alpha for r in reports])
    for key in reports[0].deviation_constants:
        vals = tuple(r.deviation_constants[key] for r in reports)
        growth = max(vals) / vals[0] if vals[0] > 0 else math.inf
        checks.append(ScalingCheck(f"C_{key[0]}{subset_label(key[1])}", vals, growth,
                                   growth < limit))
    return checks
