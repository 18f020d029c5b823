"""Covert (CSK) and wiretap (WSK) secret-key rate region bounds.

CSK regions are unions over the weight split rho of rectangles with corner
``rho_i * kappa(rho) * gap_i``; WSK regions are unions over input laws of
MAC-style pentagons. Envelopes are kept as the Pareto set of corner points plus
the raw pieces needed to evaluate the exact upper boundary at any r1.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import prob
from .channel import BinaryMacPair, kappa
from .errors import EmptyRegion
from .prob import DiscreteDist, JointDist

CSK_KINDS = ("csk_inner", "csk_outer")
WSK_KINDS = ("wsk_inner", "wsk_outer")
ENVELOPE_SAMPLES = 512


@dataclass(frozen=True)
class RatePair:
    r1: float
    r2: float

    def __post_init__(self):
        object.__setattr__(self, "r1", float(self.r1))
        object.__setattr__(self, "r2", float(self.r2))
        if self.r1 < 0 or self.r2 < 0:
            raise ValueError(f"rates must be nonnegative, got ({self.r1}, {self.r2})")

    def dominates(self, other: "RatePair") -> bool:
        return self.r1 >= other.r1 and self.r2 >= other.r2

    def as_tuple(self) -> tuple:
        return (self.r1, self.r2)


def _as_rho(rho) -> tuple:
    if np.ndim(rho) == 0:
        r1 = float(rho)
        return (r1, 1.0 - r1)
    r1, r2 = (float(r) for r in rho)
    if r1 < 0 or r2 < 0 or abs(r1 + r2 - 1.0) > 1e-12:
        raise ValueError(f"rho must be a probability pair, got {rho}")
    return (r1, r2)


def csk_inner_corner(mac: BinaryMacPair, rho) -> RatePair:
    """Corner of the achievable rectangle: rho_i kappa(rho) {gap_i}^+."""
    r = _as_rho(rho)
    k = kappa(mac, r)
    return RatePair(r[0] * k * max(mac.gap(1), 0.0), r[1] * k * max(mac.gap(2), 0.0))


def csk_outer_corner(mac: BinaryMacPair, rho) -> RatePair:
    """Corner of the converse rectangle: rho_i kappa(rho) D(P_i||P_0)."""
    r = _as_rho(rho)
    k = kappa(mac, r)
    return RatePair(r[0] * k * prob.kl_divergence(mac.P(1), mac.P(0)),
                    r[1] * k * prob.kl_divergence(mac.P(2), mac.P(0)))


def default_rho_grid(points: int = 1001, lo: float = 0.001, hi: float = 0.999) -> np.ndarray:
    return np.linspace(lo, hi, points)


def pareto_indices(r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
    """Indices of the nondominated points, ordered by r1 ascending.

    Sort by r1 descending (r2 descending on ties) and keep each point whose r2
    beats everything to its right.
    """
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    order = np.lexsort((-r2, -r1))
    keep = []
    best = -np.inf
    for i in order:
        if r2[i] > best:
            keep.append(i)
            best = r2[i]
    return np.array(keep[::-1], dtype=int)


@dataclass(frozen=True, eq=False)
class RegionBoundary:
    """Pareto boundary of a union of rate regions.

    ``points`` are the nondominated corners (r1 ascending, r2 descending) and
    ``provenance[i]`` the parameter that produced ``points[i]``. ``pieces``
    holds, per swept parameter, the constraint triple ``(b1, b2, b_sum)``
    whose region is ``{r1 <= b1, r2 <= b2, r1 + r2 <= b_sum}``; rectangles use
    ``b_sum = b1 + b2``.
    """

    kind: str
    points: tuple
    provenance: tuple
    pieces: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        r1 = np.array([p.r1 for p in self.points])
        r2 = np.array([p.r2 for p in self.points])
        if np.any(np.diff(r1) < 0) or np.any(np.diff(r2) > 0):
            raise ValueError("boundary points must have r1 ascending and r2 non-increasing")

    @property
    def r1_max(self) -> float:
        return max(p.r1 for p in self.points)

    @property
    def r2_max(self) -> float:
        return max(p.r2 for p in self.points)

    def upper(self, r1) -> np.ndarray:
        """Largest r2 with (r1, r2) in the union; NaN beyond the region."""
        r1 = np.atleast_1d(np.asarray(r1, dtype=float))
        b1, b2, bs = self.pieces[:, 0], self.pieces[:, 1], self.pieces[:, 2]
        cap = np.minimum(b2[None, :], bs[None, :] - r1[:, None])
        cap = np.where(r1[:, None] <= b1[None, :] + 1e-15, cap, -np.inf)
        out = cap.max(axis=1)
        out = np.where(out < -1e-15, np.nan, np.maximum(out, 0.0))
        return out

    def contains(self, pair: RatePair, tol: float = 1e-12) -> bool:
        if pair.r1 > self.r1_max + tol:
            return False
        return bool(pair.r2 <= self.upper(min(pair.r1, self.r1_max))[0] + tol)

    def staircase(self) -> list:
        """Boundary polyline from the r2 axis to the r1 axis.

        Exact for rectangle unions; for pentagon unions the corners are joined
        by straight segments, which is exact whenever adjacent corners come
        from the same pentagon.
        """
        pts = [(0.0, self.points[0].r2)]
        rect = self.kind in CSK_KINDS
        for i, p in enumerate(self.points):
            if i and rect:
                pts.append((self.points[i - 1].r1, p.r2))
            pts.append(p.as_tuple())
        pts.append((self.points[-1].r1, 0.0))
        return pts

    def sample(self, num: int = ENVELOPE_SAMPLES):
        grid = np.linspace(0.0, self.r1_max, num)
        return grid, self.upper(grid)

    def provenance_columns(self) -> list:
        return ["rho1"] if self.kind in CSK_KINDS else ["px1", "px2"]

    def rows(self) -> list:
        out = []
        for p, prov in zip(self.points, self.provenance):
            prov = prov if isinstance(prov, tuple) else (prov,)
            out.append([self.kind, p.r1, p.r2, *prov])
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "r1", "r2", *self.provenance_columns()])
        for row in self.rows():
            w.writerow([row[0]] + [repr(float(v)) for v in row[1:]])
        return buf.getvalue()

    def envelope_csv(self, num: int = ENVELOPE_SAMPLES) -> str:
        r1, r2 = self.sample(num)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "r1", "r2"])
        for a, b in zip(r1, r2):
            w.writerow([self.kind, repr(float(a)), repr(float(b))])
        return buf.getvalue()

    def to_json_dict(self, num: int = ENVELOPE_SAMPLES) -> dict:
        r1, r2 = self.sample(num)
        return {
            "kind": self.kind,
            "columns": ["r1", "r2", *self.provenance_columns()],
            "points": [[float(v) for v in row[1:]] for row in self.rows()],
            "envelope": {"r1": r1.tolist(), "r2": r2.tolist()},
            "meta": self.meta,
        }


def _rect_pieces(corners: np.ndarray) -> np.ndarray:
    return np.column_stack([corners[:, 0], corners[:, 1], corners[:, 0] + corners[:, 1]])


def region_union(mac: BinaryMacPair, grid: Iterable | None = None,
                 kind: str = "inner") -> RegionBoundary:
    """Pareto envelope of the CSK rectangles over a grid of weight splits.

    ``grid`` holds rho1 values or (rho1, rho2) pairs; default 1001 points on
    [0.001, 0.999].
    """
    grid = default_rho_grid() if grid is None else list(grid)
    if len(grid) == 0:
        raise ValueError("rho grid is empty")
    corner = {"inner": csk_inner_corner, "outer": csk_outer_corner}[kind]
    rhos = [_as_rho(r) for r in grid]
    corners = np.array([corner(mac, r).as_tuple() for r in rhos])
    if np.all(corners == 0.0):
        raise EmptyRegion(f"every csk_{kind} corner is the origin")
    keep = pareto_indices(corners[:, 0], corners[:, 1])
    points = tuple(RatePair(*corners[i]) for i in keep)
    provenance = tuple(rhos[i][0] for i in keep)
    return RegionBoundary(f"csk_{kind}", points, provenance, _rect_pieces(corners),
                          {"grid_size": len(rhos)})


# --------------------------------------------------------------------------
# wiretap secret key


@dataclass(frozen=True)
class WskConstraintSet:
    bound_1: float
    bound_2: float
    bound_sum: float

    def as_tuple(self) -> tuple:
        return (self.bound_1, self.bound_2, self.bound_sum)

    def corners(self) -> tuple:
        """The two Pareto corners of {r1<=b1, r2<=b2, r1+r2<=b_sum}."""
        b1 = min(self.bound_1, self.bound_sum)
        b2 = min(self.bound_2, self.bound_sum)
        return (RatePair(b1, max(min(b2, self.bound_sum - b1), 0.0)),
                RatePair(max(min(b1, self.bound_sum - b2), 0.0), b2))


def input_joint(mac: BinaryMacPair, px: np.ndarray) -> JointDist:
    """Joint of (X1, X2, Y, Z) for an input table ``px[b1, b2]``."""
    px = np.asarray(px, dtype=float)
    t = px[:, :, None, None] * mac.wy_table[:, :, :, None] * mac.wz_table[:, :, None, :]
    return JointDist(("X1", "X2", "Y", "Z"),
                     (mac.x1_alphabet, mac.x2_alphabet, mac.y_alphabet, mac.z_alphabet), t)


def _law_vector(p, alphabet) -> np.ndarray:
    if isinstance(p, DiscreteDist):
        if p.support != tuple(alphabet):
            raise ValueError(f"input law support {p.support} != input alphabet {alphabet}")
        return p.probs
    # a bare number is P(meaningful symbol)
    return np.array([1.0 - float(p), float(p)])


def wsk_constraints(mac: BinaryMacPair, p_x1=None, p_x2=None, kind: str = "inner",
                    joint_inputs=None, correlated: bool = False) -> WskConstraintSet:
    """Per-subset WSK bounds for one input law.

    inner: ``{I(X_T;Y|X_Tc) - I(X_T;Z)}^+``; outer: ``I(X_T; Y, X_Tc | Z)``.
    Inputs are the product ``p_x1 x p_x2`` unless ``joint_inputs`` (a 2x2
    table indexed by bits) is given together with ``correlated=True``.
    """
    if joint_inputs is not None:
        if not correlated:
            raise ValueError("correlated input laws require correlated=True")
        px = np.asarray(joint_inputs, dtype=float)
    else:
        px = np.outer(_law_vector(p_x1, mac.x1_alphabet), _law_vector(p_x2, mac.x2_alphabet))
    j = input_joint(mac, px)
    bounds = []
    for T in ((1,), (2,), (1, 2)):
        left = [f"X{t}" for t in T]
        rest = [f"X{t}" for t in (1, 2) if t not in T]
        if kind == "inner":
            v = prob.mutual_information(j, left, "Y", rest) - prob.mutual_information(j, left, "Z")
            bounds.append(max(v, 0.0))
        elif kind == "outer":
            bounds.append(prob.mutual_information(j, left, ["Y", *rest], "Z"))
        else:
            raise ValueError(f"kind must be 'inner' or 'outer', got {kind!r}")
    return WskConstraintSet(*bounds)


def _batched_entropy(t: np.ndarray, keep: tuple) -> np.ndarray:
    # t: (K, X1, X2, Y, Z); keep lists the variable axes (1..4) to retain
    drop = tuple(a for a in range(1, 5) if a not in keep)
    m = t.sum(axis=drop) if drop else t
    m = m.reshape(m.shape[0], -1)
    logs = np.log2(np.where(m > 0, m, 1.0))
    return -np.sum(m * logs, axis=1)


def _batched_mi(t: np.ndarray, a: tuple, b: tuple, c: tuple = ()) -> np.ndarray:
    h = lambda axes: _batched_entropy(t, tuple(sorted(axes))) if axes else 0.0
    return h(a + c) + h(b + c) - h(a + b + c) - h(c)


def wsk_constraints_batch(mac: BinaryMacPair, p1, p2) -> tuple:
    """Vectorised inner and outer bounds for product laws with P(meaningful) = p1, p2.

    Returns two (K, 3) arrays of (bound_1, bound_2, bound_sum).
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    q1 = np.stack([1.0 - p1, p1], axis=1)
    q2 = np.stack([1.0 - p2, p2], axis=1)
    px = q1[:, :, None] * q2[:, None, :]
    t = (px[:, :, :, None, None] * mac.wy_table[None, :, :, :, None]
         * mac.wz_table[None, :, :, None, :])
    X1, X2, Y, Z = 1, 2, 3, 4
    inner = np.column_stack([
        _batched_mi(t, (X1,), (Y,), (X2,)) - _batched_mi(t, (X1,), (Z,)),
        _batched_mi(t, (X2,), (Y,), (X1,)) - _batched_mi(t, (X2,), (Z,)),
        _batched_mi(t, (X1, X2), (Y,)) - _batched_mi(t, (X1, X2), (Z,)),
    ])
    outer = np.column_stack([
        _batched_mi(t, (X1,), (Y, X2), (Z,)),
        _batched_mi(t, (X2,), (Y, X1), (Z,)),
        _batched_mi(t, (X1, X2), (Y,), (Z,)),
    ])
    return np.maximum(inner, 0.0), np.maximum(outer, 0.0)


def default_wsk_grid(points: int = 101) -> list:
    p = np.linspace(0.0, 1.0, points)
    return [(a, b) for a in p for b in p]


def _wsk_boundary(kind: str, grid: list, sets: list) -> RegionBoundary:
    pieces = np.array([s.as_tuple() for s in sets])
    pts, prov = [], []
    for g, s in zip(grid, sets):
        for c in s.corners():
            pts.append(c.as_tuple())
            prov.append(g)
    pts = np.array(pts)
    if np.all(pts == 0.0):
        raise EmptyRegion(f"every {kind} corner is the origin")
    keep = pareto_indices(pts[:, 0], pts[:, 1])
    return RegionBoundary(kind, tuple(RatePair(*pts[i]) for i in keep),
                          tuple(prov[i] for i in keep), pieces, {"grid_size": len(grid)})


def _provenance(g) -> tuple:
    if isinstance(g, tuple) and all(isinstance(v, DiscreteDist) for v in g):
        return (float(g[0].probs[1]), float(g[1].probs[1]))
    return (float(g[0]), float(g[1]))


def wsk_region_sweep(mac: BinaryMacPair, grid: Sequence | None = None):
    """(inner, outer) WSK boundaries over a grid of product input laws.

    Grid entries are ``(p1, p2)`` with ``p_i`` either P(meaningful symbol) or a
    ``DiscreteDist`` over the user's input alphabet.
    """
    grid = default_wsk_grid() if grid is None else list(grid)
    if not grid:
        raise ValueError("input-law grid is empty")
    prov = [_provenance(tuple(g)) for g in grid]
    p = np.array(prov)
    inner, outer = wsk_constraints_batch(mac, p[:, 0], p[:, 1])
    return (_wsk_boundary("wsk_inner", prov, [WskConstraintSet(*row) for row in inner]),
            _wsk_boundary("wsk_outer", prov, [WskConstraintSet(*row) for row in outer]))


def export_boundaries(boundaries, meta: dict | None = None) -> str:
    """JSON document holding several boundaries plus shared metadata."""
    doc = {"meta": meta or {}, "boundaries": [b.to_json_dict() for b in boundaries]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
