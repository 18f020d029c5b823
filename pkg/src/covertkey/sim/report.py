"""Simulation reports and confidence intervals."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

from scipy.stats import norm

Z95 = float(norm.ppf(0.975))


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple:
    """Wilson score interval ``(low, high)`` for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(centre - half, 0.0), min(centre + half, 1.0)


@dataclass
class SimReport:
    """Reliability, secrecy, source-simulation and covertness figures for one code.

    In ``exact`` mode ``p_err``/``secrecy_*`` describe the auxiliary scheme and
    the ``protocol_*`` fields the key-generation protocol built from it (when
    the enumeration budget allows). In ``monte_carlo`` mode ``p_err`` is the
    protocol's estimated failure rate.
    """

    mode: str
    scheme: str
    decoder: str
    n: int
    p_err: float
    p_err_half_width: float = 0.0
    p_err_interval: tuple = (math.nan, math.nan)
    secrecy_tv: float = math.nan
    secrecy_kl: float = math.nan
    source_tv_1: float = math.nan
    source_tv_2: float = math.nan
    covertness_kl: float = math.nan
    trials: int = 0
    protocol_p_err: float = math.nan
    protocol_secrecy_tv: float = math.nan
    protocol_secrecy_kl: float = math.nan
    empty_preimage_prob: float = math.nan
    secrecy_source: str = "exact"
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("exact", "monte_carlo"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "exact" and self.p_err_half_width != 0.0:
            raise ValueError("exact reports carry no confidence half-width")
        for name in ("p_err", "source_tv_1", "source_tv_2", "secrecy_tv"):
            v = getattr(self, name)
            if not math.isnan(v) and not -1e-12 <= v <= 1 + 1e-12:
                raise ValueError(f"{name} = {v} is not a probability")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p_err_interval"] = list(self.p_err_interval)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=True) + "\n"


def rows_to_csv(rows: list, columns: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else v
