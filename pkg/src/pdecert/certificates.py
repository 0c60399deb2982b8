"""Certificate records and time series of tracked norms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


PASS = "pass"
FAIL = "fail"
INDETERMINATE = "indeterminate"


@dataclass
class BoundCertificate:
    """Evaluation of one inequality ``lhs <= rhs``.

    ``constant`` is the numerical constant that was folded into ``rhs``.
    A certificate passes when ``lhs <= rhs * (1 + tol)``.  ``status`` can be
    forced to "indeterminate" for degenerate 0 <= 0 evaluations where the
    inequality carries no information.
    """

    name: str
    lhs: float
    rhs: float
    constant: float = 1.0
    tol: float = 0.0
    status: str | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        if self.status is None:
            self.status = PASS if self.lhs <= self.rhs * (1.0 + self.tol) else FAIL

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def margin(self) -> float:
        # 0 <= 0 is reported as an unbounded margin, there is nothing to violate
        if self.lhs == 0.0 and self.rhs == 0.0 and self.status == PASS:
            return math.inf
        return self.rhs - self.lhs

    @property
    def ratio(self) -> float:
        if self.rhs == 0.0:
            return 0.0 if self.lhs == 0.0 else math.inf
        return self.lhs / self.rhs

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "pass": self.passed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "constant": self.constant,
            "tol": self.tol,
            "margin": self.margin,
        }


def combine(name: str, certs: list[BoundCertificate], **details) -> BoundCertificate:
    """Fold per-sample certificates into one, keeping the worst sample.

    The worst sample is the one with the largest ``lhs/rhs``.  Indeterminate
    samples are skipped; if all are indeterminate the result is too.
    """
    live = [c for c in certs if c.status != INDETERMINATE]
    if not live:
        return BoundCertificate(name, 0.0, 0.0, status=INDETERMINATE, details=details)
    worst = max(live, key=lambda c: (not c.passed, c.ratio))
    status = PASS if all(c.passed for c in live) else FAIL
    out = BoundCertificate(name, worst.lhs, worst.rhs, worst.constant, worst.tol, status)
    out.details = dict(details)
    out.details["samples"] = len(live)
    out.details["min_margin"] = min(c.margin for c in live)
    out.details["max_ratio"] = max(c.ratio for c in live)
    return out


class NormSeries:
    """Time-stamped record of one tracked quantity.

    Times must be strictly increasing and values finite and nonnegative.
    """

    def __init__(self, quantity: str):
        self.quantity = quantity
        self._t: list[float] = []
        self._v: list[float] = []

    def append(self, t, value):
        t = float(t)
        value = float(value)
        if self._t and not t > self._t[-1]:
            raise ValueError(f"{self.quantity}: time {t} not after {self._t[-1]}")
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"{self.quantity}: bad value {value} at t={t}")
        self._t.append(t)
        self._v.append(value)

    def __len__(self):
        return len(self._t)

    @property
    def times(self) -> np.ndarray:
        return np.asarray(self._t)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self._v)

    def last(self) -> float:
        return self._v[-1]

    def window(self, t_lo, t_hi) -> "NormSeries":
        out = NormSeries(self.quantity)
        for t, v in zip(self._t, self._v):
            if t_lo <= t <= t_hi:
                out.append(t, v)
        return out

    def loglog_slope(self, t_lo=None, t_hi=None) -> float:
        """Least-squares slope of log(value) against log(t)."""
        t, v = self.times, self.values
        sel = (t > 0) & (v > 0)
        if t_lo is not None:
            sel &= t >= t_lo
        if t_hi is not None:
            sel &= t <= t_hi
        if sel.sum() < 2:
            raise ValueError("need at least two positive samples for a slope")
        slope, _ = np.polyfit(np.log(t[sel]), np.log(v[sel]), 1)
        return float(slope)

    def __repr__(self):
        return f"NormSeries({self.quantity!r}, n={len(self)})"
