"""Heat semigroup exp(nu*Laplacian*tau) on the periodic grid."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certificates import BoundCertificate, NormSeries
from .exceptions import DomainError
from .grid import Field, GridSpec, hdot_norm, lp_norm, spectral_derivative


@dataclass(frozen=True)
class HeatParams:
    nu: float
    grid: GridSpec

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError(f"diffusivity must be positive, got {self.nu}")


def heat_multiplier(grid: GridSpec, nu, tau) -> np.ndarray:
    return np.exp(-nu * tau * grid.k2)


def apply_semigroup(field: Field, nu, tau) -> Field:
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")
    if tau == 0:
        return field
    return field.with_spectral(field.spectral * heat_multiplier(field.grid, nu, tau))


def smoothing_exponent(n, r, order):
    return 0.5 * n * (1.0 / r - 0.5) + 0.5 * order


def smoothing_certificate(u: Field, nu, tau, alpha, r, K=1.0) -> BoundCertificate:
    """|D^a e^{nu Lap tau} u|_2 <= K |u|_r (nu tau)^(-gamma).

    K has no published value, so ``details['ratio']`` carries the empirical
    constant LHS / (|u|_r (nu tau)^(-gamma)) for sweeps.
    """
    if not 1 <= r <= 2:
        raise DomainError(f"r must lie in [1, 2], got {r}")
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau}")
    order = sum(alpha)
    gamma = smoothing_exponent(u.grid.n, r, order)
    lhs = lp_norm(spectral_derivative(apply_semigroup(u, nu, tau), alpha), 2)
    base = lp_norm(u, r) * (nu * tau) ** (-gamma)
    ratio = lhs / base if base > 0 else 0.0
    return BoundCertificate(
        f"heat_smoothing[r={r},|a|={order}]", lhs, K * base, constant=K,
        details={"ratio": ratio, "gamma": gamma, "tau": tau},
    )


def geometric_times(t_lo, t_hi, per_decade=10):
    count = max(2, int(round(per_decade * math.log10(t_hi / t_lo))) + 1)
    return np.geomspace(t_lo, t_hi, count)


def heat_decay_series(u0: Field, nu, times, s) -> NormSeries:
    """t^(s/2) |e^{nu Lap t} u0|_{H^s}, or t^(n/4) |.|_inf when s == "sup"."""
    times = np.asarray(times, dtype=float)
    if np.any(times <= 0) or np.any(np.diff(times) <= 0):
        raise DomainError("times must be positive and strictly increasing")
    sup = isinstance(s, str)
    if sup and s != "sup":
        raise DomainError(f"unknown series tag {s!r}")
    if not sup and s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    n = u0.grid.n
    out = NormSeries(f"t^{n / 4}*sup" if sup else f"t^{s / 2}*Hdot_{s}")
    for t in times:
        v = apply_semigroup(u0, nu, t)
        if sup:
            out.append(t, t ** (n / 4) * lp_norm(v, math.inf))
        else:
            out.append(t, t ** (s / 2) * hdot_norm(v, s))
    return out


def l2_decay_series(u0: Field, nu, times) -> NormSeries:
    """Plain |e^{nu Lap t} u0|_2 from the spectrum, without forming fields."""
    g = u0.grid
    power = (np.abs(u0.spectral) ** 2).sum(axis=0)
    k2 = g.k2
    scale = g.volume / g.N ** (2 * g.n)
    out = NormSeries("L2")
    for t in times:
        out.append(t, math.sqrt(float((power * np.exp(-2 * nu * t * k2)).sum()) * scale))
    return out
