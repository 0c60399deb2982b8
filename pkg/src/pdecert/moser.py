"""Constants of the doubling iteration q = 2^l p behind the sup-norm bound.

All products are accumulated as sums of logarithms, so m can be large.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .certificates import BoundCertificate
from .exceptions import DomainError


@dataclass(frozen=True)
class IterationParams:
    n: int
    kappa: float
    p: float
    K_nash: float = 1.0
    p0: float = 1.0

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2 or 3, got {self.n}")
        if self.kappa < 0:
            raise DomainError("kappa must be >= 0")
        if self.p < self.p0:
            raise DomainError(f"p = {self.p} is below p0 = {self.p0}")
        if not self.p > self.n * self.kappa:
            raise DomainError(f"need p > n*kappa, got p={self.p}, n*kappa={self.n * self.kappa}")
        if not self.K_nash > 0:
            raise DomainError("Nash constant must be positive")

    @property
    def nk(self):
        return self.n * self.kappa


def log_lambda_q(params: IterationParams, q) -> float:
    nk = params.nk
    if not q > 2 * nk:
        raise DomainError(f"q must exceed 2*n*kappa = {2 * nk}, got {q}")
    return (2.0 / q) * math.log(params.K_nash) + params.n / (q - 2 * nk) * math.log(q / 2.0)


def lambda_q(params: IterationParams, q) -> float:
    """K^(2/q) (q/2)^(n/(q - 2 n kappa))."""
    if q < 2 * params.p:
        raise DomainError(f"q must be >= 2p = {2 * params.p}, got {q}")
    return math.exp(log_lambda_q(params, q))


def log_c_jm(params: IterationParams, j, m) -> float:
    if not 1 <= j <= m:
        raise DomainError(f"need 1 <= j <= m, got j={j}, m={m}")
    p, nk = params.p, params.nk
    top = p - nk / 2.0**m
    total = 0.0
    for l in range(j, m + 1):
        total += top / (p - nk / 2.0**l) * log_lambda_q(params, 2.0**l * p)
    return total


def c_jm(params: IterationParams, j, m) -> float:
    """prod_{l=j}^m lambda(2^l p)^((p - 2^-m n k)/(p - 2^-l n k))."""
    return math.exp(log_c_jm(params, j, m))


def K_nkp(n, kappa, p) -> float:
    if not p > n * kappa:
        raise DomainError(f"need p > n*kappa, got p={p}")
    return (2.0 * p) ** (n / (p - n * kappa))


def _telescoping_terms(params: IterationParams, m):
    p, nk = params.p, params.nk
    for l in range(1, m + 1):
        q = 2.0**l * p
        yield l, q / ((q - 2 * nk) * (q - nk))


def telescoping_sums(params: IterationParams, m):
    """Direct sums of the two series; returns (plain, l-weighted)."""
    a = math.fsum(t for _, t in _telescoping_terms(params, m))
    b = math.fsum(l * t for l, t in _telescoping_terms(params, m))
    return a, b


def telescoping_closed_forms(params: IterationParams, m):
    p, nk = params.p, params.nk
    a = 1.0 / (p - nk) - 1.0 / (2.0**m * p - nk)
    b = (1.0 / (p - nk) - (m + 1) / (2.0**m * p - nk)
         + math.fsum(1.0 / (2.0**l * p - nk) for l in range(1, m + 1)))
    return a, b


def telescoping_check(params: IterationParams, m, rtol=1e-12):
    if m < 1:
        raise DomainError("m must be >= 1")
    sums = telescoping_sums(params, m)
    closed = telescoping_closed_forms(params, m)
    out = []
    for name, lhs, rhs in zip(("telescoping_a", "telescoping_b"), sums, closed):
        err = abs(lhs - rhs)
        status = "pass" if err < rtol * abs(rhs) else "fail"
        out.append(BoundCertificate(name, err, rtol * abs(rhs), status=status,
                                    details={"direct": lhs, "closed": rhs, "m": m}))
    return tuple(out)


def _pw(base, expo):
    if base == 0.0:
        return 0.0
    return base**expo


def closed_form_bound(params: IterationParams, u0_norm_top, Bmu, Up, m) -> float:
    """K max{|u0|_{2^m p}; Bmu^(n(1-2^-m)/(p-nk)) U_p^((p - nk/2^m)/(p-nk))}."""
    if m < 1:
        raise DomainError("m must be >= 1")
    p, nk, n = params.p, params.nk, params.n
    K = K_nkp(n, params.kappa, p)
    e = p - nk
    inner = _pw(Bmu, n * (1 - 2.0**-m) / e) * _pw(Up, (p - nk / 2.0**m) / e)
    return K * max(u0_norm_top, inner)


def recursive_bound(params: IterationParams, u0_norms, Bmu, Up, m) -> float:
    """Iterate U_q <= max{|u0|_q; lambda(q) Bmu^(n/(q-2nk)) U_{q/2}^((q-nk)/(q-2nk))}.

    ``u0_norms[l]`` is |u0|_{L^(2^l p)} for l = 1..m (index 0 unused).
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    nk, n = params.nk, params.n
    U = Up
    for l in range(1, m + 1):
        q = 2.0**l * params.p
        d = q - 2 * nk
        U = max(u0_norms[l], lambda_q(params, q) * _pw(Bmu, n / d) * _pw(U, (q - nk) / d))
    return U


def bmu_exponent(params: IterationParams, j, m) -> float:
    """Exponent of Bmu in the j-th unrolled term."""
    p, nk, n = params.p, params.nk, params.n
    return (p - nk / 2.0**m) / p * (2 * n / (2.0**j * p - 2 * nk) - n / (2.0**m * p - nk))


def expanded_bound(params: IterationParams, u0_norms, Bmu, Up, m) -> float:
    """Unrolled recursion: max of |u0|_{2^m p} and the C(j,m)-weighted terms."""
    p, nk = params.p, params.nk
    top = p - nk / 2.0**m
    terms = [u0_norms[m]]
    for j in range(1, m + 1):
        # the unrolling stops at level j-1, where the datum (or U_p for j = 1) enters
        base = Up if j == 1 else u0_norms[j - 1]
        u_exp = top / (p - nk / 2.0 ** (j - 1))
        terms.append(c_jm(params, j, m) * _pw(Bmu, bmu_exponent(params, j, m)) * _pw(base, u_exp))
    return max(terms)


def growth_step_certificate(sample: dict, params: IterationParams, tol=1e-6) -> BoundCertificate:
    """One-step growth check at a time where d/dt |u|_q^q >= 0.

    ``sample`` keys: q, dLq_dt (value or sign), Lq, Lq_half (|u|_{q/2}), B, mu.
    """
    q = float(sample["q"])
    nk, n = params.nk, params.n
    if not q > 2 * nk:
        raise DomainError(f"q must exceed 2*n*kappa = {2 * nk}")
    name = f"growth_step[q={q:g}]"
    if sample["dLq_dt"] < 0:
        return BoundCertificate(name, 0.0, 0.0, details={"inert": True})
    d = q - 2 * nk
    factor = params.K_nash ** (2 / q) * (q / 2) ** (n / d)
    rhs = factor * _pw(sample["B"] / sample["mu"], n / d) * _pw(sample["Lq_half"], (q - nk) / d)
    return BoundCertificate(name, sample["Lq"], rhs, constant=factor, tol=tol,
                            details={"inert": False})


@dataclass
class LedgerRow:
    level: int
    q: float
    lam: float
    c_1l: float
    bound: float


def bound_ledger(params: IterationParams, m_max, u0_norm_top=1.0, Bmu=1.0, Up=1.0):
    """Rows (l, q, lambda(q), C(1,l), closed-form bound) for l = 1..m_max."""
    rows = []
    for l in range(1, m_max + 1):
        q = 2.0**l * params.p
        rows.append(LedgerRow(l, q, lambda_q(params, q), c_jm(params, 1, l),
                              closed_form_bound(params, u0_norm_top, Bmu, Up, l)))
    return rows
