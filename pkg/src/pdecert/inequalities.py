"""Corpus audits of functional inequalities on compactly concentrated fields.

The periodic box stands in for R^n only when the sample has negligible tails
at the boundary, so every audit first rejects fields whose boundary values
exceed 1e-10 of their maximum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .certificates import BoundCertificate
from .exceptions import DomainError, EmptyCorpusError, RejectedSampleError, UnsupportedDimensionError
from .grid import Field, GridSpec, hdot_norm, lp_norm, refined_sup

K0 = 0.678
K1 = 1.0
K2 = K0 * math.sqrt(K1)
K3 = 0.581862001307
K_NASH = 1.0
# sharp constant of |u|_6 <= S |grad u|_2 in three dimensions
SOBOLEV_3D = 1.0 / math.sqrt(3 * math.pi) * (math.gamma(3) / math.gamma(1.5)) ** (1 / 3)
K_L4 = SOBOLEV_3D**0.75
TAIL_THRESHOLD = 1e-10


@dataclass(frozen=True)
class InequalitySpec:
    """lhs(u) <= constant * rhs(u).

    ``source`` records where the constant comes from: "published" for a
    value quoted with the inequality, "upper-bound" for a safe rounding of a
    known constant, and "derived" for one computed here.
    """

    name: str
    n: int
    constant: float
    lhs: Callable[[Field], float]
    rhs: Callable[[Field], float]
    exponents: dict = field(default_factory=dict)
    source: str = "published"
    vector_ok: bool = True

    def ratio(self, u: Field) -> float:
        r = self.rhs(u)
        return self.lhs(u) / r if r > 0 else 0.0


def _l2(u):
    return lp_norm(u, 2)


def _grad(u):
    return hdot_norm(u, 1)


def _hess(u):
    return hdot_norm(u, 2)


def _sup(u):
    return refined_sup(u) if u.components == 1 else lp_norm(u, math.inf)


def nash(n) -> InequalitySpec:
    a, b = 2 / (n + 2), n / (n + 2)
    return InequalitySpec(
        "nash", n, K_NASH, _l2,
        lambda u: lp_norm(u, 1) ** a * _grad(u) ** b,
        {"L1": a, "grad": b}, "upper-bound")


def gn_lr(n, r) -> InequalitySpec:
    """|v|_r <= |v|_1^(1-theta) |grad v|_2^theta with constant 1, 2 <= r < 2 + 2/n."""
    if not 2 <= r < 2 + 2 / n:
        raise DomainError(f"r must lie in [2, {2 + 2 / n}) for n = {n}, got {r}")
    theta = (1 - 1 / r) / (0.5 + 1 / n)
    return InequalitySpec(
        f"gn_lr[r={r:g}]", n, 1.0, lambda u: lp_norm(u, r),
        lambda u: lp_norm(u, 1) ** (1 - theta) * _grad(u) ** theta,
        {"L1": 1 - theta, "grad": theta}, "published")


def _need3(n):
    if n != 3:
        raise UnsupportedDimensionError("this inequality is stated in three dimensions")


def gn_sup(n=3) -> InequalitySpec:
    _need3(n)
    return InequalitySpec("gn_sup", 3, K0, _sup,
                          lambda u: _l2(u) ** 0.25 * _hess(u) ** 0.75,
                          {"L2": 0.25, "hess": 0.75}, vector_ok=False)


def gn_grad(n=3) -> InequalitySpec:
    _need3(n)
    return InequalitySpec("gn_grad", 3, K1, _grad,
                          lambda u: _l2(u) ** 0.5 * _hess(u) ** 0.5,
                          {"L2": 0.5, "hess": 0.5})


def gn_sup_grad(n=3) -> InequalitySpec:
    _need3(n)
    return InequalitySpec("gn_sup_grad", 3, K2,
                          lambda u: _sup(u) * _grad(u) ** 0.5,
                          lambda u: _l2(u) ** 0.5 * _hess(u),
                          {"L2": 0.5, "hess": 1.0}, vector_ok=False)


def gn_l3(n=3) -> InequalitySpec:
    _need3(n)
    return InequalitySpec("gn_l3", 3, K3, lambda u: lp_norm(u, 3),
                          lambda u: _l2(u) ** 0.5 * _grad(u) ** 0.5,
                          {"L2": 0.5, "grad": 0.5})


def gn_l4(n=3, K=K_L4) -> InequalitySpec:
    _need3(n)
    return InequalitySpec("gn_l4", 3, K, lambda u: lp_norm(u, 4),
                          lambda u: _l2(u) ** 0.25 * _grad(u) ** 0.75,
                          {"L2": 0.25, "grad": 0.75}, "derived")


def registry():
    """Every registered inequality in each dimension where it applies."""
    out = []
    for n in (1, 2, 3):
        out.append(nash(n))
        out.append(gn_lr(n, 2.0))
        out.append(gn_lr(n, 2 + 1 / n))
    out += [gn_sup(), gn_grad(), gn_sup_grad(), gn_l3(), gn_l4()]
    return out


def tail_fraction(u: Field) -> float:
    """Largest boundary-face magnitude relative to the field maximum."""
    v = np.abs(u.values)
    top = v.max()
    if top == 0:
        return 0.0
    edge = max(float(np.take(v, 0, axis=ax).max()) for ax in u.axes)
    return edge / top


def audit(ineq: InequalitySpec, u: Field, tol=1e-3) -> BoundCertificate:
    if u.grid.n != ineq.n:
        raise DomainError(f"{ineq.name} is set up for n = {ineq.n}, field has n = {u.grid.n}")
    if u.components > 1 and not ineq.vector_ok:
        raise DomainError(f"{ineq.name} is audited on scalar fields only")
    if tail_fraction(u) > TAIL_THRESHOLD:
        raise RejectedSampleError(f"boundary tail {tail_fraction(u):.2e} above {TAIL_THRESHOLD}")
    lhs = ineq.lhs(u)
    rhs = ineq.constant * ineq.rhs(u)
    return BoundCertificate(ineq.name, lhs, rhs, constant=ineq.constant, tol=tol)


# corpora ----------------------------------------------------------------------

CORPUS_GRIDS = {1: GridSpec(1, 256, 24.0), 2: GridSpec(2, 128, 24.0), 3: GridSpec(3, 64, 24.0)}
KINDS = ("gaussian", "windowed", "bumps")


def _r2(x, c, scales):
    return sum(((xi - ci) / s) ** 2 for xi, ci, s in zip(x, c, scales))


def sample_field(kind, grid: GridSpec, rng: np.random.Generator, components=1) -> Field:
    """One corpus member.  Widths stay resolved and tails stay below 1e-10."""
    n = grid.n
    x = grid.coords()
    comps = []
    for _ in range(components):
        if kind == "gaussian":
            c = rng.uniform(-1.5, 1.5, n)
            scales = rng.uniform(0.9, 1.6, n)
            v = rng.uniform(0.5, 2.0) * np.exp(-_r2(x, c, scales))
        elif kind == "windowed":
            w = rng.uniform(1.2, 2.0)
            wave = np.zeros(grid.shape)
            for _ in range(4):
                k = rng.uniform(-2.0, 2.0, n)
                wave = wave + rng.standard_normal() * np.cos(sum(ki * xi for ki, xi in zip(k, x))
                                                              + rng.uniform(0, 2 * np.pi))
            v = wave * np.exp(-_r2(x, np.zeros(n), [w] * n))
        elif kind == "bumps":
            v = np.zeros(grid.shape)
            for _ in range(rng.integers(2, 5)):
                c = rng.uniform(-3.0, 3.0, n)
                scales = rng.uniform(0.9, 1.5, n)
                v = v + rng.uniform(-1.0, 1.0) * np.exp(-_r2(x, c, scales))
        else:
            raise DomainError(f"unknown corpus kind {kind!r}")
        comps.append(v)
    return Field(grid, values=np.stack(comps))


@dataclass
class CorpusSummary:
    name: str
    n: int
    count: int
    passed: int
    rejected: int
    max_ratio: float
    ratios: list
    failures: list

    @property
    def all_passed(self):
        return self.passed == self.count - self.rejected


def corpus_audit(ineq: InequalitySpec, count, seed=0, kinds=KINDS, vector=False, tol=1e-3,
                 grid=None) -> CorpusSummary:
    """Audit ``count`` seeded samples cycling through ``kinds``.

    The reported ratio is lhs / (K * rhs), so 1 is the limit.
    """
    return corpus_audit_many([ineq], count, seed, kinds, vector, tol, grid)[0]


def corpus_audit_many(ineqs, count, seed=0, kinds=KINDS, vector=False, tol=1e-3,
                      grid=None) -> list[CorpusSummary]:
    """Same corpus for several inequalities of one dimension; one summary each."""
    if count < 1:
        raise EmptyCorpusError("corpus needs at least one sample")
    dims = {i.n for i in ineqs}
    if len(dims) != 1:
        raise DomainError("inequalities audited together must share the dimension")
    n = dims.pop()
    grid = grid or CORPUS_GRIDS[n]
    rng = np.random.default_rng(seed)
    comps = n if vector else 1
    ratios = [[] for _ in ineqs]
    failures = [[] for _ in ineqs]
    passed = [0] * len(ineqs)
    rejected = 0
    for i in range(count):
        u = sample_field(kinds[i % len(kinds)], grid, rng, comps)
        if tail_fraction(u) > TAIL_THRESHOLD:
            rejected += 1
            continue
        for j, ineq in enumerate(ineqs):
            cert = audit(ineq, u, tol)
            ratios[j].append(cert.ratio)
            if cert.passed:
                passed[j] += 1
            else:
                failures[j].append((i, cert.ratio))
    if rejected == count:
        raise EmptyCorpusError(f"all {count} samples were rejected")
    return [CorpusSummary(ineq.name, n, count, passed[j], rejected, max(ratios[j]), ratios[j], failures[j])
            for j, ineq in enumerate(ineqs)]


# dilation and amplitude invariance -----------------------------------------------

SCALING_GRIDS = {1: GridSpec(1, 512, 24.0), 2: GridSpec(2, 256, 24.0), 3: GridSpec(3, 128, 24.0)}


def _aniso(grid, widths, lam=1.0, amp=1.0):
    return Field.from_function(grid, lambda *x: amp * np.exp(-_r2([lam * xi for xi in x],
                                                                  [0.0] * grid.n, widths)))


def scaling_audit(ineq: InequalitySpec, lam=2.0, amp=2.0, rtol=1e-8) -> BoundCertificate:
    """Ratio invariance under u -> amp*u and u(x) -> u(lam*x)."""
    grid = SCALING_GRIDS[ineq.n]
    widths = [2.4, 2.0, 1.8][: ineq.n]
    base = ineq.ratio(_aniso(grid, widths))
    scaled = ineq.ratio(_aniso(grid, widths, amp=amp))
    dilated = ineq.ratio(_aniso(grid, widths, lam=lam))
    dev = max(abs(scaled - base), abs(dilated - base)) / base
    status = "pass" if dev < rtol else "fail"
    return BoundCertificate(f"scaling[{ineq.name}]", dev, rtol, status=status,
                            details={"base": base, "amplitude": scaled, "dilation": dilated})
