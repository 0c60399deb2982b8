"""Finite-volume solver for u_t + div(b |u|^k u) + div f(t,u) = div(A grad u).

Cells sit on the GridSpec sample points, faces halfway between.  Fluxes:
MUSCL/minmod reconstruction with a local Lax-Friedrichs flux for b|u|^k u,
Roe-sign upwinding for f, and centered face gradients for A grad u.  Time
stepping is SSP-RK2.  Mass is conserved exactly up to round-off because
every update is a difference of face fluxes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .certificates import BoundCertificate, NormSeries, combine
from .exceptions import (
    DomainError,
    InsufficientDataError,
    InvalidCoefficientError,
    InvalidFieldError,
    StepRejectedError,
)
from .grid import Field, GridSpec

BOUNDED = "bounded"
BLOW_UP = "blow-up"
BUDGET = "budget-exhausted"


@dataclass
class ProblemSpec:
    """Coefficients and data of one advection-diffusion problem.

    b(x, t, u) and f(t, u) return n components, A(x, t, u) an n x n matrix;
    x is the tuple of coordinate arrays.  ``A=None`` means the identity.
    ``mu`` is the ellipticity floor, a number or a function of t.
    ``bmu_bound`` is an analytic bound for sup_t B(t)/mu(t), used only for
    the global-existence verdict.  ``source`` adds a pointwise reaction
    term and makes the problem non-conservative.
    """

    grid: GridSpec
    kappa: float
    u0: Field
    b: Callable | None = None
    f: Callable | None = None
    A: Callable | None = None
    mu: Callable | float = 1.0
    p0: int = 1
    bmu_bound: float | None = None
    source: Callable | None = None
    name: str = ""

    def __post_init__(self):
        if self.kappa < 0:
            raise DomainError(f"kappa must be >= 0, got {self.kappa}")
        if self.u0.components != 1 or self.u0.grid != self.grid:
            raise InvalidFieldError("u0 must be a scalar field on the problem grid")
        if self.p0 < 1:
            raise DomainError("p0 must be >= 1")

    @property
    def n(self):
        return self.grid.n

    def mu_at(self, t) -> float:
        return float(self.mu(t)) if callable(self.mu) else float(self.mu)


def _vec(val, n, shape, what):
    out = np.empty((n,) + shape)
    if len(val) != n:
        raise InvalidCoefficientError(f"{what} must have {n} components")
    for j in range(n):
        out[j] = np.broadcast_to(np.asarray(val[j], dtype=float), shape)
    if not np.all(np.isfinite(out)):
        raise InvalidCoefficientError(f"{what} returned non-finite values")
    return out


def _mat(val, n, shape):
    out = np.empty((n, n) + shape)
    for j in range(n):
        for l in range(n):
            out[j, l] = np.broadcast_to(np.asarray(val[j][l], dtype=float), shape)
    if not np.all(np.isfinite(out)):
        raise InvalidCoefficientError("A returned non-finite values")
    return out


class _Geometry:
    """Cell and face coordinates for one grid (cached per problem)."""

    def __init__(self, grid: GridSpec):
        self.grid = grid
        self.cells = tuple(grid.coords())
        self.faces = []
        for j in range(grid.n):
            xs = list(self.cells)
            xs[j] = xs[j] + 0.5 * grid.dx
            self.faces.append(tuple(xs))


def _minmod(a, b):
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def oscillation_b(spec: ProblemSpec, u, t):
    """(B_vector, B) with B_j the half-oscillation of b_j(., t, u(.)) over cells."""
    u = u.scalar if isinstance(u, Field) else u
    if spec.b is None:
        zero = np.zeros(spec.n)
        return zero, 0.0
    bv = _vec(spec.b(tuple(spec.grid.coords()), t, u), spec.n, spec.grid.shape, "b")
    flat = bv.reshape(spec.n, -1)
    Bvec = 0.5 * (flat.max(axis=1) - flat.min(axis=1))
    return Bvec, float(np.sqrt((Bvec**2).sum()))


def midrange_b(spec: ProblemSpec, bv):
    flat = bv.reshape(spec.n, -1)
    return 0.5 * (flat.max(axis=1) + flat.min(axis=1))


class _Operator:
    """Semi-discrete right-hand side with its stability limit."""

    def __init__(self, spec: ProblemSpec):
        self.spec = spec
        self.geo = _Geometry(spec.grid)

    def coeff_A(self, x, t, u):
        n = self.spec.n
        if self.spec.A is None:
            return None
        return _mat(self.spec.A(x, t, u), n, u.shape)

    def face_gradients(self, u, j, cdiff):
        dx = self.spec.grid.dx
        up = np.roll(u, -1, axis=j)
        grads = []
        for l in range(self.spec.n):
            if l == j:
                grads.append((up - u) / dx)
            else:
                grads.append(0.5 * (cdiff[l] + np.roll(cdiff[l], -1, axis=j)))
        return grads

    def centered(self, u):
        dx = self.spec.grid.dx
        return [(np.roll(u, -1, axis=l) - np.roll(u, 1, axis=l)) / (2 * dx)
                for l in range(self.spec.n)]

    def rhs(self, u, t):
        """Return (du/dt, max signal speed, max diffusivity)."""
        spec = self.spec
        n, k = spec.n, spec.kappa
        dx = spec.grid.dx
        out = np.zeros_like(u)
        speed = 0.0
        diff_max = 1.0 if spec.A is None else 0.0
        cdiff = self.centered(u) if (spec.A is not None and n > 1) else None
        for j in range(n):
            xf = self.geo.faces[j]
            up = np.roll(u, -1, axis=j)
            um = np.roll(u, 1, axis=j)
            slope = _minmod(u - um, up - u)
            uL = u + 0.5 * slope
            uR = up - 0.5 * np.roll(slope, -1, axis=j)
            flux = np.zeros_like(u)
            if spec.b is not None:
                bL = _vec(spec.b(xf, t, uL), n, u.shape, "b")[j]
                bR = _vec(spec.b(xf, t, uR), n, u.shape, "b")[j]
                aL = np.abs(uL) ** k
                aR = np.abs(uR) ** k
                gL = bL * aL * uL
                gR = bR * aR * uR
                du = uR - uL
                safe = np.where(np.abs(du) > 1e-300, du, 1.0)
                secant = np.where(np.abs(du) > 1e-300, np.abs((gR - gL) / safe), 0.0)
                alpha = np.maximum(np.maximum(np.abs(bL) * (k + 1) * aL,
                                              np.abs(bR) * (k + 1) * aR), secant)
                flux += 0.5 * (gL + gR) - 0.5 * alpha * du
                speed = max(speed, float(alpha.max()))
            if spec.f is not None:
                fL = _vec(spec.f(t, uL), n, u.shape, "f")[j]
                fR = _vec(spec.f(t, uR), n, u.shape, "f")[j]
                du = uR - uL
                close = np.abs(du) <= 1e-12 * (1 + np.abs(uL))
                eps = 1e-7 * (1 + np.abs(uL))
                mid = 0.5 * (uL + uR)
                dfd = (_vec(spec.f(t, mid + eps), n, u.shape, "f")[j]
                       - _vec(spec.f(t, mid - eps), n, u.shape, "f")[j]) / (2 * eps)
                a = np.where(close, dfd, (fR - fL) / np.where(close, 1.0, du))
                flux += np.where(a >= 0, fL, fR)
                speed = max(speed, float(np.abs(a).max()))
            grads = self.face_gradients(u, j, cdiff)
            if spec.A is None:
                flux -= grads[j]
            else:
                Af = self.coeff_A(xf, t, 0.5 * (u + up))
                for l in range(n):
                    flux -= Af[j, l] * grads[l]
                diff_max = max(diff_max, float(np.abs(Af[j]).sum(axis=0).max()))
            out -= (flux - np.roll(flux, 1, axis=j)) / dx
        if spec.source is not None:
            out += np.asarray(spec.source(t, u), dtype=float)
        return out, speed, diff_max

    def stable_dt(self, u, t, speed, diff_max, cfl):
        n = self.spec.n
        dx = self.spec.grid.dx
        rate = n * speed / dx + 2 * n * diff_max / dx**2
        dt = cfl / rate
        if self.spec.source is not None:
            s = np.abs(np.asarray(self.spec.source(t, u), dtype=float)).max()
            top = np.abs(u).max()
            if s > 0:
                dt = min(dt, 0.1 * top / s if top > 0 else dt)
        return dt


class TrackerState:
    """Running diagnostics recorded after every accepted step.

    Scalar records live in ``data`` keyed by name; times in ``times``.
    Running suprema Bmu and U_p are nondecreasing by construction.
    """

    def __init__(self, p_set, audit_q):
        self.p_set = tuple(p_set)
        self.audit_q = tuple(audit_q)
        self.times: list[float] = []
        self.data: dict[str, list[float]] = {}

    def push(self, t, values: dict):
        if self.times and not t > self.times[-1]:
            raise ValueError("tracker times must increase")
        self.times.append(float(t))
        for key, val in values.items():
            self.data.setdefault(key, []).append(float(val))

    def array(self, key) -> np.ndarray:
        if key not in self.data:
            raise InsufficientDataError(f"quantity {key!r} was not tracked")
        return np.asarray(self.data[key])

    def series(self, key) -> NormSeries:
        s = NormSeries(key)
        for t, v in zip(self.times, self.array(key)):
            s.append(t, v)
        return s

    @property
    def B_series(self):
        return self.series("B")

    @property
    def Bmu_running(self):
        return self.series("Bmu")

    def Up_running(self, p):
        return self.series(f"U_{_ptag(p)}")

    @property
    def mass_series(self):
        return self.array("mass")

    def Lp_series(self, p):
        return self.series(f"L{_ptag(p)}")

    def __len__(self):
        return len(self.times)


def _ptag(p):
    if math.isinf(p):
        return "inf"
    return f"{p:g}"


def _lp(u, p, vol):
    a = np.abs(u)
    if math.isinf(p):
        return float(a.max())
    top = a.max()
    if top == 0:
        return 0.0
    return float(top * (((a / top) ** p).sum() * vol) ** (1.0 / p))


@dataclass
class ADState:
    u: np.ndarray
    t: float
    trackers: TrackerState
    steps: int = 0


@dataclass
class RunResult:
    spec: ProblemSpec
    state: ADState
    verdict: str
    blow_up_time: float | None = None
    reason: str = ""
    u0_norms: dict = field(default_factory=dict)

    @property
    def trackers(self) -> TrackerState:
        return self.state.trackers

    @property
    def max_sup_norm(self) -> float:
        return float(self.trackers.array("sup").max())


def audit_ellipticity(spec: ProblemSpec, u, t, rtol=1e-12):
    """Check <A v, v> >= mu(t)|v|^2 at every cell."""
    mu = spec.mu_at(t)
    if not mu > 0:
        raise InvalidCoefficientError(f"mu({t}) = {mu} is not positive")
    if spec.A is None:
        if mu > 1 + rtol:
            raise InvalidCoefficientError(f"mu({t}) = {mu} exceeds the identity's floor 1")
        return
    A = _mat(spec.A(tuple(spec.grid.coords()), t, u), spec.n, u.shape)
    mats = np.moveaxis(A.reshape(spec.n, spec.n, -1), -1, 0)
    if not np.allclose(mats, np.swapaxes(mats, 1, 2)):
        raise InvalidCoefficientError("A is not symmetric")
    low = float(np.linalg.eigvalsh(mats).min())
    if low < mu * (1 - rtol):
        raise InvalidCoefficientError(f"ellipticity fails at t={t}: min eigenvalue {low} < mu {mu}")


class Solver:
    """Stateful driver around the finite-volume operator for one problem."""

    def __init__(self, spec: ProblemSpec, p_set=(1.0, 2.0), audit_q=(2.0,), cfl=0.5,
                 cap_factor=1e6, dt_floor=1e-10, ellipticity_every=10):
        self.spec = spec
        self.op = _Operator(spec)
        self.p_set = tuple(float(p) for p in p_set if p >= spec.p0)
        self.audit_q = tuple(float(q) for q in audit_q)
        self.cfl = cfl
        self.cap_factor = cap_factor
        self.dt_floor = dt_floor
        self.ellipticity_every = ellipticity_every
        u0 = spec.u0.scalar
        vol = spec.grid.cell_volume
        self.u0_norms = {p: _lp(u0, p, vol) for p in self.p_set + (math.inf,)}
        self.cap = cap_factor * max(self.u0_norms[math.inf], 1e-300)

    def initial_state(self) -> ADState:
        u = np.array(self.spec.u0.scalar, dtype=float)
        audit_ellipticity(self.spec, u, 0.0)
        state = ADState(u=u, t=0.0, trackers=TrackerState(self.p_set, self.audit_q))
        self._record(state, None)
        return state

    def _record(self, state: ADState, prev):
        spec = self.spec
        u, t = state.u, state.t
        vol = spec.grid.cell_volume
        mu = spec.mu_at(t)
        rec = {"mu": mu, "mass": float(u.sum() * vol), "sup": float(np.abs(u).max()),
               "min": float(u.min())}
        bv = None
        if spec.b is not None:
            bv = _vec(spec.b(self.op.geo.cells, t, u), spec.n, u.shape, "b")
            flat = bv.reshape(spec.n, -1)
            Bvec = 0.5 * (flat.max(axis=1) - flat.min(axis=1))
            B = float(np.sqrt((Bvec**2).sum()))
        else:
            B = 0.0
        rec["B"] = B
        tr = state.trackers
        if prev is None:
            rec["Bmu"] = B / mu
            rec["mu_int"] = 0.0
        else:
            rec["Bmu"] = max(tr.data["Bmu"][-1], B / mu)
            rec["mu_int"] = tr.data["mu_int"][-1] + 0.5 * (t - tr.times[-1]) * (mu + tr.data["mu"][-1])
        for p in self.p_set:
            val = _lp(u, p, vol)
            rec[f"L{_ptag(p)}"] = val
            key = f"U_{_ptag(p)}"
            rec[key] = val if prev is None else max(tr.data[key][-1], val)
        rec["U_inf"] = rec["sup"] if prev is None else max(tr.data["U_inf"][-1], rec["sup"])
        for q in self.audit_q:
            E, D, R = self._identity_terms(u, t, q, bv)
            rec[f"E_{_ptag(q)}"] = E
            rec[f"D_{_ptag(q)}"] = D
            rec[f"R_{_ptag(q)}"] = R
        tr.push(t, rec)

    def _identity_terms(self, u, t, q, bv):
        """|u|_q^q, the dissipation and the advective term of the L^q identity."""
        spec = self.spec
        n, k = spec.n, spec.kappa
        vol = spec.grid.cell_volume
        E = float((np.abs(u) ** q).sum() * vol)
        beta = midrange_b(spec, bv) if bv is not None else None
        cdiff = self.op.centered(u) if (spec.A is not None and n > 1) else None
        D = 0.0
        R = 0.0
        for j in range(n):
            up = np.roll(u, -1, axis=j)
            uf = 0.5 * (u + up)
            grads = self.op.face_gradients(u, j, cdiff)
            w = np.abs(uf) ** (q - 2) if q != 2 else 1.0
            if spec.A is None:
                flux = grads[j]
            else:
                Af = self.op.coeff_A(self.op.geo.faces[j], t, uf)
                flux = sum(Af[j, l] * grads[l] for l in range(n))
            D += float((w * flux * grads[j]).sum())
            if spec.b is not None:
                bf = _vec(spec.b(self.op.geo.faces[j], t, uf), n, u.shape, "b")[j]
                R += float((np.abs(uf) ** (q - 2 + k) * uf * (bf - beta[j]) * grads[j]).sum())
        c = q * (q - 1) * vol
        return E, c * D, c * R

    def step(self, state: ADState, dt) -> ADState:
        """One SSP-RK2 step; raises StepRejectedError above the stability limit."""
        if not dt > 0:
            raise DomainError("dt must be positive")
        u, t = state.u, state.t
        L1, speed, dmax = self.op.rhs(u, t)
        limit = self.op.stable_dt(u, t, speed, dmax, self.cfl)
        if dt > limit * (1 + 1e-12):
            raise StepRejectedError(f"dt={dt:.3e} above stability limit {limit:.3e}", limit)
        return self._advance(state, dt, L1)

    def _advance(self, state, dt, L1):
        u, t = state.u, state.t
        u1 = u + dt * L1
        L2, _, _ = self.op.rhs(u1, t + dt)
        new = 0.5 * u + 0.5 * (u1 + dt * L2)
        out = ADState(u=new, t=t + dt, trackers=state.trackers, steps=state.steps + 1)
        if np.all(np.isfinite(new)):
            if self.ellipticity_every and out.steps % self.ellipticity_every == 0:
                audit_ellipticity(self.spec, new, out.t)
            self._record(out, state)
        return out

    def run(self, t_final, dt_max=None, max_steps=None) -> RunResult:
        state = self.initial_state()
        while state.t < t_final * (1 - 1e-14):
            if max_steps is not None and state.steps >= max_steps:
                return self._result(state, BUDGET, reason=f"stopped after {state.steps} steps")
            L1, speed, dmax = self.op.rhs(state.u, state.t)
            dt = self.op.stable_dt(state.u, state.t, speed, dmax, self.cfl)
            if dt_max is not None:
                dt = min(dt, dt_max)
            if dt < self.dt_floor:
                return self._result(state, BLOW_UP, state.t, f"dt {dt:.2e} below floor")
            dt = min(dt, t_final - state.t)
            state = self._advance(state, dt, L1)
            if not np.all(np.isfinite(state.u)):
                return self._result(state, BLOW_UP, state.t, "non-finite values")
            top = np.abs(state.u).max()
            if top > self.cap:
                return self._result(state, BLOW_UP, state.t, f"sup norm {top:.3e} above cap")
        return self._result(state, BOUNDED)

    def _result(self, state, verdict, when=None, reason=""):
        return RunResult(self.spec, state, verdict, when, reason, dict(self.u0_norms))


def run(spec: ProblemSpec, t_final, **kwargs) -> RunResult:
    run_keys = {"dt_max", "max_steps"}
    run_kw = {k: kwargs.pop(k) for k in list(kwargs) if k in run_keys}
    return Solver(spec, **kwargs).run(t_final, **run_kw)


# certificates ---------------------------------------------------------------

def _need_p(result: RunResult, p):
    if p < result.spec.p0:
        raise DomainError(f"p = {p} is below p0 = {result.spec.p0}")
    if float(p) not in result.trackers.p_set:
        raise InsufficientDataError(f"L^{p} was not tracked in this run")


def lp_growth_certificate(result: RunResult, p, tol=1e-10) -> BoundCertificate:
    """|u(t)|_p <= |u0|_p exp(1/4 (p-1) Bmu^2 U_p^(2k) int_0^t mu)."""
    _need_p(result, p)
    tr = result.trackers
    k = result.spec.kappa
    lhs = tr.array(f"L{_ptag(p)}")
    Bmu = tr.array("Bmu")
    Up = tr.array(f"U_{_ptag(p)}")
    mu_int = tr.array("mu_int")
    base = result.u0_norms[float(p)]
    rhs = base * np.exp(0.25 * (p - 1) * Bmu**2 * Up ** (2 * k) * mu_int)
    certs = [BoundCertificate("lp_growth", a, b, tol=tol) for a, b in zip(lhs, rhs)]
    return combine(f"lp_growth[p={p:g}]", certs)


def linfty_constant(n, kappa, p) -> float:
    if not p > n * kappa:
        raise DomainError(f"need p > n*kappa (criticality), got p={p}, n*kappa={n * kappa}")
    return (2.0 * p) ** (n / (p - n * kappa))


def linfty_bound_certificate(result: RunResult, p, tol=1e-12) -> BoundCertificate:
    """sup|u(t)| <= K max{|u0|_inf ; Bmu^(n/(p-nk)) U_p^(p/(p-nk))}, K = (2p)^(n/(p-nk))."""
    n, k = result.spec.n, result.spec.kappa
    K = linfty_constant(n, k, p)
    _need_p(result, p)
    tr = result.trackers
    e = p - n * k
    sup0 = result.u0_norms[math.inf]
    Bmu = tr.array("Bmu")
    Up = tr.array(f"U_{_ptag(p)}")
    rhs = K * np.maximum(sup0, Bmu ** (n / e) * Up ** (p / e))
    certs = [BoundCertificate("linfty", a, b, constant=K, tol=tol)
             for a, b in zip(tr.array("sup"), rhs)]
    return combine(f"linfty_bound[p={p:g}]", certs, K=K)


def mass_certificate(result: RunResult, tol=1e-10) -> BoundCertificate:
    """|u(t)|_1 <= |u0|_1 (1 + tol) at every sample."""
    tr = result.trackers
    if 1.0 not in tr.p_set:
        raise InsufficientDataError("L^1 was not tracked")
    certs = [BoundCertificate("l1", a, result.u0_norms[1.0], tol=tol) for a in tr.array("L1")]
    return combine("l1_nonincrease", certs)


def identity_residuals(result: RunResult, q):
    """Relative residual of d/dt|u|_q^q + D_q - R_q at interior samples."""
    tr = result.trackers
    tag = _ptag(float(q))
    if f"E_{tag}" not in tr.data:
        raise InsufficientDataError(f"q = {q} was not audited during the run")
    t = np.asarray(tr.times)
    if len(t) < 3:
        raise InsufficientDataError("need at least three samples")
    E = tr.array(f"E_{tag}")
    D = tr.array(f"D_{tag}")
    R = tr.array(f"R_{tag}")
    # second-order centered difference on a nonuniform grid
    h0 = t[1:-1] - t[:-2]
    h1 = t[2:] - t[1:-1]
    dE = (h0**2 * E[2:] - h1**2 * E[:-2] + (h1**2 - h0**2) * E[1:-1]) / (h0 * h1 * (h0 + h1))
    Dm, Rm = D[1:-1], R[1:-1]
    res = dE + Dm - Rm
    scale = np.maximum.reduce([np.abs(dE), np.abs(Dm), np.abs(Rm)])
    scale = np.where(scale > 0, scale, 1.0)
    return t[1:-1], res / scale


def energy_identity_audit(result: RunResult, q, tol=1e-3) -> BoundCertificate:
    if q < result.spec.p0 + 1:
        raise DomainError(f"q must be >= p0 + 1, got {q}")
    _, rel = identity_residuals(result, q)
    worst = float(np.abs(rel).max())
    return BoundCertificate(f"energy_identity[q={q:g}]", worst, tol,
                            details={"max_rel_residual": worst})


# global-existence verdicts ------------------------------------------------------

@dataclass
class VerdictRecord:
    verdict: str
    lhs: float | None = None
    rhs: float | None = None
    reason: str = ""


def existence_condition(n, kappa, l1, sup, bmu):
    """Sufficient condition for global existence: (verdict, lhs, rhs)."""
    crit = n * kappa
    if math.isclose(crit, 1.0, rel_tol=1e-12, abs_tol=1e-15):
        if bmu is None:
            return "unknown", None, None
        rhs = math.inf if bmu == 0 else bmu ** (-n)
        return ("global-by-(ii)" if l1 <= rhs else "unknown"), l1, rhs
    if crit < 1:
        return "global-by-(i)", None, None
    if bmu is None:
        return "unknown", None, None
    lhs = l1 * sup ** (crit - 1)
    rhs = math.inf if bmu == 0 else (crit * bmu) ** (-n)
    return ("global-by-(iii)" if lhs <= rhs else "unknown"), lhs, rhs


def global_existence_verdict(spec: ProblemSpec) -> VerdictRecord:
    if spec.source is not None:
        return VerdictRecord("unknown", reason="reaction source makes the problem non-conservative")
    u0 = spec.u0.scalar
    vol = spec.grid.cell_volume
    l1 = float(np.abs(u0).sum() * vol)
    sup = float(np.abs(u0).max())
    verdict, lhs, rhs = existence_condition(spec.n, spec.kappa, l1, sup, spec.bmu_bound)
    reason = "" if spec.bmu_bound is not None or verdict != "unknown" else "no declared bound for Bmu"
    return VerdictRecord(verdict, lhs, rhs, reason)


# presets --------------------------------------------------------------------

def gaussian(grid: GridSpec, amplitude=1.0, width=1.0, center=None) -> Field:
    center = center if center is not None else (0.0,) * grid.n

    def func(*x):
        r2 = sum((xi - c) ** 2 for xi, c in zip(x, center))
        return amplitude * np.exp(-r2 / width**2)

    return Field.from_function(grid, func)


def converging_b(grid: GridSpec, strength=1.0):
    """b(x) = -strength sin(2 pi x_j / L) per axis: pushes mass toward the origin."""
    s = 2 * np.pi / grid.L

    def b(x, t, u):
        return [-strength * np.sin(s * xj) for xj in x]

    return b


def fujita_contrast_run(kappa, amplitude, mode, horizon=50.0, n=1, N=256, L=40.0, strength=1.0,
                        max_steps=400_000, **kwargs) -> RunResult:
    """Reaction w_t = Lap w + w^(k+1) against its conservative analogue.

    The conservative problem is u_t + div(b u^(k+1)) = Lap u with a converging
    b whose divergence is negative around the origin, where the datum sits.
    """
    if amplitude < 0:
        raise DomainError("initial datum must be nonnegative")
    grid = GridSpec(n, N, L)
    u0 = gaussian(grid, amplitude)
    if mode == "reaction":
        def source(t, u):
            return np.maximum(u, 0.0) ** (kappa + 1)
        spec = ProblemSpec(grid, 0.0, u0, source=source, name=f"reaction k={kappa:g} a={amplitude:g}")
    elif mode == "conservative":
        spec = ProblemSpec(grid, kappa, u0, b=converging_b(grid, strength),
                           bmu_bound=strength * math.sqrt(n),
                           name=f"conservative k={kappa:g} a={amplitude:g}")
    else:
        raise DomainError(f"mode must be 'reaction' or 'conservative', got {mode!r}")
    return run(spec, horizon, max_steps=max_steps, **kwargs)


def growth_samples(result: RunResult, q):
    """Samples for the one-step L^q growth certificate.

    Each entry carries the discrete derivative of |u|_q^q together with
    |u|_q, |u|_{q/2}, B and mu at that time.  Needs q and q/2 tracked.
    """
    tr = result.trackers
    tag = _ptag(float(q))
    t = np.asarray(tr.times)
    E = tr.array(f"E_{tag}")
    Lq = tr.array(f"L{tag}")
    Lh = tr.array(f"L{_ptag(q / 2)}")
    B = tr.array("B")
    mu = tr.array("mu")
    dE = np.gradient(E, t)
    return [{"q": q, "t": t[i], "dLq_dt": dE[i], "Lq": Lq[i], "Lq_half": Lh[i],
             "B": B[i], "mu": mu[i]} for i in range(len(t))]
