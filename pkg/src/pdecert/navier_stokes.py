"""Pseudospectral incompressible Navier-Stokes on the periodic box.

Time stepping is integrating-factor RK4: diffusion is applied exactly through
exp(-nu |k|^2 dt), the projected nonlinearity Q = P[-u.grad u] explicitly.
Everything runs on full complex spectra of shape (n, N, ..., N).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .certificates import BoundCertificate, NormSeries, combine
from .exceptions import (
    BlowUpSuspectedError,
    DomainError,
    InsufficientDataError,
    InvalidFieldError,
    StepRejectedError,
    UnsupportedDimensionError,
)
from .grid import Field, GridSpec, hdot_norm, lp_norm
from .heat import apply_semigroup

K3 = 0.581862001307
K3_TEXT = "0.581862001307"
TSTAR_CEILING = "0.000753026"
Q_ESTIMATE_K = (8 * math.pi) ** (-0.75)
M_MAX = 4
ONSET_RTOL = 1e-9


def _project_hat(uh, grid: GridSpec):
    ks = grid.wavenumbers()
    k2 = grid.k2.copy()
    k2.flat[0] = 1.0
    div = sum(kj * uh[j] for j, kj in enumerate(ks))
    return np.stack([uh[j] - kj * div / k2 for j, kj in enumerate(ks)])


def leray_project(v: Field) -> Field:
    if v.components != v.grid.n:
        raise InvalidFieldError("projection needs an n-component field")
    return v.with_spectral(_project_hat(v.spectral, v.grid))


def divergence_residual(u: Field) -> float:
    """max_k |k . u_hat(k)| relative to max |u_hat|."""
    uh = u.spectral
    div = sum(kj * uh[j] for j, kj in enumerate(u.grid.wavenumbers()))
    scale = np.abs(uh).max()
    return float(np.abs(div).max() / scale) if scale > 0 else 0.0


def _q_hat(uh, grid: GridSpec):
    """Spectrum of P[-u.grad u], dealiased."""
    n = grid.n
    ks = grid.wavenumbers()
    axes = tuple(range(1, n + 1))
    u = np.fft.ifftn(uh, axes=axes).real
    adv = np.zeros_like(u)
    for j, kj in enumerate(ks):
        duj = np.fft.ifftn(1j * kj * uh, axes=axes).real  # d_j u_i for all i
        adv += u[j] * duj
    ah = np.fft.fftn(-adv, axes=axes) * grid.dealias_mask
    return _project_hat(ah, grid)


def nonlinear_term(state) -> Field:
    u = state.u if isinstance(state, NSState) else state
    return u.with_spectral(_q_hat(u.spectral, u.grid))


class NSHistory:
    """Norm series recorded along a run.

    W is |u|^2, Dm_L2 the L^2 norm of D^m u for m <= m_max (Du_L2 is m = 1),
    and dissipation the running value of 2 nu int_0^t |Du|^2.
    """

    def __init__(self, m_max=M_MAX):
        self.m_max = m_max
        self.series = {"W": NormSeries("W"), "dissipation": NormSeries("dissipation"),
                       "sup": NormSeries("sup")}
        for m in range(m_max + 1):
            self.series[f"D{m}_L2"] = NormSeries(f"D{m}_L2")

    def __getitem__(self, key) -> NormSeries:
        if key == "Du_L2":
            key = "D1_L2"
        return self.series[key]

    def __len__(self):
        return len(self.series["W"])

    def record(self, t, u: Field, nu):
        g = u.grid
        power = (np.abs(u.spectral) ** 2).sum(axis=0)
        scale = g.volume / g.N ** (2 * g.n)
        k2 = g.k2
        norms = []
        weighted = power
        for m in range(self.m_max + 1):
            norms.append(math.sqrt(float(weighted.sum()) * scale))
            weighted = weighted * k2
        diss_series = self.series["dissipation"]
        if len(diss_series) == 0:
            diss = 0.0
        else:
            h = t - diss_series.times[-1]
            # per-mode trapezoid with the weight (2/x) tanh(x/2), x = 2 nu |k|^2 h,
            # which is exact while a mode decays purely viscously
            x = 2 * nu * h * k2
            wgt = np.ones_like(x)
            big = x > 1e-8
            wgt[big] = 2.0 / x[big] * np.tanh(0.5 * x[big])
            inc = nu * h * float((k2 * (self._prev_power + power) * wgt).sum()) * scale
            diss = diss_series.last() + inc
        self._prev_power = power
        self.series["W"].append(t, norms[0] ** 2)
        self.series["dissipation"].append(t, diss)
        self.series["sup"].append(t, lp_norm(u, math.inf))
        for m, val in enumerate(norms):
            self.series[f"D{m}_L2"].append(t, val)

    def to_rows(self):
        for name in sorted(self.series):
            s = self.series[name]
            for t, v in zip(s.times, s.values):
                yield float(t), name, float(v)


@dataclass
class NSState:
    u: Field
    nu: float
    t: float = 0.0
    cfl: float = 1.0
    history: NSHistory = None
    snapshots: list = field(default_factory=list)
    steps: int = 0

    def __post_init__(self):
        if self.u.grid.n not in (2, 3):
            raise UnsupportedDimensionError("Navier-Stokes runs need n = 2 or 3")
        if self.u.components != self.u.grid.n:
            raise InvalidFieldError("velocity must have n components")
        if not self.nu > 0:
            raise DomainError(f"viscosity must be positive, got {self.nu}")
        if self.history is None:
            self.history = NSHistory()
            self.history.record(self.t, self.u, self.nu)

    @classmethod
    def initial(cls, u0: Field, nu, cfl=1.0, m_max=M_MAX, project=True):
        u = leray_project(u0) if project else u0
        return cls(u=u, nu=nu, cfl=cfl, history=_fresh(u, nu, m_max))


def _fresh(u, nu, m_max):
    h = NSHistory(m_max)
    h.record(0.0, u, nu)
    return h


@dataclass(frozen=True)
class LerayCheckpoint:
    t0: float
    u_at_t0: Field

    def __post_init__(self):
        if divergence_residual(self.u_at_t0) > 1e-10:
            raise InvalidFieldError("checkpoint snapshot is not divergence-free")


def max_stable_dt(state: NSState) -> float:
    umax = lp_norm(state.u, math.inf)
    if umax == 0:
        return math.inf
    return state.cfl * state.u.grid.dx / umax


def step(state: NSState, dt) -> NSState:
    """One IF-RK4 step.  History is shared with (and extended from) ``state``."""
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    limit = max_stable_dt(state)
    if dt > limit * (1 + 1e-12):
        raise StepRejectedError(f"dt={dt:.3e} exceeds CFL limit {limit:.3e}", suggested_dt=limit)
    g = state.u.grid
    Eh = np.exp(-0.5 * state.nu * dt * g.k2)
    E = Eh * Eh
    uh = state.u.spectral
    k1 = _q_hat(uh, g)
    k2 = _q_hat(Eh * (uh + 0.5 * dt * k1), g)
    k3 = _q_hat(Eh * uh + 0.5 * dt * k2, g)
    k4 = _q_hat(E * uh + dt * Eh * k3, g)
    new = E * uh + (dt / 6.0) * (E * k1 + 2.0 * Eh * (k2 + k3) + k4)
    if not np.all(np.isfinite(new)):
        raise BlowUpSuspectedError(f"non-finite spectrum at t={state.t + dt:.6g}")
    new = _project_hat(new, g)
    u = Field(g, spectral=new)
    t = state.t + dt
    try:
        with np.errstate(over="ignore"):
            state.history.record(t, u, state.nu)
    except ValueError as exc:
        raise BlowUpSuspectedError(f"norms overflow at t={t:.6g}") from exc
    return NSState(u=u, nu=state.nu, t=t, cfl=state.cfl, history=state.history,
                   snapshots=state.snapshots, steps=state.steps + 1)


def integrate(state: NSState, t_final, dt, snapshot_every=None) -> NSState:
    """Advance to ``t_final`` in equal steps of (at most) ``dt``.

    With ``snapshot_every = k`` every k-th state is kept in ``state.snapshots``.
    """
    span = t_final - state.t
    if span < 0:
        raise DomainError("t_final lies before the current time")
    nsteps = int(math.ceil(span / dt - 1e-9))
    if nsteps == 0:
        return state
    h = span / nsteps
    if snapshot_every and not state.snapshots:
        state.snapshots.append((state.t, state.u))
    for i in range(nsteps):
        state = step(state, h)
        if snapshot_every and (i + 1) % snapshot_every == 0:
            state.snapshots.append((state.t, state.u))
    return state


def energy_residuals(state: NSState):
    """(times, relative residual of |u|^2 + 2nu int|Du|^2 - |u0|^2)."""
    h = state.history
    if len(h) == 0:
        raise InsufficientDataError("empty history")
    W = h["W"].values
    D = h["dissipation"].values
    W0 = W[0]
    res = W + D - W0
    if W0 == 0:
        return h["W"].times, np.abs(res)
    return h["W"].times, res / W0


def energy_certificate(state: NSState, tol=1e-6) -> BoundCertificate:
    h = state.history
    if len(h) == 0:
        raise InsufficientDataError("empty history")
    W = h["W"].values
    lhs = W + h["dissipation"].values
    rhs = W[0]
    certs = [BoundCertificate("energy", a, rhs, tol=tol) for a in lhs]
    out = combine("energy_inequality", certs)
    _, rel = energy_residuals(state)
    out.details["max_rel_residual"] = float(np.abs(rel).max())
    return out


def q_estimate_certificate(state: NSState, t, tol=5e-2) -> BoundCertificate:
    """|e^{nu Lap (t-s)} Q(s)| <= (8 pi)^(-3/4) (nu (t-s))^(-3/4) |u(s)| |Du(s)|, s = state.t."""
    if state.u.grid.n != 3:
        raise UnsupportedDimensionError("the constant (8 pi)^(-3/4) is three-dimensional")
    lag = t - state.t
    if not lag > 0:
        raise DomainError("t must be later than the state time")
    q = nonlinear_term(state)
    lhs = lp_norm(apply_semigroup(q, state.nu, lag), 2)
    du = hdot_norm(state.u, 1)
    rhs = Q_ESTIMATE_K * (state.nu * lag) ** (-0.75) * lp_norm(state.u, 2) * du
    return BoundCertificate("q_estimate", lhs, rhs, constant=Q_ESTIMATE_K, tol=tol,
                            details={"lag": lag})


def decay_monitor(state: NSState, checkpoint: LerayCheckpoint, m: int):
    """Weighted series t^(m/2)|D^m u| and t^((n-2)/4+m/2)|D^m(u - heat flow of u(t0))|.

    Uses the snapshots stored on ``state`` at times after ``checkpoint.t0``.
    """
    if m > state.history.m_max:
        raise DomainError(f"m = {m} exceeds m_max = {state.history.m_max}")
    if state.t <= checkpoint.t0:
        raise DomainError("checkpoint must precede the current time")
    n = state.u.grid.n
    a = NormSeries(f"t^{m / 2}*D{m}_L2")
    b = NormSeries(f"t^{(n - 2) / 4 + m / 2}*D{m}_err")
    for t, u in state.snapshots:
        if t <= checkpoint.t0:
            continue
        heat = apply_semigroup(checkpoint.u_at_t0, state.nu, t - checkpoint.t0)
        a.append(t, t ** (m / 2) * hdot_norm(u, m))
        b.append(t, t ** ((n - 2) / 4 + m / 2) * hdot_norm(u - heat, m))
    if len(a) == 0:
        raise InsufficientDataError("no snapshots after the checkpoint")
    return a, b


def gradient_monotonicity_onset(state: NSState, rtol=ONSET_RTOL):
    """Earliest recorded time after which |Du| never increases, else None."""
    s = state.history["Du_L2"]
    v = s.values
    t = s.times
    if len(v) < 2:
        return None
    scale = v.max()
    if v[-1] > v[-2] + rtol * max(v[-2], 1e-300):
        return None
    i = len(v) - 1
    while i > 0 and v[i] <= v[i - 1] + rtol * max(v[i - 1], 1e-300 * scale):
        i -= 1
    return float(t[i])


def tstar_bound(nu, u0_l2) -> float:
    """1/2 K3^12 nu^-5 |u0|^4."""
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")
    if u0_l2 < 0:
        raise DomainError("norm must be nonnegative")
    return 0.5 * K3**12 * nu**-5 * u0_l2**4


def tstar_bound_exact(nu, u0_l2) -> Fraction:
    """Same quantity in rational arithmetic, from the exact binary inputs."""
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")
    return Fraction(K3_TEXT) ** 12 / 2 * Fraction(nu) ** -5 * Fraction(u0_l2) ** 4


def tstar_below_ceiling(nu, u0_l2) -> bool:
    """Exact check of tstar_bound < 0.000753026 nu^-5 |u0|^4 (u0 != 0)."""
    lhs = tstar_bound_exact(nu, u0_l2)
    rhs = Fraction(TSTAR_CEILING) * Fraction(nu) ** -5 * Fraction(u0_l2) ** 4
    return lhs < rhs


def _grad_tensor(u: Field):
    g = u.grid
    out = np.empty((g.n, g.n) + g.shape)
    axes = tuple(range(1, g.n + 1))
    for l, kl in enumerate(g.wavenumbers()):
        k = kl.copy()
        k[k == g.k1d[g.N // 2]] = 0.0
        out[:, l] = np.fft.ifftn(1j * k * u.spectral, axes=axes).real
    return out  # out[i, l] = D_l u_i


def trilinear_certificate(u: Field, tol=1e-3) -> BoundCertificate:
    """int sum |D_l u_i||D_l u_j||D_j u_i| <= K3^3 |Du|^(3/2) |D^2 u|^(3/2)."""
    if u.grid.n != 3:
        raise UnsupportedDimensionError("K3 is a three-dimensional constant")
    if u.components != 3:
        raise InvalidFieldError("trilinear form needs a 3-component field")
    G = np.abs(_grad_tensor(u))
    integrand = np.einsum("il...,jl...,ij...->...", G, G, G)
    lhs = float(integrand.sum() * u.grid.cell_volume)
    rhs = K3**3 * hdot_norm(u, 1) ** 1.5 * hdot_norm(u, 2) ** 1.5
    return BoundCertificate("trilinear", lhs, rhs, constant=K3**3, tol=tol)


# initial data ------------------------------------------------------------

def taylor_green(grid: GridSpec, amplitude=1.0) -> Field:
    if grid.n != 2:
        raise UnsupportedDimensionError("the Taylor-Green preset is two-dimensional")
    s = 2 * np.pi / grid.L
    return Field.from_function(grid, lambda x, y: (
        amplitude * np.sin(s * x) * np.cos(s * y),
        -amplitude * np.cos(s * x) * np.sin(s * y)))


def random_divfree(grid: GridSpec, seed, l2=1.0, k_peak=3.0) -> Field:
    """Seeded smooth solenoidal field with |u|_2 = l2, dealiased spectrum."""
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((grid.n,) + grid.shape)
    kk = np.sqrt(grid.k2) * grid.L / (2 * np.pi)
    env = kk**2 * np.exp(-((kk / k_peak) ** 2))
    uh = np.fft.fftn(noise, axes=tuple(range(1, grid.n + 1))) * env * grid.dealias_mask
    uh = _project_hat(uh, grid)
    u = Field(grid, values=np.fft.ifftn(uh, axes=tuple(range(1, grid.n + 1))).real)
    norm = lp_norm(u, 2)
    if norm == 0:
        return u
    return u * (l2 / norm)
