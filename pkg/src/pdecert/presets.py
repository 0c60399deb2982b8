"""Named initial data and coefficient sets used by the CLI and the tests."""
from __future__ import annotations

import math

import numpy as np

from .advdiff import ProblemSpec, gaussian
from .exceptions import ConfigError
from .grid import Field, GridSpec
from . import navier_stokes as ns

NS_PRESETS = ("taylor-green", "random-2d", "random-3d-small", "stokes", "zero")
B_PRESETS = ("none", "sine", "converging", "swirl", "sine-u", "sine-t")
A_PRESETS = ("identity", "varying", "aniso", "pulsing")
F_PRESETS = ("none", "burgers")
U0_PRESETS = ("gaussian", "bumps", "zero")


def ns_initial(preset, grid: GridSpec, seed=0, l2=1.0, amplitude=1.0) -> Field:
    if preset == "taylor-green":
        return ns.taylor_green(grid, amplitude)
    if preset in ("random-2d", "random-3d-small"):
        return ns.random_divfree(grid, seed, l2=l2)
    if preset == "stokes":
        s = 2 * np.pi / grid.L
        if grid.n == 2:
            return Field.from_function(grid, lambda x, y: (amplitude * np.sin(s * y), 0 * x))
        return Field.from_function(grid, lambda x, y, z: (amplitude * np.sin(s * y), 0 * x, 0 * x))
    if preset == "zero":
        return Field.zeros(grid, grid.n)
    raise ConfigError(f"unknown Navier-Stokes preset {preset!r}; choose from {NS_PRESETS}")


def ns_grid(preset, N, L=2 * math.pi) -> GridSpec:
    n = 3 if preset.endswith("3d-small") else 2
    return GridSpec(n, N, L)


def x_only(func):
    """Wrap func(x) as a coefficient (x, t, u) -> value, cached per coordinate tuple.

    The solver passes the same coordinate arrays on every call, so the cache
    is keyed on their identity (a reference is kept to rule out id reuse).
    """
    cache = []

    def coeff(x, t, u):
        for key, val in cache:
            if key is x[0]:
                return val
        val = np.asarray(func(x), dtype=float)
        cache.append((x[0], val))
        return val

    return coeff


def make_b(name, grid: GridSpec, strength):
    """Return (b, bound on B) for a named advection field."""
    s = 2 * np.pi / grid.L
    n = grid.n
    if name == "none":
        return None, 0.0
    if name == "sine":
        phases = [0.3 * j for j in range(n)]
        return (x_only(lambda x: [strength * np.sin(s * xj + ph) for xj, ph in zip(x, phases)]),
                strength * math.sqrt(n))
    if name == "converging":
        return x_only(lambda x: [-strength * np.sin(s * xj) for xj in x]), strength * math.sqrt(n)
    if name == "swirl":
        if n != 2:
            raise ConfigError("the swirl advection field is two-dimensional")
        return (x_only(lambda x: [strength * np.sin(s * x[1]), strength * np.cos(s * x[0])]),
                strength * math.sqrt(2))
    if name == "sine-u":
        # values range over strength * [-1.5, 1.5] per component
        return (lambda x, t, u: [strength * np.sin(s * xj) * (1 + 0.5 * np.tanh(u)) for xj in x],
                1.5 * strength * math.sqrt(n))
    if name == "sine-t":
        return (lambda x, t, u: [strength * (1 + 0.5 * np.cos(t)) * np.cos(s * xj) for xj in x],
                1.5 * strength * math.sqrt(n))
    raise ConfigError(f"unknown advection preset {name!r}; choose from {B_PRESETS}")


def make_A(name, grid: GridSpec, amp):
    """Return (A or None, mu) for a named diffusion matrix.  mu may be callable."""
    n = grid.n
    s = 2 * np.pi / grid.L
    if name == "identity":
        return None, 1.0
    if name == "varying":
        def A(x):
            a = 1.0 + amp * np.sin(s * x[0]) ** 2
            z = np.zeros_like(a)
            return [[a if j == l else z for l in range(n)] for j in range(n)]
        return x_only(A), 1.0
    if name == "aniso":
        if n != 2:
            raise ConfigError("the aniso diffusion preset is two-dimensional")
        M = np.array([[1.0 + amp, 0.5 * amp], [0.5 * amp, 1.0]])
        mu = float(np.linalg.eigvalsh(M).min())
        return (lambda x, t, u: M), mu
    if name == "pulsing":
        if not 0 <= amp < 1:
            raise ConfigError("pulsing amplitude must lie in [0, 1)")
        def A(x, t, u):
            a = 1.0 + amp * math.sin(t)
            return [[a if j == l else 0.0 for l in range(n)] for j in range(n)]
        return A, (lambda t: 1.0 + amp * math.sin(t))
    raise ConfigError(f"unknown diffusion preset {name!r}; choose from {A_PRESETS}")


def make_f(name, grid: GridSpec, strength):
    if name == "none":
        return None
    if name == "burgers":
        return lambda t, u: [0.5 * strength * u * u for _ in range(grid.n)]
    raise ConfigError(f"unknown flux preset {name!r}; choose from {F_PRESETS}")


def make_u0(name, grid: GridSpec, amplitude=1.0, width=1.0, seed=0) -> Field:
    if name == "gaussian":
        return gaussian(grid, amplitude, width)
    if name == "bumps":
        rng = np.random.default_rng(seed)
        vals = np.zeros(grid.shape)
        x = grid.coords()
        for _ in range(3):
            c = rng.uniform(-0.1 * grid.L, 0.1 * grid.L, grid.n)
            w = width * rng.uniform(0.6, 1.4)
            vals += amplitude * rng.uniform(0.3, 1.0) * np.exp(
                -sum((xi - ci) ** 2 for xi, ci in zip(x, c)) / w**2)
        return Field(grid, values=vals)
    if name == "zero":
        return Field.zeros(grid)
    raise ConfigError(f"unknown initial-datum preset {name!r}; choose from {U0_PRESETS}")


def mu_floor(mu, horizon, samples=2001):
    if not callable(mu):
        return float(mu)
    return min(mu(t) for t in np.linspace(0.0, horizon, samples))


def problem(n, N, L, kappa, b="none", b_strength=1.0, A="identity", A_amp=0.5, f="none",
            f_strength=1.0, u0="gaussian", amplitude=1.0, width=1.0, seed=0, p0=1, horizon=1.0,
            name="") -> ProblemSpec:
    grid = GridSpec(n, N, L)
    bf, Bmax = make_b(b, grid, b_strength)
    Af, mu = make_A(A, grid, A_amp)
    spec = ProblemSpec(grid, kappa, make_u0(u0, grid, amplitude, width, seed), b=bf,
                       f=make_f(f, grid, f_strength), A=Af, mu=mu, p0=p0,
                       bmu_bound=Bmax / mu_floor(mu, horizon), name=name)
    return spec


# five heterogeneous scenarios: 1D on 256 cells, 2D on 128^2, kappa in {0, 0.3}
HETEROGENEOUS = (
    dict(name="het-1d-burgers", n=1, N=256, L=20.0, kappa=0.0, b="sine", b_strength=2.0,
         A="varying", A_amp=0.5, f="burgers", f_strength=1.0, u0="bumps", amplitude=2.0, seed=11),
    dict(name="het-1d-udep", n=1, N=256, L=20.0, kappa=0.3, b="sine-u", b_strength=2.0,
         A="identity", u0="bumps", amplitude=3.0, seed=12),
    dict(name="het-1d-pulsing", n=1, N=256, L=20.0, kappa=0.3, b="sine-t", b_strength=1.5,
         A="pulsing", A_amp=0.5, u0="bumps", amplitude=2.0, seed=13),
    dict(name="het-2d-swirl", n=2, N=128, L=20.0, kappa=0.0, b="swirl", b_strength=2.0,
         A="aniso", A_amp=0.5, u0="bumps", amplitude=2.0, seed=14),
    dict(name="het-2d-converging", n=2, N=128, L=20.0, kappa=0.3, b="converging", b_strength=1.5,
         A="varying", A_amp=0.5, u0="bumps", amplitude=2.0, seed=15),
)
HETEROGENEOUS_HORIZON = 4.0


def heterogeneous_scenarios(horizon=HETEROGENEOUS_HORIZON):
    return [problem(horizon=horizon, **cfg) for cfg in HETEROGENEOUS]
