"""Periodic box grids, fields with lazy spectral views, and norms.

Samples live at x_j = -L/2 + i*L/N, i = 0..N-1 along every axis.  Transforms
are unnormalized numpy FFTs over the spatial axes, so for a box of volume V
Parseval reads  int |u|^2 dx = V/N^(2n) * sum_k |u_hat(k)|^2.
"""
from __future__ import annotations

import itertools
import math
import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .certificates import INDETERMINATE, BoundCertificate
from .exceptions import DomainError, InvalidFieldError, UnsupportedOrderError

MAX_DERIVATIVE_ORDER = 4
HEADER = struct.Struct("<iidi12x")  # n, N, L, components; padded to 32 bytes


@dataclass(frozen=True)
class GridSpec:
    n: int
    N: int
    L: float

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2 or 3, got {self.n}")
        if self.N < 8 or self.N & (self.N - 1):
            raise DomainError(f"N must be a power of two >= 8, got {self.N}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise DomainError(f"box length must be positive, got {self.L}")

    @property
    def shape(self):
        return (self.N,) * self.n

    @property
    def dx(self):
        return self.L / self.N

    @property
    def cell_volume(self):
        return self.dx**self.n

    @property
    def volume(self):
        return self.L**self.n

    @cached_property
    def axis(self) -> np.ndarray:
        return -0.5 * self.L + self.dx * np.arange(self.N)

    def coords(self):
        """Tuple of n coordinate arrays with the full grid shape."""
        return np.meshgrid(*([self.axis] * self.n), indexing="ij")

    @cached_property
    def k1d(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.N, d=self.dx)

    def wavenumbers(self):
        """k_j as broadcastable arrays (shape 1..N..1)."""
        out = []
        for j in range(self.n):
            shp = [1] * self.n
            shp[j] = self.N
            out.append(self.k1d.reshape(shp))
        return out

    @cached_property
    def k2(self) -> np.ndarray:
        total = np.zeros(self.shape)
        for kj in self.wavenumbers():
            total = total + kj**2
        return total

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3 rule: keep modes with |m_j| < N/3 on every axis."""
        m = np.abs(np.fft.fftfreq(self.N, d=1.0 / self.N))
        keep1 = m < self.N / 3.0
        mask = np.ones(self.shape, dtype=bool)
        for j in range(self.n):
            shp = [1] * self.n
            shp[j] = self.N
            mask = mask & keep1.reshape(shp)
        return mask


class Field:
    """Real scalar or n-vector samples on a grid with a paired spectrum.

    Values are stored with a leading component axis, shape (c, N, ..., N).
    Either view is computed on first access; both are read-only.
    """

    __slots__ = ("grid", "_values", "_spectral")

    def __init__(self, grid: GridSpec, values=None, spectral=None):
        if (values is None) == (spectral is None):
            raise InvalidFieldError("give exactly one of values / spectral")
        self.grid = grid
        self._values = None
        self._spectral = None
        if values is not None:
            arr = np.array(values, dtype=float)
            if arr.shape == grid.shape:
                arr = arr[None]
            self._check_shape(arr.shape)
            if not np.all(np.isfinite(arr)):
                raise InvalidFieldError("field has non-finite samples")
            arr.flags.writeable = False
            self._values = arr
        else:
            arr = np.array(spectral, dtype=complex)
            if arr.shape == grid.shape:
                arr = arr[None]
            self._check_shape(arr.shape)
            if not np.all(np.isfinite(arr)):
                raise InvalidFieldError("field has non-finite coefficients")
            arr.flags.writeable = False
            self._spectral = arr

    def _check_shape(self, shape):
        if len(shape) != self.grid.n + 1 or tuple(shape[1:]) != self.grid.shape:
            raise InvalidFieldError(f"shape {shape} does not match grid {self.grid.shape}")
        if shape[0] not in (1, self.grid.n):
            raise InvalidFieldError(f"{shape[0]} components; expected 1 or {self.grid.n}")

    @classmethod
    def from_function(cls, grid: GridSpec, func):
        """Sample ``func(*coords)``; a tuple/list return makes a vector field."""
        out = func(*grid.coords())
        if isinstance(out, (tuple, list)):
            out = np.stack([np.broadcast_to(np.asarray(c, float), grid.shape) for c in out])
        else:
            out = np.broadcast_to(np.asarray(out, float), grid.shape)[None]
        return cls(grid, values=out)

    @classmethod
    def zeros(cls, grid: GridSpec, components=1):
        return cls(grid, values=np.zeros((components,) + grid.shape))

    @property
    def axes(self):
        return tuple(range(1, self.grid.n + 1))

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            v = np.fft.ifftn(self._spectral, axes=self.axes).real
            v.flags.writeable = False
            self._values = v
        return self._values

    @property
    def spectral(self) -> np.ndarray:
        if self._spectral is None:
            s = np.fft.fftn(self._values, axes=self.axes)
            s.flags.writeable = False
            self._spectral = s
        return self._spectral

    @property
    def components(self) -> int:
        return (self._values if self._values is not None else self._spectral).shape[0]

    @property
    def is_vector(self) -> bool:
        return self.components > 1

    @property
    def scalar(self) -> np.ndarray:
        """Samples of a one-component field without the component axis."""
        return self.values[0]

    def with_values(self, values) -> "Field":
        return Field(self.grid, values=values)

    def with_spectral(self, spectral) -> "Field":
        return Field(self.grid, spectral=spectral)

    def __add__(self, other):
        return Field(self.grid, values=self.values + other.values)

    def __sub__(self, other):
        return Field(self.grid, values=self.values - other.values)

    def __mul__(self, c):
        return Field(self.grid, values=self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __repr__(self):
        return f"Field(n={self.grid.n}, N={self.grid.N}, L={self.grid.L}, components={self.components})"

    # binary format: 32-byte header then little-endian float64 samples
    def to_bytes(self) -> bytes:
        g = self.grid
        head = HEADER.pack(g.n, g.N, g.L, self.components)
        return head + np.ascontiguousarray(self.values, dtype="<f8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Field":
        if len(data) < HEADER.size:
            raise InvalidFieldError("truncated field header")
        n, N, L, c = HEADER.unpack_from(data)
        grid = GridSpec(n, N, L)
        count = c * N**n
        body = data[HEADER.size:]
        if len(body) != 8 * count:
            raise InvalidFieldError(f"expected {8 * count} data bytes, got {len(body)}")
        arr = np.frombuffer(body, dtype="<f8").reshape((c,) + grid.shape)
        return cls(grid, values=arr.astype(float))


def transform_roundtrip(field: Field) -> Field:
    forward = np.fft.fftn(field.values, axes=field.axes)
    return Field(field.grid, values=np.fft.ifftn(forward, axes=field.axes).real)


def _integrate(field: Field, arr):
    return float(arr.sum() * field.grid.cell_volume)


def lp_norm(field: Field, p) -> float:
    """L^p norm, aggregated over components as (sum_i int |u_i|^p)^(1/p).

    For p = inf the Euclidean pointwise magnitude is maximized.
    """
    p = float(p)
    if math.isnan(p) or p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    v = field.values
    if math.isinf(p):
        return float(np.sqrt((v**2).sum(axis=0)).max())
    if p == 2.0:
        return math.sqrt(_integrate(field, v * v))
    if p == 1.0:
        return _integrate(field, np.abs(v))
    a = np.abs(v)
    top = a.max()
    if top == 0:
        return 0.0
    # scale first so large p does not overflow
    return float(top * _integrate(field, (a / top) ** p) ** (1.0 / p))


def hdot_norm(field: Field, s) -> float:
    """Homogeneous Sobolev norm from the discrete symbol |k|^s."""
    s = float(s)
    if math.isnan(s) or s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    g = field.grid
    power = (np.abs(field.spectral) ** 2).sum(axis=0)
    if s > 0:
        weight = g.k2**s
        power = power * weight
    return math.sqrt(float(power.sum()) * g.volume / g.N ** (2 * g.n))


def _symbol(grid: GridSpec, alpha):
    sym = np.ones(grid.shape, dtype=complex)
    for j, (a, kj) in enumerate(zip(alpha, grid.wavenumbers())):
        if a == 0:
            continue
        k = kj
        if a % 2 == 1:
            # odd derivatives drop the unpaired Nyquist mode to keep real fields real
            k = kj.copy()
            k[k == grid.k1d[grid.N // 2]] = 0.0
        sym = sym * (1j * k) ** a
    return sym


def spectral_derivative(field: Field, alpha, max_order=MAX_DERIVATIVE_ORDER) -> Field:
    """D^alpha of every component."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != field.grid.n or any(a < 0 for a in alpha):
        raise DomainError(f"multi-index {alpha} does not fit dimension {field.grid.n}")
    if sum(alpha) > max_order:
        raise UnsupportedOrderError(f"|alpha| = {sum(alpha)} exceeds maximum {max_order}")
    if sum(alpha) == 0:
        return field
    return field.with_spectral(field.spectral * _symbol(field.grid, alpha))


def gradient(field: Field) -> Field:
    """Gradient of a scalar field as an n-component field."""
    if field.components != 1:
        raise InvalidFieldError("gradient expects a scalar field")
    g = field.grid
    comps = []
    for j in range(g.n):
        alpha = [0] * g.n
        alpha[j] = 1
        comps.append(spectral_derivative(field, alpha).scalar)
    return Field(g, values=np.stack(comps))


def dm_norm(field: Field, m: int, p=2.0) -> float:
    """(sum_i sum_{j1..jm} int |D_j1..D_jm u_i|^p)^(1/p) over ordered tuples."""
    if m == 0:
        return lp_norm(field, p)
    n = field.grid.n
    if math.isinf(float(p)):
        best = 0.0
        for js in itertools.product(range(n), repeat=m):
            alpha = [js.count(j) for j in range(n)]
            best = max(best, float(np.abs(spectral_derivative(field, alpha).values).max()))
        return best
    total = 0.0
    for js in itertools.product(range(n), repeat=m):
        alpha = [js.count(j) for j in range(n)]
        total += lp_norm(spectral_derivative(field, alpha), p) ** p
    return total ** (1.0 / p)


def interpolation_check(field: Field, s1, s, s2, tol=1e-10) -> BoundCertificate:
    """|u|_{H^s} <= |u|_{H^s1}^a1 |u|_{H^s2}^a2 with a1 = (s2-s)/(s2-s1)."""
    if not (0 <= s1 < s < s2):
        raise DomainError(f"need 0 <= s1 < s < s2, got {s1}, {s}, {s2}")
    a1 = (s2 - s) / (s2 - s1)
    a2 = (s - s1) / (s2 - s1)
    lhs = hdot_norm(field, s)
    n1 = hdot_norm(field, s1)
    n2 = hdot_norm(field, s2)
    rhs = n1**a1 * n2**a2
    name = f"interpolation[{s1},{s},{s2}]"
    if rhs == 0.0 and lhs == 0.0:
        return BoundCertificate(name, 0.0, 0.0, status=INDETERMINATE)
    return BoundCertificate(name, lhs, rhs, tol=tol, details={"alpha1": a1, "alpha2": a2})


def _interp_eval(field: Field, x, alpha):
    """D^alpha of the trigonometric interpolant at the point x."""
    g = field.grid
    k = g.k1d
    out = field.spectral[0]
    for xj, a in zip(x, alpha):
        vec = np.exp(1j * k * (xj + 0.5 * g.L)) * (1j * k) ** a
        out = np.tensordot(out, vec, axes=([0], [0]))
    return float(np.real(out)) / g.N**g.n


def _interp_derivs(field: Field, x):
    """Value, gradient and Hessian of the trigonometric interpolant at x."""
    n = field.grid.n
    eye = np.eye(n, dtype=int)
    val = _interp_eval(field, x, [0] * n)
    grad = np.array([_interp_eval(field, x, eye[j]) for j in range(n)])
    hess = np.array([[_interp_eval(field, x, eye[a] + eye[b]) for b in range(n)]
                     for a in range(n)])
    return val, grad, hess


def refined_sup(field: Field, candidates=3, iterations=8) -> float:
    """sup |u| of a scalar field, polishing the largest samples by Newton steps
    on the spectral interpolant.  Never below the plain sample maximum."""
    if field.components != 1:
        raise InvalidFieldError("refined_sup expects a scalar field")
    g = field.grid
    a = np.abs(field.scalar)
    best = float(a.max())
    if best == 0.0:
        return 0.0
    flat = np.argsort(a, axis=None)[::-1][:candidates]
    for idx in flat:
        ijk = np.unravel_index(idx, g.shape)
        x = np.array([g.axis[i] for i in ijk])
        sign = 1.0 if field.scalar[ijk] > 0 else -1.0
        for _ in range(iterations):
            _, grad, hess = _interp_derivs(field, x)
            try:
                dxs = np.linalg.solve(hess, grad)
            except np.linalg.LinAlgError:
                break
            if np.max(np.abs(dxs)) > g.dx:
                break  # not in the basin of a nearby extremum
            x = x - dxs
            if np.max(np.abs(dxs)) < 1e-12 * g.L:
                break
        val, _, _ = _interp_derivs(field, x)
        best = max(best, sign * val)
    return float(best)
