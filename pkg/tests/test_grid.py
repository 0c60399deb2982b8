import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pdecert.certificates import INDETERMINATE
from pdecert.exceptions import DomainError, InvalidFieldError, UnsupportedOrderError
from pdecert.grid import (
    Field,
    GridSpec,
    dm_norm,
    gradient,
    hdot_norm,
    interpolation_check,
    lp_norm,
    refined_sup,
    spectral_derivative,
    transform_roundtrip,
)

from conftest import band_limited


class TestGridSpec:
    @pytest.mark.parametrize("n,N,L", [(0, 16, 1.0), (4, 16, 1.0), (1, 12, 1.0), (1, 4, 1.0), (2, 16, 0.0)])
    def test_rejects_bad_parameters(self, n, N, L):
        with pytest.raises(DomainError):
            GridSpec(n, N, L)

    def test_coordinates_and_wavenumbers(self):
        g = GridSpec(1, 8, 2.0)
        assert g.axis[0] == -1.0
        assert g.axis[-1] == pytest.approx(0.75)
        m = np.rint(g.k1d * g.L / (2 * np.pi)).astype(int)
        assert sorted(m) == list(range(-4, 4))

    def test_dealias_mask_keeps_two_thirds(self):
        g = GridSpec(1, 64, 1.0)
        kept = g.dealias_mask.sum()
        assert kept == 2 * 21 + 1  # |m| < 64/3


class TestField:
    def test_non_finite_rejected(self, grid1):
        v = np.zeros(grid1.shape)
        v[3] = np.nan
        with pytest.raises(InvalidFieldError):
            Field(grid1, values=v)

    def test_wrong_component_count(self, grid2):
        with pytest.raises(InvalidFieldError):
            Field(grid2, values=np.zeros((3,) + grid2.shape))

    def test_views_are_read_only(self, grid1):
        f = Field(grid1, values=np.ones(grid1.shape))
        with pytest.raises(ValueError):
            f.values[0, 0] = 2.0

    def test_bytes_round_trip(self, grid2):
        f = band_limited(grid2, 3, components=2)
        blob = f.to_bytes()
        assert len(blob) == 32 + 8 * 2 * 64 * 64
        g = Field.from_bytes(blob)
        assert g.grid == grid2
        np.testing.assert_array_equal(g.values, f.values)

    def test_truncated_bytes(self, grid2):
        blob = band_limited(grid2, 3).to_bytes()
        with pytest.raises(InvalidFieldError):
            Field.from_bytes(blob[:-8])


class TestRoundTrip:
    def test_zero(self, grid2):
        z = Field.zeros(grid2, 2)
        assert np.all(transform_roundtrip(z).values == 0)

    def test_single_mode(self):
        g = GridSpec(1, 64, 3.0)
        f = Field.from_function(g, lambda x: np.cos(2 * np.pi * x / g.L))
        np.testing.assert_allclose(transform_roundtrip(f).values, f.values, atol=1e-12)

    @given(st.integers(0, 2**31), st.sampled_from([1, 2, 3]))
    def test_random_fields(self, seed, n):
        g = GridSpec(n, 16, 5.0)
        vals = np.random.default_rng(seed).standard_normal(g.shape)
        f = Field(g, values=vals)
        err = np.abs(transform_roundtrip(f).values - f.values).max()
        assert err < 1e-12 * np.abs(vals).max()


class TestLpNorm:
    def test_constant_l2(self):
        g = GridSpec(2, 16, 3.0)
        f = Field(g, values=np.full(g.shape, -2.5))
        assert lp_norm(f, 2) == pytest.approx(2.5 * math.sqrt(g.volume), rel=1e-14)

    def test_gaussian_l1(self, grid1):
        f = Field.from_function(grid1, lambda x: np.exp(-x**2))
        assert abs(lp_norm(f, 1) - math.sqrt(math.pi)) < 1e-6

    def test_vector_sup_is_euclidean(self):
        g = GridSpec(2, 8, 1.0)
        f = Field(g, values=np.stack([np.full(g.shape, 3.0), np.full(g.shape, 4.0)]))
        assert lp_norm(f, math.inf) == pytest.approx(5.0)

    def test_vector_norm_aggregates_components(self, grid2):
        f = band_limited(grid2, 7, components=2)
        p = 3.0
        parts = [lp_norm(Field(grid2, values=f.values[i]), p) ** p for i in range(2)]
        assert lp_norm(f, p) == pytest.approx(sum(parts) ** (1 / p), rel=1e-13)

    @pytest.mark.parametrize("p", [0.5, 0.0, -1.0, float("nan")])
    def test_domain(self, grid1, p):
        with pytest.raises(DomainError):
            lp_norm(Field.zeros(grid1), p)

    def test_large_p_does_not_overflow(self, grid1):
        f = Field.from_function(grid1, lambda x: 1e200 * np.exp(-x**2))
        assert math.isfinite(lp_norm(f, 8))


class TestHdotNorm:
    @given(st.integers(0, 2**31))
    def test_parseval(self, seed):
        g = GridSpec(2, 32, 7.0)
        f = band_limited(g, seed, kmax=10)
        assert abs(lp_norm(f, 2) - hdot_norm(f, 0)) < 1e-10 * lp_norm(f, 2)

    def test_single_mode_scaling(self):
        g = GridSpec(1, 64, 5.0)
        f = Field.from_function(g, lambda x: np.sin(2 * np.pi * x / g.L))
        assert hdot_norm(f, 1) == pytest.approx(2 * np.pi / g.L * lp_norm(f, 2), rel=1e-12)

    @pytest.mark.parametrize("s", [0.25, 0.5, 1.5, 3.0])
    def test_single_mode_power_law(self, s):
        g = GridSpec(2, 32, 4.0)
        k = 3 * 2 * np.pi / g.L
        f = Field.from_function(g, lambda x, y: np.cos(3 * 2 * np.pi * y / g.L))
        assert hdot_norm(f, s) == pytest.approx(k**s * hdot_norm(f, 0), rel=1e-12)

    @pytest.mark.parametrize("m", [1, 2, 3])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_integer_order_matches_derivatives(self, n, m):
        g = GridSpec(n, 16 if n == 3 else 32, 6.0)
        f = band_limited(g, 11 + n + m, kmax=5)
        assert dm_norm(f, m) == pytest.approx(hdot_norm(f, m), rel=1e-8)

    def test_zero_mode_ignored_for_positive_s(self):
        g = GridSpec(1, 16, 1.0)
        assert hdot_norm(Field(g, values=np.full(g.shape, 4.0)), 0.5) == 0.0

    def test_negative_s(self, grid1):
        with pytest.raises(DomainError):
            hdot_norm(Field.zeros(grid1), -0.1)


class TestDerivative:
    def test_constant(self, grid2):
        f = Field(grid2, values=np.full(grid2.shape, 2.0))
        assert np.abs(spectral_derivative(f, (1, 1)).values).max() < 1e-13

    def test_sine(self):
        g = GridSpec(1, 64, 3.0)
        s = 2 * np.pi / g.L
        f = Field.from_function(g, lambda x: np.sin(s * x))
        d = spectral_derivative(f, (1,))
        np.testing.assert_allclose(d.scalar, s * np.cos(s * g.axis), atol=1e-10)

    def test_mixed_symbol(self):
        g = GridSpec(2, 32, 2 * np.pi)
        k1, k2 = 3.0, -2.0
        f = Field.from_function(g, lambda x, y: np.cos(k1 * x + k2 * y))
        d = spectral_derivative(f, (1, 1))
        np.testing.assert_allclose(d.scalar, -k1 * k2 * f.scalar, atol=1e-10)

    @given(st.integers(0, 2**31))
    def test_commutation(self, seed):
        g = GridSpec(2, 16, 3.0)
        f = band_limited(g, seed)
        a = spectral_derivative(spectral_derivative(f, (1, 0)), (0, 1))
        b = spectral_derivative(spectral_derivative(f, (0, 1)), (1, 0))
        np.testing.assert_allclose(a.values, b.values, atol=1e-12 * np.abs(a.values).max())

    def test_order_limit(self, grid2):
        with pytest.raises(UnsupportedOrderError):
            spectral_derivative(Field.zeros(grid2), (3, 2))

    def test_bad_multi_index(self, grid2):
        with pytest.raises(DomainError):
            spectral_derivative(Field.zeros(grid2), (1,))

    def test_gradient_components(self, grid2):
        f = Field.from_function(grid2, lambda x, y: np.sin(x) * np.cos(2 * y))
        gr = gradient(f)
        assert gr.components == 2
        np.testing.assert_allclose(gr.values[1], -2 * np.sin(grid2.coords()[0]) * np.sin(2 * grid2.coords()[1]),
                                   atol=1e-11)


class TestInterpolation:
    def test_single_mode_equality(self):
        g = GridSpec(2, 32, 2 * np.pi)
        f = Field.from_function(g, lambda x, y: np.sin(2 * x + 3 * y))
        c = interpolation_check(f, 0.5, 1.0, 2.5)
        assert c.passed
        assert abs(c.lhs - c.rhs) < 1e-10 * c.rhs

    def test_two_modes_strict(self):
        g = GridSpec(1, 64, 2 * np.pi)
        f = Field.from_function(g, lambda x: np.sin(x) + 0.5 * np.cos(4 * x))
        c = interpolation_check(f, 1.0, 2.0, 3.0)
        assert c.passed and c.margin > 1e-3

    def test_s1_zero_limit(self, grid2):
        f = band_limited(grid2, 5)
        c = interpolation_check(f, 0.0, 1.0, 2.0)
        assert c.passed
        assert c.rhs == pytest.approx(lp_norm(f, 2) ** 0.5 * hdot_norm(f, 2) ** 0.5)

    def test_zero_field_indeterminate(self, grid2):
        c = interpolation_check(Field.zeros(grid2), 0.0, 1.0, 2.0)
        assert c.status == INDETERMINATE

    @pytest.mark.parametrize("s1,s,s2", [(1, 1, 2), (2, 1, 3), (-1, 0.5, 1)])
    def test_ordering(self, grid2, s1, s, s2):
        with pytest.raises(DomainError):
            interpolation_check(Field.zeros(grid2), s1, s, s2)

    @given(st.integers(0, 2**31), st.floats(0.0, 1.0), st.floats(0.1, 1.0), st.floats(0.1, 1.5))
    def test_holds_on_random_fields(self, seed, s1, gap1, gap2):
        g = GridSpec(1, 64, 9.0)
        f = band_limited(g, seed, kmax=12)
        assert interpolation_check(f, s1, s1 + gap1, s1 + gap1 + gap2, tol=1e-12).passed


def test_refined_sup_finds_off_grid_peak():
    g = GridSpec(2, 64, 16.0)
    f = Field.from_function(g, lambda x, y: -3.0 * np.exp(-((x - 0.11) ** 2 + (y + 0.07) ** 2)))
    assert refined_sup(f) == pytest.approx(3.0, rel=1e-8)
    assert refined_sup(f) >= np.abs(f.scalar).max()
