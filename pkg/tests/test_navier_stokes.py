import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pdecert.exceptions import (
    BlowUpSuspectedError,
    DomainError,
    InsufficientDataError,
    InvalidFieldError,
    StepRejectedError,
    UnsupportedDimensionError,
)
from pdecert.grid import Field, GridSpec, gradient, hdot_norm, lp_norm
from pdecert.navier_stokes import (
    K3,
    Q_ESTIMATE_K,
    LerayCheckpoint,
    NSHistory,
    NSState,
    decay_monitor,
    divergence_residual,
    energy_certificate,
    energy_residuals,
    gradient_monotonicity_onset,
    integrate,
    leray_project,
    nonlinear_term,
    q_estimate_certificate,
    random_divfree,
    step,
    taylor_green,
    trilinear_certificate,
    tstar_below_ceiling,
    tstar_bound,
    tstar_bound_exact,
)

G2 = GridSpec(2, 32, 2 * np.pi)
G3 = GridSpec(3, 16, 2 * np.pi)


def shear(grid, amp=1.0, k=1):
    # u = (0, amp sin(k x1)) in 2D, a steady Euler flow decaying by pure diffusion
    def f(*x):
        comps = [np.zeros_like(x[0]) for _ in x]
        comps[1] = amp * np.sin(k * x[0])
        return tuple(comps)
    return Field.from_function(grid, f)


class TestProjection:
    def test_gradient_removed(self):
        phi = Field.from_function(G2, lambda x, y: np.sin(x) * np.cos(3 * y) + np.cos(2 * x))
        assert np.abs(leray_project(gradient(phi)).values).max() < 1e-12

    def test_divfree_unchanged(self):
        u = taylor_green(G2)
        np.testing.assert_allclose(leray_project(u).values, u.values, atol=1e-13)

    @given(st.integers(0, 2**31))
    def test_idempotent_and_solenoidal(self, seed):
        v = Field(G2, values=np.random.default_rng(seed).standard_normal((2,) + G2.shape))
        p = leray_project(v)
        assert divergence_residual(p) < 1e-10
        np.testing.assert_allclose(leray_project(p).values, p.values, atol=1e-12)
        assert lp_norm(p, 2) <= lp_norm(v, 2) * (1 + 1e-12)


class TestNonlinearTerm:
    def test_zero(self):
        assert np.all(nonlinear_term(Field.zeros(G2, 2)).values == 0)

    def test_taylor_green_is_a_gradient(self):
        assert np.abs(nonlinear_term(taylor_green(G2)).values).max() < 1e-12

    def test_shear_flow_is_steady(self):
        assert np.abs(nonlinear_term(shear(G2)).values).max() < 1e-13

    def test_quadratic(self):
        u = random_divfree(G2, 3)
        np.testing.assert_allclose(nonlinear_term(u * 2.0).values, 4 * nonlinear_term(u).values, atol=1e-12)

    @pytest.mark.parametrize("grid", [G2, G3], ids=["2d", "3d"])
    def test_orthogonal_to_velocity(self, grid):
        u = random_divfree(grid, 8)
        q = nonlinear_term(u)
        inner = float((q.values * u.values).sum() * grid.cell_volume)
        assert abs(inner) < 1e-12 * lp_norm(u, 2) * lp_norm(q, 2) + 1e-14


class TestStepping:
    def test_rejects_1d(self):
        with pytest.raises(UnsupportedDimensionError):
            NSState.initial(Field.zeros(GridSpec(1, 16, 1.0)), 1.0)

    def test_rejects_bad_viscosity(self):
        with pytest.raises(DomainError):
            NSState.initial(Field.zeros(G2, 2), 0.0)

    def test_zero_stays_zero(self):
        s = integrate(NSState.initial(Field.zeros(G2, 2), 1.0), 0.5, 0.1)
        assert np.all(s.u.values == 0) and s.steps == 5

    def test_diffusive_mode_exact(self):
        nu, t = 0.3, 1.0
        s = integrate(NSState.initial(shear(G2, k=2), nu), t, 0.05)
        np.testing.assert_allclose(s.u.values, np.exp(-4 * nu * t) * shear(G2, k=2).values, atol=1e-12)

    def test_taylor_green_exact(self):
        nu, t = 0.1, 1.0
        u0 = taylor_green(G2)
        s = integrate(NSState.initial(u0, nu), t, 0.05)
        np.testing.assert_allclose(s.u.values, np.exp(-2 * nu * t) * u0.values, atol=1e-12)

    def test_stays_divergence_free(self):
        s = integrate(NSState.initial(random_divfree(G2, 5, l2=3.0), 0.05), 0.5, 0.02)
        assert divergence_residual(s.u) < 1e-10

    def test_cfl_rejection_suggests_dt(self):
        s = NSState.initial(taylor_green(G2), 0.1)
        with pytest.raises(StepRejectedError) as exc:
            step(s, 1.0)
        assert exc.value.suggested_dt == pytest.approx(G2.dx, rel=1e-6)
        step(s, exc.value.suggested_dt)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_overflow_reported_as_blow_up(self):
        s = NSState.initial(taylor_green(G2, 1e120), 1e-3, cfl=1e200)
        with pytest.raises(BlowUpSuspectedError):
            step(s, 1e60)

    def test_history_and_snapshots(self):
        s = integrate(NSState.initial(taylor_green(G2), 0.1), 0.2, 0.05, snapshot_every=2)
        assert len(s.history) == 5
        assert [t for t, _ in s.snapshots] == pytest.approx([0.0, 0.1, 0.2])
        assert s.history["Du_L2"] is s.history["D1_L2"]


class TestEnergy:
    def test_initial_equality(self):
        c = energy_certificate(NSState.initial(taylor_green(G2), 0.1))
        assert c.passed and c.lhs == c.rhs

    def test_diffusive_mode_balance(self):
        # |u|^2 + 2 nu int |Du|^2 equals |u0|^2 exactly for a pure decay
        s = integrate(NSState.initial(shear(G2, 2.0, k=3), 0.2), 2.0, 0.04)
        _, rel = energy_residuals(s)
        assert np.abs(rel).max() < 1e-12

    def test_random_flow_balance(self):
        s = integrate(NSState.initial(random_divfree(G2, 1, l2=2.0), 0.05), 1.0, 0.01)
        c = energy_certificate(s)
        assert c.passed
        assert c.details["max_rel_residual"] < 1e-6

    def test_empty_history(self):
        s = NSState.initial(taylor_green(G2), 0.1)
        s.history = NSHistory()
        with pytest.raises(InsufficientDataError):
            energy_certificate(s)


class TestQEstimate:
    def test_constant_value(self):
        assert Q_ESTIMATE_K == pytest.approx(0.0891, abs=1e-4)

    def test_zero_field(self):
        c = q_estimate_certificate(NSState.initial(Field.zeros(G3, 3), 1.0), 0.5)
        assert c.passed and c.lhs == 0 and c.rhs == 0

    def test_three_dimensional_only(self):
        s = NSState.initial(taylor_green(G2), 0.1)
        with pytest.raises(UnsupportedDimensionError):
            q_estimate_certificate(s, 1.0)

    def test_lag_must_be_positive(self):
        with pytest.raises(DomainError):
            q_estimate_certificate(NSState.initial(Field.zeros(G3, 3), 1.0), 0.0)

    @pytest.mark.parametrize("seed", range(3))
    @pytest.mark.parametrize("lag", [0.01, 0.1, 1.0])
    def test_random_fields(self, seed, lag):
        c = q_estimate_certificate(NSState.initial(random_divfree(G3, seed, l2=2.0), 0.5), lag)
        assert c.passed


class TestDecayMonitor:
    def test_error_series_vanishes_for_linear_flow(self):
        s = NSState.initial(taylor_green(G2), 0.1)
        ck = LerayCheckpoint(0.0, s.u)
        s = integrate(s, 1.0, 0.05, snapshot_every=5)
        a, b = decay_monitor(s, ck, 1)
        assert len(a) == 4
        assert b.values.max() < 1e-11
        assert a.values[-1] == pytest.approx(1.0**0.5 * math.exp(-0.2) * hdot_norm(taylor_green(G2), 1), rel=1e-10)

    def test_nonlinear_error_shrinks_with_later_checkpoint(self):
        # fixed lag: the heat flow explains more of u as the nonlinearity weakens
        s = integrate(NSState.initial(random_divfree(G2, 1, l2=2.0), 0.05), 7.5, 0.02, snapshot_every=25)
        rel = []
        for t0 in (0.0, 2.5, 5.0):
            ck = LerayCheckpoint(t0, dict((round(t, 9), u) for t, u in s.snapshots)[t0])
            a, b = decay_monitor(s, ck, 0)
            i = int(np.argmin(np.abs(a.times - (t0 + 2.5))))
            rel.append(b.values[i] / a.values[i])
        assert rel[0] > rel[1] > rel[2]

    def test_checkpoint_must_be_solenoidal(self):
        with pytest.raises(InvalidFieldError):
            LerayCheckpoint(0.0, gradient(Field.from_function(G2, lambda x, y: np.sin(x))))

    def test_needs_snapshots(self):
        s = NSState.initial(taylor_green(G2), 0.1)
        ck = LerayCheckpoint(0.0, s.u)
        s = integrate(s, 0.1, 0.05)
        with pytest.raises(InsufficientDataError):
            decay_monitor(s, ck, 1)

    def test_order_above_recorded(self):
        s = integrate(NSState.initial(taylor_green(G2), 0.1), 0.1, 0.05)
        with pytest.raises(DomainError):
            decay_monitor(s, LerayCheckpoint(0.0, taylor_green(G2)), 9)


class TestOnset:
    def test_linear_decay_from_start(self):
        s = integrate(NSState.initial(taylor_green(G2), 0.1), 0.3, 0.05)
        assert gradient_monotonicity_onset(s) == 0.0

    def test_detects_late_onset(self):
        s = NSState.initial(taylor_green(G2), 0.1)
        h = NSHistory(1)
        u = taylor_green(G2)
        for t, a in [(0.0, 1.0), (0.1, 1.2), (0.2, 1.5), (0.3, 1.4), (0.4, 1.1)]:
            h.record(t, u * a, 0.1)
        s.history = h
        assert gradient_monotonicity_onset(s) == pytest.approx(0.2)

    def test_none_when_still_growing(self):
        s = NSState.initial(taylor_green(G2), 0.1)
        h = NSHistory(1)
        for t, a in [(0.0, 1.0), (0.1, 0.5), (0.2, 0.9)]:
            h.record(t, taylor_green(G2) * a, 0.1)
        s.history = h
        assert gradient_monotonicity_onset(s) is None


class TestTstar:
    def test_value(self):
        assert tstar_bound(1.0, 1.0) == pytest.approx(0.5 * 0.581862001307**12, rel=1e-15)
        assert tstar_bound(1.0, 1.0) < 0.000753026

    def test_scaling(self):
        assert tstar_bound(0.5, 2.0) == pytest.approx(2**5 * 2**4 * tstar_bound(1.0, 1.0), rel=1e-14)

    def test_exact_value(self):
        assert tstar_bound_exact(1, 1) == Fraction(581862001307, 10**12) ** 12 / 2

    @given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
    def test_ceiling(self, nu, u0):
        assert tstar_below_ceiling(nu, u0)

    def test_domain(self):
        with pytest.raises(DomainError):
            tstar_bound(0.0, 1.0)


class TestTrilinear:
    def test_zero(self):
        c = trilinear_certificate(Field.zeros(G3, 3))
        assert c.passed and c.lhs == 0 and c.margin == math.inf

    def test_shear_closed_form(self):
        # only D_1 u_2 is nonzero, so every product in the sum vanishes
        amp, k = 0.7, 2
        u = shear(G3, amp, k)
        c = trilinear_certificate(u)
        assert c.lhs == 0.0
        V = G3.volume
        rhs = K3**3 * (amp * k * math.sqrt(V / 2)) ** 1.5 * (amp * k**2 * math.sqrt(V / 2)) ** 1.5
        assert c.rhs == pytest.approx(rhs, rel=1e-12)

    @pytest.mark.parametrize("seed", range(4))
    def test_random(self, seed):
        c = trilinear_certificate(random_divfree(G3, seed))
        assert c.passed and c.ratio < 0.5

    def test_dimension(self):
        with pytest.raises(UnsupportedDimensionError):
            trilinear_certificate(taylor_green(G2))


def test_random_divfree_normalised():
    u = random_divfree(G3, 4, l2=2.5)
    assert lp_norm(u, 2) == pytest.approx(2.5, rel=1e-12)
    assert divergence_residual(u) < 1e-12
    np.testing.assert_array_equal(u.values, random_divfree(G3, 4, l2=2.5).values)
