import math

import numpy as np
import pytest

from pdecert import inequalities as iq
from pdecert import navier_stokes
from pdecert.exceptions import DomainError, EmptyCorpusError, RejectedSampleError, UnsupportedDimensionError
from pdecert.grid import Field, GridSpec


def gauss(grid, amp=1.0):
    return Field.from_function(grid, lambda *x: amp * np.exp(-sum(c**2 for c in x)))


class TestConstants:
    def test_sobolev_constant(self):
        # sharp Sobolev constant for |u|_6 <= S |grad u|_2
        assert iq.SOBOLEV_3D == pytest.approx(0.42726, abs=1e-5)
        assert iq.K_L4 == pytest.approx(iq.SOBOLEV_3D**0.75)

    def test_shared_k3(self):
        assert iq.K3 == navier_stokes.K3

    def test_k2(self):
        assert iq.K2 == pytest.approx(0.678)

    def test_registry(self):
        names = [(i.name, i.n) for i in iq.registry()]
        assert len(names) == len(set(names)) == 14


class TestClosedForms:
    def test_nash_gaussian_1d(self):
        u = gauss(iq.CORPUS_GRIDS[1])
        assert iq.nash(1).ratio(u) == pytest.approx((2 * math.pi) ** (-1 / 6), rel=1e-8)

    def test_gn_sup_gaussian_3d(self):
        u = gauss(iq.CORPUS_GRIDS[3])
        l2 = (math.pi / 2) ** 0.75
        hess2 = 7.5 * math.pi * math.sqrt(math.pi / 2)  # |D^2 u|_2^2
        expect = 1.0 / (l2**0.25 * hess2**0.375)
        assert iq.gn_sup().ratio(u) == pytest.approx(expect, rel=1e-6)

    def test_gn_l3_gaussian_3d(self):
        u = gauss(iq.CORPUS_GRIDS[3])
        l3 = math.sqrt(math.pi / 3)
        l2 = (math.pi / 2) ** 0.75
        grad = math.sqrt(3 * (math.pi / 2) ** 1.5)
        assert iq.gn_l3().ratio(u) == pytest.approx(l3 / math.sqrt(l2 * grad), rel=1e-6)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_lr_at_two_is_nash(self, n):
        u = gauss(iq.CORPUS_GRIDS[n])
        assert iq.gn_lr(n, 2.0).ratio(u) == pytest.approx(iq.nash(n).ratio(u), rel=1e-12)


class TestAudit:
    def test_zero_field(self):
        c = iq.audit(iq.nash(2), Field.zeros(iq.CORPUS_GRIDS[2]))
        assert c.passed and c.lhs == 0 and c.rhs == 0

    def test_rejects_wide_samples(self):
        g = GridSpec(1, 64, 4.0)
        with pytest.raises(RejectedSampleError):
            iq.audit(iq.nash(1), gauss(g))

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            iq.audit(iq.nash(2), gauss(iq.CORPUS_GRIDS[1]))

    def test_sup_inequalities_are_scalar_only(self):
        g = iq.CORPUS_GRIDS[3]
        u = iq.sample_field("gaussian", g, np.random.default_rng(0), components=3)
        with pytest.raises(DomainError):
            iq.audit(iq.gn_sup(), u)

    @pytest.mark.parametrize("ctor", [iq.gn_sup, iq.gn_grad, iq.gn_sup_grad, iq.gn_l3, iq.gn_l4])
    def test_three_dimensional(self, ctor):
        with pytest.raises(UnsupportedDimensionError):
            ctor(2)

    @pytest.mark.parametrize("n,r", [(1, 1.5), (1, 4.0), (3, 2 + 2 / 3)])
    def test_lr_range(self, n, r):
        with pytest.raises(DomainError):
            iq.gn_lr(n, r)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            iq.sample_field("spiky", iq.CORPUS_GRIDS[1], np.random.default_rng(0))


class TestCorpus:
    def test_empty(self):
        with pytest.raises(EmptyCorpusError):
            iq.corpus_audit(iq.nash(1), 0)

    def test_all_rejected(self):
        with pytest.raises(EmptyCorpusError):
            iq.corpus_audit(iq.nash(1), 3, grid=GridSpec(1, 64, 4.0))

    def test_seeded(self):
        a = iq.corpus_audit(iq.nash(2), 6, seed=3)
        b = iq.corpus_audit(iq.nash(2), 6, seed=3)
        assert a.ratios == b.ratios

    def test_samples_have_small_tails(self):
        rng = np.random.default_rng(1)
        for n in (1, 2, 3):
            for kind in iq.KINDS:
                u = iq.sample_field(kind, iq.CORPUS_GRIDS[n], rng)
                assert iq.tail_fraction(u) < iq.TAIL_THRESHOLD

    @pytest.mark.parametrize("ineq", [iq.nash(1), iq.nash(2), iq.gn_lr(1, 3.0), iq.gn_lr(2, 2.5)],
                             ids=lambda i: f"{i.name}-{i.n}")
    def test_low_dimensional(self, ineq):
        s = iq.corpus_audit(ineq, 15, seed=11)
        assert s.all_passed and s.max_ratio < 1

    @pytest.mark.parametrize("ctor", [iq.gn_grad, iq.gn_l3, iq.gn_l4])
    def test_vector_transfer(self, ctor):
        s = iq.corpus_audit(ctor(), 3, seed=5, vector=True)
        assert s.all_passed


class TestScaling:
    @pytest.mark.parametrize("ineq", [iq.nash(1), iq.nash(2), iq.gn_lr(2, 2.5), iq.gn_l3(), iq.gn_grad()],
                             ids=lambda i: f"{i.name}-{i.n}")
    def test_invariance(self, ineq):
        assert iq.scaling_audit(ineq).passed

    def test_detects_wrong_exponents(self):
        bad = iq.InequalitySpec("bad", 1, 1.0, lambda u: iq.lp_norm(u, 2),
                                lambda u: iq.lp_norm(u, 1) ** 0.5 * iq.hdot_norm(u, 1) ** 0.5)
        assert not iq.scaling_audit(bad).passed
