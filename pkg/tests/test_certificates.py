import math

import pytest

from pdecert.certificates import FAIL, INDETERMINATE, PASS, BoundCertificate, NormSeries, combine


@pytest.mark.parametrize("lhs,rhs,tol,status", [
    (1.0, 2.0, 0.0, PASS),
    (2.0, 2.0, 0.0, PASS),
    (2.0 + 1e-9, 2.0, 1e-8, PASS),
    (2.1, 2.0, 1e-8, FAIL),
    (0.0, 0.0, 0.0, PASS),
])
def test_status(lhs, rhs, tol, status):
    assert BoundCertificate("x", lhs, rhs, tol=tol).status == status


def test_degenerate_margin_is_infinite():
    assert BoundCertificate("x", 0.0, 0.0).margin == math.inf
    assert BoundCertificate("x", 1.0, 3.0).margin == 2.0


def test_combine_keeps_worst():
    certs = [BoundCertificate("a", 1, 4), BoundCertificate("a", 3, 4), BoundCertificate("a", 0, 0, status=INDETERMINATE)]
    c = combine("all", certs)
    assert c.passed and c.lhs == 3 and c.details["samples"] == 2
    assert c.details["max_ratio"] == 0.75


def test_combine_propagates_failure():
    c = combine("all", [BoundCertificate("a", 1, 4), BoundCertificate("a", 5, 4)])
    assert c.status == FAIL and c.lhs == 5


def test_combine_all_indeterminate():
    assert combine("x", [BoundCertificate("a", 0, 0, status=INDETERMINATE)]).status == INDETERMINATE


class TestNormSeries:
    def test_rejects_non_increasing_time(self):
        s = NormSeries("q")
        s.append(1.0, 1.0)
        with pytest.raises(ValueError):
            s.append(1.0, 2.0)

    @pytest.mark.parametrize("v", [-1.0, math.nan, math.inf])
    def test_rejects_bad_values(self, v):
        with pytest.raises(ValueError):
            NormSeries("q").append(0.0, v)

    def test_power_law_slope(self):
        s = NormSeries("q")
        for t in [0.5, 1, 2, 4, 8]:
            s.append(t, 3 * t**-0.75)
        assert s.loglog_slope() == pytest.approx(-0.75, abs=1e-12)
        assert len(s.window(1, 4)) == 3
