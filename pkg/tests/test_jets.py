import math
from fractions import Fraction

import pytest

from negjacobi.errors import OrderMismatch
from negjacobi.gaussian import I
from negjacobi.jets import Jet, LaurentData, jet_arith, laurent_coeffs, phi_MN_jet, theta_jet_at_half, theta_jet_at_zero
from negjacobi.numerics.evaluate import EvalContext, quotient_eval
from negjacobi.quotient import JacobiQuotient
from negjacobi.series import QZSeries
from negjacobi.special import KacWakimotoSpec, eta_and_D

P = 12


@pytest.fixture(scope="module")
def eta():
    return eta_and_D(P + 1)[0]


def test_theta_jet_parity_and_lead(eta):
    jet = theta_jet_at_zero(6, P)
    assert jet.order_lo == 1
    for k in (2, 4, 6):
        assert jet.coeff(k).is_zero()
    assert jet.coeff(1).agrees_with((eta ** 3).scale(I), P)


def test_theta_cubed_lead(eta):
    jet = theta_jet_at_zero(5, P) ** 3
    assert jet.order_lo == 3
    assert jet.coeff(3).agrees_with((eta ** 9).scale(-I), P)


def test_invert_round_trip():
    jet = theta_jet_at_zero(6, P)
    one = jet * jet.invert()
    assert one.order_lo == 0
    assert one.coeff(0).agrees_with(QZSeries.one(), P)
    for k in range(1, one.order_hi + 1):
        assert one.coeff(k).truncate(P).is_zero()


def test_invert_monomial_times_unit():
    unit = (QZSeries.one() + QZSeries.monomial(1, 1)).truncate(5)
    jet = Jet((Fraction(0), Fraction(0)), 1, (unit, QZSeries.zero(5)))
    inv = jet_arith("invert", jet)
    assert inv.order_lo == -1
    assert inv.coeff(-1).agrees_with(unit.invert(), 5)


def test_order_mismatch():
    jet = Jet((Fraction(0), Fraction(0)), 1, (QZSeries.zero(5), QZSeries.one()))
    with pytest.raises(OrderMismatch):
        jet.invert()
    with pytest.raises(OrderMismatch):
        Jet.from_series(QZSeries.one().with_prec(3), 3, vanishing_order=1)


def test_phi01_residue(eta):
    data = laurent_coeffs(KacWakimotoSpec(0, 1), precision=P)
    assert data.order == 1
    assert data.D[0].agrees_with((eta ** 3).invert().scale(-I), P)


def test_phi03_leading(eta):
    data = laurent_coeffs(KacWakimotoSpec(0, 3), precision=P)
    assert data.order == 3
    assert data.D[2].agrees_with((eta ** 9).invert().scale(I), P)
    # phi_{0,3} is odd: the x^-2 coefficient vanishes
    assert data.D[1].is_zero()


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_phi0N_parity(N):
    jet = phi_MN_jet(KacWakimotoSpec(0, N), N + 4, 8)
    for k in range(jet.order_lo, jet.order_hi + 1):
        if (k - N) % 2:
            assert jet.coeff(k).truncate(7).is_zero()


@pytest.mark.parametrize("mn", [(0, 2), (1, 3), (2, 3)])
def test_reconstruction(mn):
    spec = KacWakimotoSpec(*mn)
    jet = phi_MN_jet(spec, None, P)
    data = laurent_coeffs(spec, precision=P - 2)
    for n in range(1, spec.N + 1):
        assert jet.coeff(-n).agrees_with(data.D[n - 1], P - 2)
    # multiplying back by theta^N returns the Taylor jet of theta(z + 1/2)^M
    back = jet * theta_jet_at_zero(spec.N + 4, P) ** spec.N
    num = theta_jet_at_half(spec.N + 4, P) ** spec.M if spec.M else None
    assert back.order_lo == 0
    for k in range(back.order_hi + 1):
        want = num.coeff(k) if num else (QZSeries.one() if k == 0 else QZSeries.zero())
        assert back.coeff(k).agrees_with(want, P - 2)


@pytest.mark.parametrize("mn", [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])
def test_laurent_vs_direct_evaluation(mn):
    tau = 0.13 + 1.04j
    spec = KacWakimotoSpec(*mn)
    jet = phi_MN_jet(spec, None, 14)
    quot = JacobiQuotient.kac_wakimoto(*mn)
    ctx = EvalContext(tau)
    for z in (0.05, 0.03j, 0.02 - 0.04j):
        x = 2j * math.pi * z
        approx = sum(jet.coeff(k).evaluate(tau) * x ** k for k in range(jet.order_lo, jet.order_hi + 1))
        direct = quotient_eval(quot, z, ctx)
        assert abs(approx - direct) <= 1e-6 * abs(direct)


def test_laurent_json_round_trip():
    data = laurent_coeffs(KacWakimotoSpec(1, 2), precision=5)
    assert LaurentData.from_json(data.to_json()) == data
    assert data.to_json()["pole"] == {"lambda": "0/1", "mu": "0/1"}
