import cmath
import math
from collections import Counter
from fractions import Fraction

import pytest

from negjacobi.errors import PrecisionUnreachable, WindowTooSmall
from negjacobi.gaussian import I, GaussianRational
from negjacobi.numerics.evaluate import EvalContext, appell_eval
from negjacobi.series import QZSeries, pochhammer
from negjacobi.special import (
    AppellJet, KacWakimotoSpec, appell_cutoff, appell_derivative_poly, appell_F_jet, chi12, crank_rank,
    eta_and_D, kontsevich_at_root, partial_theta, phi_MN_build, sum_of_tails_sides, theta_series,
    theta_sum_form, theta_vv,
)

HALF = Fraction(1, 2)


def zeta_flip(s: QZSeries) -> QZSeries:
    return QZSeries({(qe, -ze): c for (qe, ze), c in s.items()}, s.prec)


def test_theta_lowest_slice():
    th = theta_series(1)
    assert th == QZSeries({(Fraction(1, 8), -HALF): -I, (Fraction(1, 8), HALF): I}, 1)


def test_theta_is_odd():
    th = theta_series(12)
    assert zeta_flip(th) == -th


def test_triple_product_small():
    assert theta_series(20) == theta_sum_form(20)


def test_eta_and_divisor_sums():
    eta, D = eta_and_D(12)
    assert eta.agrees_with(pochhammer(1, 0, 1, None, 12).mul_monomial(1, Fraction(1, 24)), 12)
    assert D.coeff(0) == GaussianRational(Fraction(-1, 2))
    for n in range(1, 12):
        divisors = sum(1 for d in range(1, n + 1) if n % d == 0)
        assert D.coeff(n) == GaussianRational(divisors)
    assert D.is_zeta_free()


def test_eta_cubed_jacobi():
    eta, _ = eta_and_D(15)
    want = {}
    n = 0
    while Fraction((2 * n + 1) ** 2, 8) < 15:
        want[(Fraction((2 * n + 1) ** 2, 8), 0)] = (-1) ** n * (2 * n + 1)
        n += 1
    assert (eta ** 3).agrees_with(QZSeries(want, 15), 15)


def test_partial_theta_examples():
    s = partial_theta(HALF, 1, Fraction(3, 2), 6)
    want = {(Fraction(1, 24), -HALF): 1, (Fraction(25, 24), Fraction(5, 2)): -1,
            (Fraction(121, 24), Fraction(11, 2)): 1}
    assert s == QZSeries(want, 6)
    first = partial_theta(Fraction(3, 2), 0, 1, 3)
    assert first.coeff(Fraction(9, 16), Fraction(-3, 2)) == GaussianRational(1)


def test_partial_theta_step():
    M, ell, P = Fraction(1), Fraction(1, 2), 20
    t = partial_theta(ell, 1, M, P + 4)
    shifted = t.shift_z(1, 0).mul_monomial(-1, M, 2 * M)  # (-1)^eps q^M zeta^2M theta^+(z + tau)
    assert (t - shifted).agrees_with(QZSeries.monomial(1, ell * ell / (4 * M), -ell), P)


def test_theta_vv():
    t0 = theta_vv(1, 0, 5)
    assert t0 == QZSeries({(0, 0): 1, (1, 2): 1, (1, -2): 1, (4, 4): 1, (4, -4): 1}, 5)
    t1 = theta_vv(1, 1, 3)
    assert t1 == QZSeries({(Fraction(1, 4), 1): 1, (Fraction(1, 4), -1): 1,
                           (Fraction(9, 4), 3): 1, (Fraction(9, 4), -3): 1}, 3)
    assert theta_vv(3, 2, 10) == theta_vv(3, 8, 10)
    with pytest.raises(ValueError):
        theta_vv(0, 1, 3)


def _partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def _crank(p):
    ones = p.count(1)
    if ones == 0:
        return max(p)
    return sum(1 for x in p if x > ones) - ones


def test_crank_rank_vs_partitions():
    C = crank_rank("crank", 7)
    R = crank_rank("rank", 7)
    assert C.extract_zeta(1).coeff(1) == GaussianRational(1)
    assert C.coeff(1, 0) == GaussianRational(-1)
    assert [(z, c) for (qe, z), c in C.items() if qe == 2] == [(-2, 1), (2, 1)]
    for n in range(2, 7):
        cr = Counter(_crank(p) for p in _partitions(n))
        rk = Counter(p[0] - len(p) for p in _partitions(n))
        for m in range(-n, n + 1):
            assert C.coeff(n, m) == GaussianRational(cr[m])
            assert R.coeff(n, m) == GaussianRational(rk[m])
    assert R.coeff(0) == GaussianRational(1) and R.coeff(1) == GaussianRational(1)


def test_rank_window():
    with pytest.raises(WindowTooSmall):
        crank_rank("rank", 10, zeta_window=3)
    with pytest.raises(ValueError):
        crank_rank("neither", 3)


@pytest.mark.parametrize("mn,m,eps", [((0, 1), Fraction(-1, 2), 1), ((0, 3), Fraction(-3, 2), 1),
                                      ((1, 2), Fraction(-1, 2), 0)])
def test_kac_wakimoto_index(mn, m, eps):
    spec = KacWakimotoSpec(*mn)
    assert spec.index == m and spec.eps == eps
    quot = phi_MN_build(spec, 3)
    assert quot.index == m and quot.eps == eps


def test_kac_wakimoto_contract():
    with pytest.raises(ValueError, match="M < N"):
        KacWakimotoSpec(3, 1)


def test_kontsevich():
    assert kontsevich_at_root(0, 1) == GaussianRational(1)
    assert kontsevich_at_root(1, 2) == GaussianRational(3)
    assert kontsevich_at_root(1, 4) == GaussianRational(8, -3)
    q = cmath.exp(2j * math.pi / 3)
    assert abs(kontsevich_at_root(1, 3) - (1 + (1 - q) + (1 - q) * (1 - q * q))) < 1e-12
    with pytest.raises(ValueError):
        kontsevich_at_root(2, 4)


def test_chi12():
    assert [chi12(n) for n in (1, 5, 7, 11, 6, 13)] == [1, -1, -1, 1, 0, 1]


def test_sum_of_tails_fit():
    st = sum_of_tails_sides(12)
    assert st.lhs.coeff(Fraction(1, 24)) == GaussianRational(0)
    assert st.lhs.coeff(1 + Fraction(1, 24)) == GaussianRational(-1)
    assert st.sigma == HALF and st.grading == "n^2/24"
    assert not st.printed_form_holds


def test_appell_n0_term():
    jet, = appell_F_jet(HALF, 1, 0, 3)
    t0 = [t for t in jet.terms if t.pole_k == 0]
    assert len(t0) == 1
    t = t0[0]
    assert (t.q_exp, t.z_exp, t.pole_order, t.coeff) == (0, HALF, 1, GaussianRational(1))


def test_appell_derivative_poly():
    a = Fraction(-3, 2)
    assert appell_derivative_poly(a, 0) == {1: 1}
    # D(w^a (1-t)^-1) = (a + 1) w^a (1-t)^-1 - w^a (1-t)^-2
    assert appell_derivative_poly(a, 1) == {1: a + 1, 2: -1}


def test_appell_cutoff_and_errors():
    K = appell_cutoff(1, 10)
    assert K * (K + 1) < 10 or K * (K - 1) + K < 10
    with pytest.raises(PrecisionUnreachable):
        appell_cutoff(0, 5)
    with pytest.raises(ValueError):
        appell_F_jet(Fraction(1, 3), 0, 0, 5)


def test_appell_json_round_trip():
    jets = appell_F_jet(1, 0, 2, 4)
    for j in jets:
        assert AppellJet.from_json(j.to_json()) == j


@pytest.mark.parametrize("M,eps", [(HALF, 1), (Fraction(1), 0), (Fraction(3, 2), 1)])
def test_appell_jet_matches_numeric(M, eps):
    tau = 0.13 + 1.04j
    ctx = EvalContext(tau)
    jets = appell_F_jet(M, eps, 2, 12)
    for z in (0.31 + 0.22 * tau, 0.7 + 0.4 * tau, 0.55 + 0.81 * tau):
        for d, jet in enumerate(jets):
            want = appell_eval(M, eps, z, 0, ctx, d)
            assert abs(jet.evaluate(tau, z) - want) <= 1e-10 * max(1, abs(want))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_appell_derivative_finite_difference(d):
    tau = -0.21 + 0.8j
    ctx = EvalContext(tau)
    z, u, h = 0.37 + 0.3 * tau, 0.12 + 0.6 * tau, 1e-5
    for M, eps in ((HALF, 1), (Fraction(1), 0)):
        fd = (appell_eval(M, eps, z, u + h, ctx, d - 1) - appell_eval(M, eps, z, u - h, ctx, d - 1)) / (2 * h)
        exact = appell_eval(M, eps, z, u, ctx, d)
        assert abs(fd / (2j * math.pi) - exact) <= 1e-6 * abs(exact)
