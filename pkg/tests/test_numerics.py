import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from negjacobi.decomposition import theta_decomp_slices, thm2_rhs_exact
from negjacobi.errors import NearPole, NonConvergent, NonStable, TailBoundFailure
from negjacobi.numerics import quantum
from negjacobi.numerics.checks import (
    contour_residue, residue_and_elliptic_check, thm1_rhs_numeric, verify_thm1_numeric, verify_thm2_numeric,
)
from negjacobi.numerics.evaluate import (
    TWO_PI_I, EvalContext, appell_eval, eta_eval, partial_theta_eval, quotient_eval, quotient_laurent,
    theta_derivs, theta_eval,
)
from negjacobi.numerics.quadrature import QuadratureSpec, fourier_quadrature, trapezoid_periodic
from negjacobi.quotient import JacobiQuotient
from negjacobi.special import KacWakimotoSpec, eta_and_D, partial_theta, theta_series

F = Fraction
HALF = F(1, 2)
TAU = 0.13 + 1.04j
CTX = EvalContext(TAU)
TWO_POLE = JacobiQuotient.parse("0:0:-1;1/2:1/2:-1;1/2:0:1")


def test_context_validation():
    with pytest.raises(ValueError):
        EvalContext(1 - 0.5j)
    with pytest.raises(ValueError):
        EvalContext(1j, eps=0)


def test_theta_zero_and_exact():
    assert abs(theta_eval(0, CTX)) < 1e-12
    z = 0.21 + 0.17j
    assert abs(theta_eval(z, CTX) - theta_series(40).evaluate(TAU, z)) < 1e-10


def test_exact_numeric_coherence():
    rng = np.random.default_rng(7)
    th = theta_series(60)
    eta, _ = eta_and_D(60)
    pt = partial_theta(HALF, 1, F(3, 2), 60)
    for _ in range(20):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 1.5))
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3))
        ctx = EvalContext(tau)
        assert abs(theta_eval(z, ctx) - th.evaluate(tau, z)) < 1e-9
        assert abs(eta_eval(tau, ctx) - eta.evaluate(tau)) < 1e-9
        assert abs(partial_theta_eval(HALF, 1, F(3, 2), z, ctx) - pt.evaluate(tau, z)) < 1e-9


def test_theta_derivative_finite_difference():
    z, h = 0.3 + 0.1j, 1e-5
    d = theta_derivs(z, CTX, 2)
    fd = (theta_eval(z + h, CTX) - theta_eval(z - h, CTX)) / (2 * h) / TWO_PI_I
    assert abs(d[1] - fd) < 1e-6 * abs(d[1])


def test_tail_failure_and_near_pole():
    with pytest.raises(TailBoundFailure):
        theta_eval(0.1, EvalContext(TAU, cutoff=2))
    with pytest.raises(NearPole):
        quotient_eval(JacobiQuotient.kac_wakimoto(0, 1), 1e-9, CTX)
    with pytest.raises(NearPole):
        appell_eval(HALF, 1, 0.2, 0.2 + 1e-9, CTX)


def test_appell_residue_directions():
    z = 0.3 + 0.4 * TAU
    for k in range(8):
        w = 1e-6 * cmath.exp(2j * math.pi * k / 8)
        val = w * appell_eval(1, 0, z, z + w, CTX)
        assert abs(val - 1 / TWO_PI_I) < 1e-5


def test_contour_residue_radius_independent():
    z = 0.6 + 0.35 * TAU
    a = contour_residue(HALF, 1, z, CTX, 1e-2)
    b = contour_residue(HALF, 1, z, CTX, 5e-3)
    assert abs(a - 1) < 1e-7 and abs(a - b) < 1e-7


@pytest.mark.parametrize("M,eps", [(HALF, 1), (F(1), 0), (F(3, 2), 1)])
def test_appell_kernel_residue_and_law(M, eps):
    r = residue_and_elliptic_check(M, eps, EvalContext(0.1 + 1.1j), sample_count=3)
    assert r.passed, r.derived_constants


def test_quotient_laurent_matches_exact():
    from negjacobi.jets import laurent_coeffs
    for mn in ((0, 2), (1, 3)):
        order, D = quotient_laurent(JacobiQuotient.kac_wakimoto(*mn), 0, 0, CTX)
        exact = laurent_coeffs(KacWakimotoSpec(*mn), precision=30).D
        assert order == mn[1]
        for num, ex in zip(D, exact):
            assert abs(num - ex.evaluate(TAU)) < 1e-10 * max(1, abs(num))


# quadrature -----------------------------------------------------------------

def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(0j, HALF, n_points=24)
    with pytest.raises(ValueError):
        QuadratureSpec(0j, HALF, n_points=8)
    with pytest.raises(ValueError):
        QuadratureSpec(0j, HALF, deform_delta=0)


def test_theta_squared_slices():
    _, hs = theta_decomp_slices(40)
    th2 = JacobiQuotient.parse("0:0:2")
    for ell, h in hs.items():
        val = fourier_quadrature(th2, QuadratureSpec(0j, F(ell)), CTX).value
        assert abs(val - h.evaluate(TAU)) < 1e-10


def test_phi01_against_exact():
    q = JacobiQuotient.kac_wakimoto(0, 1)
    z0 = -0.5 - TAU / 2
    for ell in (-HALF, HALF, F(3, 2)):
        quadv = fourier_quadrature(q, QuadratureSpec(z0, ell), CTX).value
        exact = thm2_rhs_exact(KacWakimotoSpec(0, 1), ell, 30).evaluate(TAU)
        assert abs(quadv - exact) < 1e-8


def test_integrand_periodic():
    q = JacobiQuotient.kac_wakimoto(1, 3)
    ell = F(-1)
    z0 = -0.5 - TAU / 2

    def g(z):
        return quotient_eval(q, z, CTX) * cmath.exp(-TWO_PI_I * float(ell) * z)

    assert abs(g(z0) - g(z0 + 1)) < 1e-12 * max(1, abs(g(z0)))


def test_doubling_decreases():
    q = JacobiQuotient.kac_wakimoto(0, 2)
    z0 = -0.5 - TAU / 2

    def g(z):
        return quotient_eval(q, z, CTX) * cmath.exp(-TWO_PI_I * -1 * z)

    ref = trapezoid_periodic(g, z0, 16, 1e-14)[0]
    errs = []
    for n in (4, 8, 16):
        nodes = z0 + np.arange(n) / n
        errs.append(abs(sum(g(z) for z in nodes) / n - ref))
    assert errs[0] > errs[1] > errs[2]


def test_nonconvergent():
    q = JacobiQuotient.kac_wakimoto(0, 3)
    with pytest.raises(NonConvergent):
        trapezoid_periodic(lambda z: quotient_eval(q, z, CTX), -0.5 - 0.02j, 16, 1e-14, max_points=32)


def test_ell_must_be_in_m_plus_Z():
    q = JacobiQuotient.kac_wakimoto(0, 2)
    with pytest.raises(ValueError):
        fourier_quadrature(q, QuadratureSpec(0j, HALF), CTX)
    with pytest.raises(ValueError):
        verify_thm2_numeric(q, HALF)


def test_pole_rule_equals_principal_value():
    """A simple pole at z = 0 on the real path: averaged deformation vs scipy's Cauchy PV."""
    q = JacobiQuotient.kac_wakimoto(0, 1)
    ell = -HALF
    res = fourier_quadrature(q, QuadratureSpec(-0.5 + 0j, ell), CTX)
    assert res.rule == "interior"
    assert res.deform_spread < 1e-10

    slope = TWO_PI_I * theta_derivs(0, CTX, 1)[1]  # theta'(0) in d/dz

    def smooth(x):
        # x * phi(x) e(-ell x) is regular at 0; its value there is 1/theta'(0)
        if abs(x) < 1e-5:
            return 1 / slope
        return x * quotient_eval(q, x, CTX) * cmath.exp(-TWO_PI_I * float(ell) * x)

    re = quad(lambda x: smooth(x).real, -0.5, 0.5, weight="cauchy", wvar=0.0, epsabs=1e-13)[0]
    im = quad(lambda x: smooth(x).imag, -0.5, 0.5, weight="cauchy", wvar=0.0, epsabs=1e-13)[0]
    norm = cmath.exp(TWO_PI_I * TAU * (-float(ell) ** 2 / (4 * float(q.index))))
    assert abs(res.value - norm * complex(re, im)) < 1e-6


def test_endpoint_rule_matches_interior():
    q = JacobiQuotient.kac_wakimoto(0, 1)
    a = fourier_quadrature(q, QuadratureSpec(0j, -HALF), CTX)
    b = fourier_quadrature(q, QuadratureSpec(-0.5 + 0j, -HALF), CTX)
    assert a.rule == "endpoint" and b.rule == "interior"
    assert abs(a.value - b.value) < 1e-9


# decomposition checks ---------------------------------------------------------------

def test_appell_numeric_phi01_point():
    z = 0.31 + 0.12 * TAU
    r = verify_thm1_numeric(JacobiQuotient.kac_wakimoto(0, 1), z, ctx=CTX)
    assert r.passed and r.derived_constants["abs_error"] < 1e-8


def test_appell_numeric_positive_index_rejected():
    with pytest.raises(ValueError):
        verify_thm1_numeric(JacobiQuotient.parse("0:0:2"), 0.3)


def test_two_pole_quotient():
    z = 0.37 + 0.21 * TAU
    z0 = (F(-3, 4), F(-3, 4))
    assert verify_thm1_numeric(TWO_POLE, z, z0, CTX).passed
    for drop in (0, 1):
        assert not verify_thm1_numeric(TWO_POLE, z, z0, CTX, drop_pole=drop).passed
    other = thm1_rhs_numeric(TWO_POLE, z, (F(-1, 4), F(-1, 4)), CTX)
    assert abs(thm1_rhs_numeric(TWO_POLE, z, z0, CTX) - other) < 1e-8


@pytest.mark.parametrize("mn,ells", [((0, 1), (-HALF, HALF, F(3, 2))), ((1, 3), (F(-1),))])
def test_fourier_against_partial_theta(mn, ells):
    q = JacobiQuotient.kac_wakimoto(*mn)
    for ell in ells:
        r = verify_thm2_numeric(q, ell, ctx=CTX)
        assert r.passed, r.derived_constants


def test_fourier_two_pole():
    for ell in (F(-1, 2), HALF):
        r = verify_thm2_numeric(TWO_POLE, ell, (F(-3, 4), F(-3, 4)), CTX)
        assert r.passed, r.derived_constants


# quantum probes -----------------------------------------------------------------

def test_eta_radial():
    lim = quantum.radial_limit(quantum.eta_function, 0, quantum.approach_sequence(0.02, 6))
    assert abs(lim.limit) < 1e-6


def test_theta_plus_radial_stable():
    lim = quantum.radial_limit(quantum.theta_plus_at(-HALF, 1, HALF), 1)
    assert lim.stability < 1e-5
    assert abs(lim.limit - cmath.exp(2j * math.pi / 8) / 2) < 1e-6


def test_radial_preconditions():
    f = quantum.eta_function
    with pytest.raises(ValueError):
        quantum.radial_limit(f, 0, [0.001, 0.002, 0.004])
    with pytest.raises(ValueError):
        quantum.radial_limit(f, 0, [0.02, 0.015, 0.01])


def test_radial_nonstable():
    f = quantum.theta_plus_at(0, 0, 1)  # sum q^(n^2) blows up like t^(-1/2) at x = 0
    with pytest.raises(NonStable):
        quantum.radial_limit(f, 0)


def test_richardson_exact_on_polynomial():
    ts = [0.1 * 2.0 ** -j for j in range(4)]
    vals = [3 + 2 * t - t * t + 0.5 * t ** 3 for t in ts]
    assert abs(quantum.richardson(vals)[-1] - 3) < 1e-12


def test_cocycle_identity_and_translation():
    f = quantum.theta_plus_at(-HALF, 1, HALF)
    rows = quantum.cocycle_probe(quantum.CocycleProbe((1, 0, 0, 1), (F(1),)), f)
    assert all(abs(r.extrapolant) < 1e-12 for r in rows)
    periodic = quantum.theta_plus_at(0, 0, 1)
    rows = quantum.cocycle_probe(quantum.CocycleProbe((1, 1, 0, 1), (HALF,)), periodic)
    assert abs(rows[0].extrapolant) < 1e-6
    with pytest.raises(ValueError):
        quantum.CocycleProbe((1, 1, 1, 1), (HALF,))


def test_cocycle_csv():
    f = quantum.theta_plus_at(-HALF, 1, HALF)
    probe = quantum.CocycleProbe((0, -1, 1, 0), (F(1, 3), F(1, 2), F(2, 3)))
    text = quantum.rows_to_csv(quantum.cocycle_probe(probe, f))
    lines = text.split("\r\n")
    assert lines[0] == "x,t,value_re,value_im,extrapolant_re,extrapolant_im,diff1,diff2"
    assert len(lines) == 1 + 3 * 6 + 1
    assert text == quantum.rows_to_csv(quantum.cocycle_probe(probe, f))


@pytest.mark.parametrize("ell,eps,M,z", [
    (-HALF, 0, HALF, (0, 0)), (HALF, 1, F(3, 2), (0, 0)), (F(3, 2), 1, F(1), (F(1, 2), F(1, 4))),
    (-HALF, 1, HALF, (-1, HALF)),
])
def test_standard_form(ell, eps, M, z):
    sf = quantum.reduce_partial_theta_standard(ell, eps, M, z)
    if z == (0, 0):
        assert sf.shift == -F(ell) / (2 * M) and sf.q_power == 0 and sf.phase == 0
    for tau in (0.13 + 1.04j, -0.21 + 0.8j, 0.5 + 1.5j):
        ctx = EvalContext(tau)
        zz = float(z[0]) * tau + float(z[1])
        assert abs(sf.evaluate(tau) - partial_theta_eval(ell, eps, M, zz, ctx)) < 1e-8


def test_standard_form_rejects_non_sign_twist():
    with pytest.raises(ValueError):
        quantum.reduce_partial_theta_standard(HALF, 0, HALF, (0, F(1, 3)))
