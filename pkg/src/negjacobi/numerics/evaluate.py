"""Double-precision evaluation with certified truncation tails."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import NearPole, TailBoundFailure
from ..quotient import JacobiQuotient
from ..special import appell_derivative_poly

TWO_PI_I = 2j * math.pi
DEFAULT_TAU = 0.13 + 1.04j


def e(x: complex) -> complex:
    return cmath.exp(TWO_PI_I * x)


@dataclass(frozen=True)
class EvalContext:
    tau: complex
    cutoff: int = 4000
    eps: float = 1e-10
    near_pole_radius: float = 1e-6

    def __post_init__(self):
        if complex(self.tau).imag <= 0:
            raise ValueError("tau must lie in the upper half-plane")
        if self.eps <= 0:
            raise ValueError("eps must be positive")


def _outward(term, ctx: EvalContext, start: int = 0, step: int = 1):
    """Sum term(n) for n = start, start+step, ... with a geometric tail certificate.

    Stops once a term is below eps/1000 and the ratio of the last two terms is
    below 1/2; beyond that point log-concave decay keeps the tail below the
    last term.  Returns (sum, tail_bound).
    """
    total = 0j
    prev = None
    n = start
    for _ in range(ctx.cutoff):
        t = term(n)
        total += t
        a = abs(t)
        if prev is not None and a < ctx.eps * 1e-3 and a <= 0.5 * prev:
            return total, a
        prev = a
        n += step
    raise TailBoundFailure(f"no tail certificate within {ctx.cutoff} terms")


# ---------------------------------------------------------------------------
# theta and its z-derivatives


def theta_derivs(z: complex, ctx: EvalContext, kmax: int = 0) -> np.ndarray:
    """[D_z^k theta(z) for k = 0..kmax] from the sum form over nu in 1/2 + Z."""
    tau = ctx.tau
    out = np.zeros(kmax + 1, dtype=complex)
    for sgn in (1, -1):
        for k in range(kmax + 1):
            def term(n, k=k):
                nu = sgn * (n + 0.5)
                phase = 1j if n % 2 == 0 else -1j
                if sgn < 0:
                    phase = -phase
                return phase * nu ** k * cmath.exp(TWO_PI_I * (nu * nu / 2 * tau + nu * z))
            val, _ = _outward(term, ctx)
            out[k] += val
    return out


def theta_eval(z: complex, ctx: EvalContext) -> complex:
    return complex(theta_derivs(z, ctx, 0)[0])


def eta_eval(tau: complex, ctx: EvalContext | None = None) -> complex:
    """Pentagonal sum: eta = sum (-1)^n q^((6n+1)^2/24)."""
    ctx = ctx or EvalContext(tau)
    total = 0j
    for k0, step in ((0, 1), (-1, -1)):
        def term(k):
            return (-1) ** (k % 2) * cmath.exp(TWO_PI_I * tau * (6 * k + 1) ** 2 / 24)
        val, _ = _outward(term, ctx, k0, step)
        total += val
    return total


# ---------------------------------------------------------------------------
# partial theta


def partial_theta_eval(ell, eps: int, M, z: complex, ctx: EvalContext, d: int = 0) -> complex:
    """D_z^d theta^+_{ell,eps,M}(z)."""
    ell = float(ell)
    M = float(M)
    tau = ctx.tau

    def term(n):
        s = 2 * M * n - ell
        sign = -1 if (eps and n % 2) else 1
        return sign * s ** d * cmath.exp(TWO_PI_I * (s * s / (4 * M) * tau + s * z))

    val, _ = _outward(term, ctx)
    return val


# ---------------------------------------------------------------------------
# Appell-Lerch sums


def appell_eval(M, eps: int, z: complex, u: complex, ctx: EvalContext, d: int = 0) -> complex:
    """D_v^d F_{M,eps}(z, v) at v = u via the exact derivative algebra."""
    Mf = float(M)
    tau = ctx.tau
    polys = {}

    def term(n):
        a = -Mf * (2 * n + 1)
        if n not in polys:
            polys[n] = appell_derivative_poly(Fraction(M) * -(2 * n + 1), d)
        t = cmath.exp(TWO_PI_I * (n * tau + z - u))
        den = 1 - t
        if abs(den) < ctx.near_pole_radius:
            raise NearPole(f"1 - q^{n} zeta/w is within {ctx.near_pole_radius} of 0")
        pref = cmath.exp(TWO_PI_I * (Mf * n * (n + 1) * tau + Mf * z + a * u))
        # q^(M n (n+1)) zeta^M w^a with a = -M(2n+1)
        val = sum(float(c) * den ** (-j) for j, c in polys[n].items())
        sign = -1 if (eps and n % 2) else 1
        return sign * pref * val

    up, _ = _outward(term, ctx, 0, 1)
    down, _ = _outward(term, ctx, -1, -1)
    return up + down


# ---------------------------------------------------------------------------
# theta quotients and their Laurent data


def quotient_eval(quot: JacobiQuotient, z: complex, ctx: EvalContext) -> complex:
    val = 1 + 0j
    for a, b, ex in quot.factors:
        t = theta_eval(z + float(a) * ctx.tau + float(b), ctx)
        if ex < 0 and abs(t) < ctx.near_pole_radius:
            raise NearPole(f"z = {z} is within reach of a pole")
        val *= t ** ex
    return val


def _series_mul(a, b, n):
    return np.convolve(a, b)[:n]


def _series_inv(a, n):
    out = np.zeros(n, dtype=complex)
    out[0] = 1 / a[0]
    for k in range(1, n):
        acc = sum(a[i] * out[k - i] for i in range(1, min(k, len(a) - 1) + 1))
        out[k] = -acc / a[0]
    return out


def quotient_laurent(quot: JacobiQuotient, lam, mu, ctx: EvalContext, extra: int = 2):
    """Numeric Laurent data at u = lam tau + mu: (order, [D_1, ..., D_order])."""
    lam, mu = Fraction(lam), Fraction(mu)
    vanish = 0
    for a, b, ex in quot.factors:
        if (lam + a).denominator == 1 and (mu + b).denominator == 1:
            vanish += ex
    order = -vanish
    if order <= 0:
        return 0, []
    n = order + extra + 1
    u = float(lam) * ctx.tau + float(mu)
    unit = np.zeros(n, dtype=complex)
    unit[0] = 1
    for a, b, ex in quot.factors:
        derivs = theta_derivs(u + float(a) * ctx.tau + float(b), ctx, n + 1)
        coeffs = np.array([derivs[k] / math.factorial(k) for k in range(n + 2)])
        if (lam + a).denominator == 1 and (mu + b).denominator == 1:
            coeffs = coeffs[1:]  # exact zero of theta; the x^0 term is dropped
        coeffs = coeffs[:n]
        base = coeffs if ex > 0 else _series_inv(coeffs, n)
        for _ in range(abs(ex)):
            unit = _series_mul(unit, base, n)
    # the expansion is x^(-order) * unit
    D = [complex(unit[order - k]) for k in range(1, order + 1)]
    return order, D
