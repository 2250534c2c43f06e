"""Fourier coefficients h_{ell,z0} by the periodic trapezoidal rule."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import NonConvergent
from ..quotient import JacobiQuotient
from .evaluate import TWO_PI_I, EvalContext, quotient_eval


@dataclass(frozen=True)
class QuadratureSpec:
    z0: complex
    ell: Fraction
    n_points: int = 32
    deform_delta: float = 0.05

    def __post_init__(self):
        n = self.n_points
        if n < 16 or n & (n - 1):
            raise ValueError("n_points must be a power of two and at least 16")
        if self.deform_delta <= 0:
            raise ValueError("deform_delta must be positive")


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    n_points: int
    doubling_error: float
    rule: str
    deform_spread: float = 0.0


def poles_on_line(quot: JacobiQuotient, z0: complex, tau: complex, tol: float = 1e-12):
    """Pole classes (lam, mu) with a representative on the line Im z = Im z0."""
    hits = []
    for (lam, mu), order in sorted(quot.zero_classes().items()):
        if order >= 0:
            continue
        rows = (z0.imag - float(lam) * tau.imag) / tau.imag
        j = round(rows)
        if abs(rows - j) * tau.imag < tol:
            hits.append((lam + j, mu))
    return hits


def trapezoid_periodic(f, z0: complex, n_start: int, eps: float, max_points: int = 1 << 14):
    """Trapezoid on [z0, z0+1] with doubling until successive values agree to eps."""
    n = n_start
    nodes = z0 + np.arange(n) / n
    total = sum(f(z) for z in nodes)
    prev = total / n
    while True:
        if 2 * n > max_points:
            raise NonConvergent(f"trapezoid did not stabilize within {max_points} points")
        mids = z0 + (np.arange(n) + 0.5) / n
        total += sum(f(z) for z in mids)
        n *= 2
        cur = total / n
        err = abs(cur - prev)
        if err <= eps * max(1.0, abs(cur)):
            return complex(cur), n, float(err)
        prev = cur


def fourier_quadrature(quot: JacobiQuotient, spec: QuadratureSpec, ctx: EvalContext) -> QuadratureResult:
    """q^(-ell^2/4m) * integral over [z0, z0+1] of phi(z) e(-ell z), with the pole-path rules.

    A pole on the path (interior or at an endpoint) is handled by averaging
    the lines shifted by +-i*delta; for a periodic integrand the endpoint
    rule's real shift leaves the line unchanged, so both cases coincide.
    """
    m = quot.index
    ell = Fraction(spec.ell)
    if m == 0:
        raise ValueError("index 0 has no Fourier normalization")
    if (ell - m).denominator != 1:
        raise ValueError(f"ell = {ell} must lie in m + Z (m = {m}) for a periodic integrand")
    tau = complex(ctx.tau)
    z0 = complex(spec.z0)
    ellf = float(ell)

    def g(z):
        return quotient_eval(quot, z, ctx) * np.exp(-TWO_PI_I * ellf * z)

    norm = np.exp(TWO_PI_I * tau * (-ellf * ellf / (4 * float(m))))
    on_line = poles_on_line(quot, z0, tau)
    if not on_line:
        val, n, err = trapezoid_periodic(g, z0, spec.n_points, ctx.eps)
        return QuadratureResult(norm * val, n, err, "straight")
    rule = "interior"
    for lam, mu in on_line:
        offset = z0.real - float(lam) * tau.real - float(mu)
        if abs(offset - round(offset)) < 1e-12:
            rule = "endpoint"
    delta = spec.deform_delta
    # the shifted lines must not cross another row of poles
    gap = min(
        (abs(z0.imag - (float(lam) + j) * tau.imag)
         for (lam, _), o in quot.zero_classes().items() if o < 0 for j in range(-3, 4)
         if abs(z0.imag - (float(lam) + j) * tau.imag) > 1e-12),
        default=math.inf,
    )
    if delta >= gap:
        delta = gap / 4
    vals = []
    for d in (delta, delta / 2):
        up, n1, e1 = trapezoid_periodic(g, z0 + 1j * d, spec.n_points, ctx.eps)
        dn, n2, e2 = trapezoid_periodic(g, z0 - 1j * d, spec.n_points, ctx.eps)
        vals.append(((up + dn) / 2, max(n1, n2), max(e1, e2)))
    (v1, n, err), (v2, _, _) = vals
    return QuadratureResult(norm * v1, n, err, rule, float(abs(norm * (v1 - v2))))
