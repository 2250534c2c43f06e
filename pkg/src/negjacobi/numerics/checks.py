"""Numeric cross-checks of the decompositions at general points."""
from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

from ..quotient import JacobiQuotient, PoleInventory
from ..report import Discrepancy, VerificationReport
from .evaluate import (
    DEFAULT_TAU, TWO_PI_I, EvalContext, appell_eval, partial_theta_eval, quotient_eval, quotient_laurent,
)
from .quadrature import QuadratureSpec, fourier_quadrature


def _within(lhs: complex, rhs: complex, tol: float) -> tuple[bool, float]:
    err = float(abs(lhs - rhs))
    return bool(err <= tol * max(1.0, abs(lhs))), err


def _numeric_report(ident, ok, err, tol, lhs, rhs, extra=None) -> VerificationReport:
    consts = {"tolerance": tol, "abs_error": float(f"{err:.3e}")}
    consts.update(extra or {})
    fd = None if ok else Discrepancy(Fraction(0), Fraction(0), complex(lhs), complex(rhs))
    return VerificationReport(ident, ok, None, fd, consts)


def _frac_pair(z0):
    return Fraction(z0[0]), Fraction(z0[1])


def elliptic_law_residual(quot: JacobiQuotient, z: complex, ctx: EvalContext) -> float:
    """Worst relative defect of the elliptic law with the quotient's derived (m, eps)."""
    m, eps = float(quot.index), quot.eps
    tau = ctx.tau
    base = quotient_eval(quot, z, ctx)
    worst = 0.0
    for lam in (-1, 0, 1):
        for mu in (0, 1):
            lhs = quotient_eval(quot, z + lam * tau + mu, ctx)
            sign = (-1) ** ((round(2 * m * mu) + lam * eps) % 2)
            rhs = sign * cmath.exp(-TWO_PI_I * m * (lam * lam * tau + 2 * lam * z)) * base
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return worst


def laurent_table(quot: JacobiQuotient, inventory: PoleInventory, ctx: EvalContext):
    table = []
    for pole in inventory.representatives:
        order, D = quotient_laurent(quot, pole.lam, pole.mu, ctx)
        table.append((pole, D))
    return table


def thm1_rhs_numeric(quot, z, z0, ctx, drop_pole: int | None = None) -> complex:
    inv = quot.pole_inventory(_frac_pair(z0))
    level = -quot.index
    total = 0j
    for idx, (pole, D) in enumerate(laurent_table(quot, inv, ctx)):
        if idx == drop_pole:
            continue
        u = pole.point(ctx.tau)
        for n, d in enumerate(D, start=1):
            total += d / math.factorial(n - 1) * appell_eval(level, quot.eps, z, u, ctx, n - 1)
    return -total


def verify_thm1_numeric(quot: JacobiQuotient, z: complex, z0=(Fraction(-1, 2), Fraction(-1, 2)),
                        ctx: EvalContext | None = None, tol: float = 1e-8,
                        drop_pole: int | None = None) -> VerificationReport:
    """phi(z) against minus the Appell-Lerch side assembled from numeric Laurent data.

    ``z0 = (lam, mu)`` stands for lam*tau + mu; ``drop_pole`` omits one pole's
    contribution (fault injection).
    """
    if quot.index >= 0:
        raise ValueError("the decomposition needs negative index")
    ctx = ctx or EvalContext(DEFAULT_TAU)
    law = elliptic_law_residual(quot, z, ctx)
    lhs = quotient_eval(quot, z, ctx)
    rhs = thm1_rhs_numeric(quot, z, z0, ctx, drop_pole)
    ok, err = _within(lhs, rhs, tol)
    ok = ok and law < 1e-9
    ident = f"thm1-numeric[{quot.label()},tau={ctx.tau},z={z:.6g}]"
    return _numeric_report(ident, ok, err, tol, lhs, rhs, {"elliptic_law_residual": float(f"{law:.3e}")})


def thm2_rhs_numeric(quot, ell, z0, ctx) -> complex:
    inv = quot.pole_inventory(_frac_pair(z0))
    level = -quot.index
    total = 0j
    for pole, D in laurent_table(quot, inv, ctx):
        u = pole.point(ctx.tau)
        for n, d in enumerate(D, start=1):
            total += d / math.factorial(n - 1) * partial_theta_eval(ell, quot.eps, level, u, ctx, n - 1)
    return total


def verify_thm2_numeric(quot: JacobiQuotient, ell, z0=(Fraction(-1, 2), Fraction(-1, 2)),
                        ctx: EvalContext | None = None, tol: float = 1e-7,
                        n_points: int = 32) -> VerificationReport:
    """Quadrature h_{ell,z0} against the partial theta side at the poles in P_z0."""
    ell = Fraction(ell)
    if (ell - quot.index).denominator != 1:
        raise ValueError(f"ell = {ell} must lie in m + Z (m = {quot.index})")
    ctx = ctx or EvalContext(DEFAULT_TAU)
    lam0, mu0 = _frac_pair(z0)
    z0c = float(lam0) * ctx.tau + float(mu0)
    quad = fourier_quadrature(quot, QuadratureSpec(z0c, ell, n_points), ctx)
    rhs = thm2_rhs_numeric(quot, ell, z0, ctx)
    ok, err = _within(quad.value, rhs, tol)
    ident = f"thm2-numeric[{quot.label()},ell={ell},tau={ctx.tau}]"
    return _numeric_report(ident, ok, err, tol, quad.value, rhs, {
        "n_points": quad.n_points, "doubling_error": float(f"{quad.doubling_error:.3e}"),
        "rule": quad.rule,
    })


def contour_residue(M, eps: int, z: complex, ctx: EvalContext, radius: float = 1e-2, n: int = 64) -> complex:
    """Integral of F_{M,eps}(z, u) du over the circle |u - z| = radius."""
    angles = 2 * math.pi * np.arange(n) / n
    total = 0j
    for a in angles:
        w = radius * cmath.exp(1j * a)
        total += appell_eval(M, eps, z, z + w, ctx) * 1j * w
    return total * 2 * math.pi / n


def residue_and_elliptic_check(M, eps: int, ctx: EvalContext, sample_count: int = 5, seed: int = 0,
                               tol_residue: float = 1e-7, tol_law: float = 1e-8) -> VerificationReport:
    M = Fraction(M)
    rng = np.random.default_rng(seed)
    tau = ctx.tau
    worst_res = 0.0
    worst_law = 0.0
    for _ in range(sample_count):
        x, y = rng.uniform(0.1, 0.9, 2)
        z = x + y * tau
        for r in (1e-2, 5e-3):
            worst_res = max(worst_res, abs(contour_residue(M, eps, z, ctx, r) - 1))
        a, b = rng.uniform(0.1, 0.9, 2)
        u = a + b * tau
        if abs(u - z) < 0.05:
            u += 0.1
        base = appell_eval(M, eps, z, u, ctx)
        for lam in (-1, 0, 1):
            for mu in (0, 1):
                lhs = appell_eval(M, eps, z, u + lam * tau + mu, ctx)
                sign = (-1) ** ((int(2 * M * mu) + lam * eps) % 2)
                rhs = sign * cmath.exp(-TWO_PI_I * float(M) * (lam * lam * tau + 2 * lam * u)) * base
                worst_law = max(worst_law, abs(lhs - rhs) / max(1.0, abs(lhs)))
    ok = worst_res < tol_residue and worst_law < tol_law
    consts = {"residue_error": float(f"{worst_res:.3e}"), "elliptic_error": float(f"{worst_law:.3e}"),
              "tolerance_residue": tol_residue, "tolerance_law": tol_law}
    if not ok:
        consts["error"] = "residue or elliptic law outside tolerance"
    return VerificationReport(f"lemma31[M={M},eps={eps},tau={tau}]", ok, None, None, consts)
