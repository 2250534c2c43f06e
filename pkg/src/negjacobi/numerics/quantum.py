"""Radial limits toward rationals, cocycle probes, and partial theta reduction."""
from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import NonStable
from .evaluate import TWO_PI_I, EvalContext, _outward, eta_eval, partial_theta_eval


def approach_sequence(t0: float = 0.02, levels: int = 6, x=None) -> list[float]:
    """t_j = t0 * 2^-j for j = 0..levels-1; t0 is divided by k^2 when x = h/k is given.

    The expansion in powers of t only takes over once t is small against 1/k^2.
    """
    if x is not None:
        t0 /= Fraction(x).denominator ** 2
    return [t0 * 2.0 ** -j for j in range(levels)]


def richardson(values: list[complex]) -> list[complex]:
    """Diagonal of the Richardson table for samples at t, t/2, t/4, ... (error in powers of t)."""
    table = [list(values)]
    diag = [values[0]]
    for k in range(1, len(values)):
        prev = table[-1]
        f = 2.0 ** k
        row = [(f * prev[i + 1] - prev[i]) / (f - 1) for i in range(len(prev) - 1)]
        table.append(row)
        diag.append(row[0])
    return diag


@dataclass(frozen=True)
class RadialLimit:
    x: Fraction
    ts: tuple[float, ...]
    values: tuple[complex, ...]
    extrapolants: tuple[complex, ...]
    limit: complex
    stability: float


def _check_ts(ts):
    if not ts or any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
        raise ValueError("approach_ts must be positive and strictly decreasing")
    ratios = {round(a / b, 12) for a, b in zip(ts, ts[1:])}
    if ratios != {2.0} and len(ts) > 1:
        raise ValueError("approach_ts must halve at each step")


def radial_limit(f, x, approach_ts=None, tol: float = 1e-5) -> RadialLimit:
    """Richardson-extrapolated limit of f(x + i t) as t -> 0+.

    ``stability`` is the gap between the last two extrapolants; NonStable is
    raised when it exceeds ``tol``.
    """
    x = Fraction(x)
    ts = tuple(approach_ts or approach_sequence(x=x))
    _check_ts(ts)
    values = tuple(complex(f(float(x) + 1j * t)) for t in ts)
    diag = richardson(list(values))
    stability = abs(diag[-1] - diag[-2]) if len(diag) > 1 else math.inf
    if not stability <= tol:
        raise NonStable(f"extrapolants at x = {x} differ by {stability:.3g}")
    return RadialLimit(x, ts, values, tuple(diag), diag[-1], stability)


def theta_plus_at(ell, eps: int, M, lam=0, mu=0):
    """tau -> theta^+_{ell,eps,M}(lam tau + mu; tau)."""
    lam, mu = float(lam), float(mu)

    def f(tau):
        ctx = EvalContext(tau, cutoff=200000)
        return partial_theta_eval(ell, eps, M, lam * tau + mu, ctx)

    return f


def eta_function(tau):
    return eta_eval(tau, EvalContext(tau, cutoff=200000))


# ---------------------------------------------------------------------------
# cocycles


@dataclass(frozen=True)
class CocycleProbe:
    gamma: tuple[int, int, int, int]
    sample_xs: tuple[Fraction, ...]
    approach_ts: tuple[float, ...] | None = None
    weight_k: Fraction = Fraction(1, 2)

    def __post_init__(self):
        a, b, c, d = self.gamma
        if a * d - b * c != 1:
            raise ValueError("gamma must have determinant 1")
        if self.approach_ts is not None:
            _check_ts(self.approach_ts)


@dataclass(frozen=True)
class CocycleRow:
    x: Fraction
    t: float
    value: complex
    extrapolant: complex
    diff1: float | None
    diff2: float | None


def _mobius(gamma, x: Fraction):
    a, b, c, d = gamma
    den = c * x + d
    if den == 0:
        return None
    return (a * x + b) / den


def cocycle_probe(probe: CocycleProbe, f, tol: float = 1e-5) -> list[CocycleRow]:
    """r(x) = f(x) - (cx + d)^(-k) f(gamma x) from radial limits, with finite differences.

    Exploratory: returns the table; nothing is asserted about smoothness.
    """
    a, b, c, d = probe.gamma
    xs = sorted(Fraction(x) for x in probe.sample_xs)
    k = float(probe.weight_k)
    results = []
    for x in xs:
        lim = radial_limit(f, x, probe.approach_ts, tol)
        gx = _mobius(probe.gamma, x)
        if gx is None:
            raise ValueError(f"gamma sends x = {x} to infinity")
        other = lim.limit if gx == x else radial_limit(f, gx, probe.approach_ts, tol).limit
        factor = complex(c * x + d) ** (-k)
        results.append((x, lim, lim.limit - factor * other))
    rs = [r for _, _, r in results]
    rows = []
    for i, (x, lim, r) in enumerate(results):
        d1 = abs(rs[i + 1] - rs[i]) if i + 1 < len(rs) else None
        d2 = abs(rs[i + 1] - 2 * rs[i] + rs[i - 1]) if 0 < i < len(rs) - 1 else None
        for t, v in zip(lim.ts, lim.values):
            rows.append(CocycleRow(x, t, v, r, d1, d2))
    return rows


def _g17(v) -> str:
    return "" if v is None else format(v, ".17g")


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["x", "t", "value_re", "value_im", "extrapolant_re", "extrapolant_im", "diff1", "diff2"])
    for r in rows:
        w.writerow([str(r.x), _g17(r.t), _g17(r.value.real), _g17(r.value.imag),
                    _g17(r.extrapolant.real), _g17(r.extrapolant.imag), _g17(r.diff1), _g17(r.diff2)])
    return buf.getvalue()


def radial_rows(lim: RadialLimit) -> list[CocycleRow]:
    return [CocycleRow(lim.x, t, v, e, None, None) for t, v, e in zip(lim.ts, lim.values, lim.extrapolants)]


# ---------------------------------------------------------------------------
# reduction to sum (-1)^(n eps') q^(M (n + a/b)^2)


@dataclass(frozen=True)
class StandardForm:
    """theta^+ at z = lam tau + mu equals e(phase) q^q_power sum_n (-1)^(n eps') q^(scale (n + shift)^2).

    Replacing tau by tau/scale turns the sum into the form with q^((n + shift)^2).
    """

    shift: Fraction
    q_power: Fraction
    phase: Fraction
    eps_prime: int
    scale: Fraction

    def evaluate(self, tau: complex, ctx: EvalContext | None = None) -> complex:
        ctx = ctx or EvalContext(tau, cutoff=200000)
        sh, sc = float(self.shift), float(self.scale)

        def term(n):
            return (-1) ** (n * self.eps_prime) * cmath.exp(TWO_PI_I * tau * sc * (n + sh) ** 2)

        total, _ = _outward(term, ctx)
        return cmath.exp(TWO_PI_I * (float(self.phase) + float(self.q_power) * tau)) * total


def reduce_partial_theta_standard(ell, eps: int, M, z) -> StandardForm:
    """Complete the square in the exponent of theta^+ at z = lam tau + mu."""
    ell, M = Fraction(ell), Fraction(M)
    lam, mu = Fraction(z[0]), Fraction(z[1])
    twist = 4 * M * mu
    if twist.denominator != 1:
        raise ValueError("e(2 M mu n) is not a sign, so no standard form with a (-1)^n twist exists")
    eps_prime = (eps + int(twist)) % 2
    shift = lam - ell / (2 * M)
    return StandardForm(shift, -M * lam * lam, (-mu * ell) % 1, eps_prime, M)
