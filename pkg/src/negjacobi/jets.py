"""Laurent jets in x = 2 pi i (z - u) with q-series coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import OrderMismatch
from .gaussian import frac_str
from .series import INF, QZSeries
from .special import HALF, KacWakimotoSpec, theta_sum_form


@dataclass(frozen=True)
class Jet:
    """sum_{k=order_lo}^{order_hi} coeffs[k - order_lo] x^k, x = 2 pi i (z - u)."""

    center: tuple[Fraction, Fraction]
    order_lo: int
    coeffs: tuple[QZSeries, ...]

    @property
    def order_hi(self) -> int:
        return self.order_lo + len(self.coeffs) - 1

    def coeff(self, k: int) -> QZSeries:
        if k < self.order_lo or k > self.order_hi:
            raise IndexError(f"x^{k} outside [{self.order_lo}, {self.order_hi}]")
        return self.coeffs[k - self.order_lo]

    @classmethod
    def from_series(cls, series: QZSeries, order_hi: int, vanishing_order: int = 0,
                    center=(Fraction(0), Fraction(0))) -> Jet:
        """Taylor jet at z = 0 of a series with finite zeta-support per q-slice.

        zeta^s = exp(s x), so the x^k coefficient is sum_s c_s s^k / k!.
        ``vanishing_order`` leading coefficients must be exactly zero and are dropped.
        """
        by_power: list[dict] = [dict() for _ in range(order_hi + 1)]
        for (q, s), c in series.items():
            sk = Fraction(1)
            for k in range(order_hi + 1):
                if k:
                    sk *= s
                if not sk:
                    if k:
                        break
                t = by_power[k]
                t[q] = t[q] + c * sk if q in t else c * sk
        coeffs = []
        for k in range(order_hi + 1):
            fk = factorial(k)
            coeffs.append(QZSeries({(q, 0): c / fk for q, c in by_power[k].items()}, series.prec))
        for k in range(vanishing_order):
            if not coeffs[k].is_zero():
                raise OrderMismatch(f"x^{k} coefficient is nonzero; vanishing order is < {vanishing_order}")
        return cls(center, vanishing_order, tuple(coeffs[vanishing_order:]))

    @classmethod
    def constant(cls, value: QZSeries, order_hi: int) -> Jet:
        zero = QZSeries.zero(INF)
        return cls((Fraction(0), Fraction(0)), 0, (value,) + (zero,) * order_hi)

    def __mul__(self, other: Jet) -> Jet:
        lo = self.order_lo + other.order_lo
        hi = min(self.order_hi + other.order_lo, other.order_hi + self.order_lo)
        n = hi - lo + 1
        out = []
        for k in range(n):
            acc = None
            for i in range(k + 1):
                if i >= len(self.coeffs) or k - i >= len(other.coeffs):
                    continue
                term = self.coeffs[i] * other.coeffs[k - i]
                acc = term if acc is None else acc + term
            out.append(acc)
        return Jet(self.center, lo, tuple(out))

    def invert(self) -> Jet:
        lead = self.coeffs[0]
        if lead.is_zero():
            raise OrderMismatch(f"declared leading coefficient at x^{self.order_lo} is zero")
        inv0 = lead.invert()
        n = len(self.coeffs)
        b = [inv0]
        for k in range(1, n):
            acc = None
            for i in range(1, k + 1):
                term = self.coeffs[i] * b[k - i]
                acc = term if acc is None else acc + term
            b.append(-(inv0 * acc))
        return Jet(self.center, -self.order_lo, tuple(b))

    def __pow__(self, n: int) -> Jet:
        if n < 0:
            return self.invert() ** (-n)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        if result is None:
            one = QZSeries.one()
            return Jet(self.center, 0, (one,) + (QZSeries.zero(INF),) * (len(self.coeffs) - 1 + self.order_lo * 0))
        return result

    def min_prec(self):
        return min(c.prec for c in self.coeffs)


def jet_arith(op: str, a: Jet, b=None) -> Jet:
    if op == "multiply":
        return a * b
    if op == "power":
        return a ** b
    if op == "invert":
        return a.invert()
    raise ValueError(f"unknown op {op!r}")


def theta_jet_at_zero(order_hi: int, precision) -> Jet:
    """theta(z) = sum_k a_k x^k around z = 0, returned with the leading x^1 term."""
    return Jet.from_series(theta_sum_form(precision), order_hi, vanishing_order=1)


def theta_jet_at_half(order_hi: int, precision) -> Jet:
    """Taylor jet of theta(z + 1/2) around z = 0 (phases e(nu/2) = +-i)."""
    return Jet.from_series(theta_sum_form(precision).shift_z(0, HALF), order_hi)


@dataclass(frozen=True)
class LaurentData:
    """D[n-1] = D_{n,u}: coefficient of x^(-n) in the Laurent expansion at u."""

    pole_u: tuple[Fraction, Fraction]
    D: tuple[QZSeries, ...]

    @property
    def order(self) -> int:
        return len(self.D)

    def to_json(self) -> dict:
        return {
            "pole": {"lambda": frac_str(self.pole_u[0]), "mu": frac_str(self.pole_u[1])},
            "order": self.order,
            "D": [d.to_json() for d in self.D],
        }

    @classmethod
    def from_json(cls, d) -> LaurentData:
        return cls(
            (Fraction(d["pole"]["lambda"]), Fraction(d["pole"]["mu"])),
            tuple(QZSeries.from_json(x) for x in d["D"]),
        )


def phi_MN_jet(spec: KacWakimotoSpec, order_hi: int | None, precision) -> Jet:
    """Laurent jet of theta(z+1/2)^M / theta(z)^N at z = 0."""
    N, M = spec.N, spec.M
    H = N + 4 if order_hi is None else order_hi
    den = theta_jet_at_zero(H, precision) ** (-N)
    if M == 0:
        return den
    return (theta_jet_at_half(H, precision) ** M) * den


def laurent_coeffs(spec: KacWakimotoSpec, order_hi: int | None = None, precision=10) -> LaurentData:
    """D_{n,0}(tau), n = 1..N, for phi_{M,N}, each exact to at least ``precision``."""
    target = Fraction(precision)
    margin = Fraction(1, 2)
    while True:
        jet = phi_MN_jet(spec, order_hi, target + margin)
        if jet.order_lo != -spec.N:
            raise OrderMismatch(f"pole order {-jet.order_lo} != N = {spec.N}")
        D = tuple(jet.coeff(-n) for n in range(1, spec.N + 1))
        if min(d.prec for d in D) >= target:
            return LaurentData((Fraction(0), Fraction(0)), tuple(d.truncate(target) for d in D))
        margin += 1
