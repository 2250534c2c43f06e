"""Theta quotients prod theta(z + a tau + b)^e and their pole inventories."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .gaussian import frac_str
from .series import QZSeries


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Pole:
    lam: Fraction
    mu: Fraction
    order: int

    def point(self, tau: complex) -> complex:
        return float(self.lam) * tau + float(self.mu)


@dataclass(frozen=True)
class PoleInventory:
    """Poles of a quotient inside P_z0 = z0 + [0,1) tau + [0,1)."""

    z0: tuple[Fraction, Fraction]
    representatives: tuple[Pole, ...]

    def to_json(self) -> dict:
        return {
            "z0": {"lambda": frac_str(self.z0[0]), "mu": frac_str(self.z0[1])},
            "poles": [
                {"lambda": frac_str(p.lam), "mu": frac_str(p.mu), "order": p.order}
                for p in self.representatives
            ],
        }


class BoundaryPole(ValueError):
    pass


@dataclass(frozen=True)
class JacobiQuotient:
    """phi(z) = prod theta(z + a tau + b)^e over ``factors = ((a, b, e), ...)``.

    The elliptic law holds with index m = sum(e)/2 provided sum(e*a) = 0 and
    2*sum(e*b) is an integer; the parity is then eps = sum(e) + 2*sum(e*b) mod 2.
    """

    factors: tuple[tuple[Fraction, Fraction, int], ...]
    numerator: QZSeries | None = field(default=None, compare=False, repr=False)
    name: str = ""

    def __post_init__(self):
        fs = tuple((_frac(a), _frac(b), int(e)) for a, b, e in self.factors if e)
        object.__setattr__(self, "factors", fs)
        if sum(e * a for a, b, e in fs) != 0:
            raise ValueError("sum of exponent * tau-shift must vanish for an elliptic law")
        if (2 * sum(e * b for a, b, e in fs)).denominator != 1:
            raise ValueError("2 * sum of exponent * real shift must be an integer")

    @classmethod
    def kac_wakimoto(cls, M: int, N: int, numerator=None) -> JacobiQuotient:
        factors = []
        if M:
            factors.append((Fraction(0), Fraction(1, 2), M))
        factors.append((Fraction(0), Fraction(0), -N))
        return cls(tuple(factors), numerator=numerator, name=f"phi_{M},{N}")

    @classmethod
    def parse(cls, text: str) -> JacobiQuotient:
        """Parse "a:b:e;a:b:e" (one factor theta(z + a tau + b)^e per item)."""
        factors = []
        for item in text.split(";"):
            a, b, e = item.split(":")
            factors.append((Fraction(a), Fraction(b), int(e)))
        return cls(tuple(factors), name=text)

    @property
    def index(self) -> Fraction:
        return Fraction(sum(e for _, _, e in self.factors), 2)

    @property
    def eps(self) -> int:
        total = sum(e for _, _, e in self.factors) + 2 * sum(e * b for _, b, e in self.factors)
        return int(total) % 2

    def label(self) -> str:
        return self.name or ";".join(f"{a}:{b}:{e}" for a, b, e in self.factors)

    def zero_classes(self) -> dict[tuple[Fraction, Fraction], int]:
        """Net vanishing order at each lattice class (negative = pole)."""
        orders: dict[tuple[Fraction, Fraction], int] = {}
        for a, b, e in self.factors:
            key = ((-a) % 1, (-b) % 1)
            orders[key] = orders.get(key, 0) + e
        return {k: v for k, v in orders.items() if v}

    def pole_inventory(self, z0=(Fraction(-1, 2), Fraction(-1, 2))) -> PoleInventory:
        """Representatives of the poles inside P_z0; z0 is (lambda, mu) with z0 = lambda tau + mu."""
        lam0, mu0 = _frac(z0[0]), _frac(z0[1])
        reps = []
        for (lam, mu), order in sorted(self.zero_classes().items()):
            if order >= 0:
                continue
            if (lam - lam0).denominator == 1 or (mu - mu0).denominator == 1:
                raise BoundaryPole(f"pole at {lam} tau + {mu} lies on the boundary of P_z0")
            lam_r = lam - math.floor(lam - lam0)
            mu_r = mu - math.floor(mu - mu0)
            reps.append(Pole(lam_r, mu_r, -order))
        return PoleInventory((lam0, mu0), tuple(reps))

    def to_json(self) -> dict:
        return {
            "factors": [{"a": frac_str(a), "b": frac_str(b), "e": e} for a, b, e in self.factors],
            "index": frac_str(self.index),
            "eps": self.eps,
        }
