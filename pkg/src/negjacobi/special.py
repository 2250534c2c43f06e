"""Exact constructors for theta, eta, Appell-Lerch sums, partial theta and friends."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import NoConsistentFit, PrecisionUnreachable, WindowTooSmall
from .gaussian import I, ONE, GaussianRational, e_quarter, frac_str
from .series import INF, QZSeries, _geometric, pochhammer

HALF = Fraction(1, 2)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# theta, eta, D


def theta_series(precision) -> QZSeries:
    """Jacobi theta from its product form, exact to ``precision``."""
    P = _frac(precision)
    rel = P - Fraction(1, 8)
    if rel <= 0:
        return QZSeries.zero(P)
    prod = pochhammer(1, 0, 1, None, rel)
    prod = prod * pochhammer(0, 1, 1, None, rel)
    prod = prod * pochhammer(1, -1, 1, None, rel)
    return prod.mul_monomial(-I, Fraction(1, 8), -HALF)


def theta_sum_form(precision) -> QZSeries:
    """sum over nu in 1/2+Z of i (-1)^(nu-1/2) q^(nu^2/2) zeta^nu (triple-product side)."""
    P = _frac(precision)
    terms = {}
    k = 0
    while True:
        nu = k + HALF
        e = nu * nu / 2
        if e >= P:
            break
        for v in (nu, -nu):
            sign = 1 if int(v - HALF) % 2 == 0 else -1
            terms[(e, v)] = I * sign
        k += 1
    return QZSeries(terms, P)


def eta_and_D(precision):
    """Return (eta, D) with eta = q^(1/24)(q)_inf and D = -1/2 + sum q^n/(1-q^n)."""
    P = _frac(precision)
    eta = pochhammer(1, 0, 1, None, P - Fraction(1, 24)).mul_monomial(1, Fraction(1, 24))
    D = QZSeries.monomial(Fraction(-1, 2)).with_prec(P)
    n = 1
    while n < P:
        D = D + _lambert_term(n, P)
        n += 1
    return eta, D


def _lambert_term(n: int, P) -> QZSeries:
    # q^n / (1 - q^n) = sum_{t>=1} q^{n t}
    terms = {}
    t = 1
    while n * t < P:
        terms[(Fraction(n * t), Fraction(0))] = 1
        t += 1
    return QZSeries(terms, P)


# ---------------------------------------------------------------------------
# partial theta and congruence theta series


def partial_theta(ell, eps: int, M, precision) -> QZSeries:
    """sum_{n>=0} (-1)^(n eps) q^((2Mn-ell)^2/4M) zeta^(2Mn-ell), truncated at ``precision``."""
    ell = _frac(ell)
    M = _frac(M)
    P = _frac(precision)
    if M <= 0:
        raise ValueError("M must be positive")
    terms = {}
    n = 0
    while True:
        s = 2 * M * n - ell
        e = s * s / (4 * M)
        if e >= P and s > 0:
            break
        if e < P:
            terms[(e, s)] = -1 if (eps and n % 2) else 1
        n += 1
    return QZSeries(terms, P)


def theta_vv(m: int, ell: int, precision) -> QZSeries:
    """sum over n = ell (mod 2m) of q^(n^2/4m) zeta^n."""
    if m <= 0:
        raise ValueError("m must be a positive integer")
    P = _frac(precision)
    r = ell % (2 * m)
    terms = {}
    bound = math.isqrt(int(4 * m * P)) + 2 * m + 1
    for n in range(-bound, bound + 1):
        if (n - r) % (2 * m):
            continue
        e = Fraction(n * n, 4 * m)
        if e < P:
            terms[(e, Fraction(n))] = 1
    return QZSeries(terms, P)


# ---------------------------------------------------------------------------
# Appell-Lerch sums


@dataclass(frozen=True)
class AppellTerm:
    coeff: GaussianRational
    q_exp: Fraction
    z_exp: Fraction
    pole_k: int
    pole_order: int

    def to_json(self) -> dict:
        return {
            "coeff": self.coeff.to_json(),
            "q_exp": frac_str(self.q_exp),
            "z_exp": frac_str(self.z_exp),
            "pole_k": self.pole_k,
            "pole_order": self.pole_order,
        }

    @classmethod
    def from_json(cls, d) -> AppellTerm:
        return cls(
            GaussianRational.from_json(d["coeff"]),
            Fraction(d["q_exp"]),
            Fraction(d["z_exp"]),
            int(d["pole_k"]),
            int(d["pole_order"]),
        )


@dataclass(frozen=True)
class AppellJet:
    """Finite sum of ``coeff q^a zeta^b (1 - q^k zeta)^(-j)`` terms.

    Represents one derivative ``D_v^d F_{M,eps}(z, v)`` at ``v = 0``; the
    bilateral n-sum is cut at ``|n| <= trunc_K``, and every omitted term has
    q-valuation at least ``prec`` once its pole factor is expanded.
    """

    M: Fraction
    eps: int
    order: int
    trunc_K: int
    prec: Fraction
    terms: tuple[AppellTerm, ...] = field(repr=False)

    def scaled(self, c) -> AppellJet:
        c = GaussianRational.coerce(c)
        terms = tuple(
            AppellTerm(t.coeff * c, t.q_exp, t.z_exp, t.pole_k, t.pole_order) for t in self.terms
        )
        return AppellJet(self.M, self.eps, self.order, self.trunc_K, self.prec, terms)

    def evaluate(self, tau: complex, z: complex) -> complex:
        two_pi_i = 2j * math.pi
        zeta = cmath.exp(two_pi_i * z)
        total = 0j
        for t in self.terms:
            val = complex(t.coeff) * cmath.exp(two_pi_i * (t.q_exp * tau + t.z_exp * z))
            if t.pole_order:
                val /= (1 - cmath.exp(two_pi_i * t.pole_k * tau) * zeta) ** t.pole_order
            total += val
        return total

    def to_json(self) -> dict:
        return {
            "M": frac_str(self.M),
            "eps": self.eps,
            "order": self.order,
            "trunc_K": self.trunc_K,
            "prec": frac_str(self.prec),
            "terms": [t.to_json() for t in self.terms],
        }

    @classmethod
    def from_json(cls, d) -> AppellJet:
        return cls(
            Fraction(d["M"]),
            int(d["eps"]),
            int(d.get("order", 0)),
            int(d["trunc_K"]),
            Fraction(d["prec"]),
            tuple(AppellTerm.from_json(t) for t in d["terms"]),
        )


def appell_derivative_poly(a, d: int) -> dict[int, Fraction]:
    """Coefficients c_j with D_v^d [w^a (1-t)^(-1)] = w^a sum_j c_j (1-t)^(-j), t = q^n zeta / w.

    Uses D_v w^a = a w^a and D_v (1-t)^(-j) = -j (1-t)^(-j-1) + j (1-t)^(-j).
    """
    a = _frac(a)
    poly = {1: Fraction(1)}
    for _ in range(d):
        nxt: dict[int, Fraction] = {}
        for j, c in poly.items():
            nxt[j] = nxt.get(j, 0) + (a + j) * c
            nxt[j + 1] = nxt.get(j + 1, 0) - j * c
        poly = {j: c for j, c in nxt.items() if c}
    return poly


def appell_cutoff(M, precision) -> int:
    """Least K such that every n-term with |n| > K has valuation >= precision."""
    M = _frac(M)
    P = _frac(precision)
    if M <= 0:
        raise PrecisionUnreachable("the level must be positive for the n-sum to converge")
    K = 0
    while True:
        n = K + 1
        if M * n * (n + 1) >= P and M * n * (n - 1) + n >= P:
            return K
        K += 1


def appell_F_jet(M, eps: int, jet_order: int, precision) -> list[AppellJet]:
    """[D_v^d F_{M,eps}(z, v) at v = 0 for d = 0..jet_order] as exact AppellJets."""
    M = _frac(M)
    if jet_order < 0:
        raise ValueError("jet_order must be nonnegative")
    if (2 * M).denominator != 1:
        raise ValueError("M must be a half-integer")
    P = _frac(precision)
    K = appell_cutoff(M, P)
    jets = []
    for d in range(jet_order + 1):
        terms = []
        for n in range(-K, K + 1):
            sign = -1 if (eps and n % 2) else 1
            poly = appell_derivative_poly(-M * (2 * n + 1), d)
            for j in sorted(poly):
                terms.append(
                    AppellTerm(
                        GaussianRational(poly[j] * sign),
                        M * n * (n + 1),
                        M,
                        n,
                        j,
                    )
                )
        jets.append(AppellJet(M, eps, d, K, P, tuple(terms)))
    return jets


# ---------------------------------------------------------------------------
# Kac-Wakimoto characters


@dataclass(frozen=True)
class KacWakimotoSpec:
    M: int
    N: int

    def __post_init__(self):
        if self.M < 0 or self.N < 1:
            raise ValueError(f"need M >= 0 and N >= 1, got (M, N) = ({self.M}, {self.N})")
        if self.M >= self.N:
            raise ValueError(f"need M < N for negative index, got (M, N) = ({self.M}, {self.N})")

    @property
    def index(self) -> Fraction:
        return Fraction(self.M - self.N, 2)

    @property
    def eps(self) -> int:
        return self.N % 2

    @property
    def level(self) -> Fraction:
        """-m = (N - M)/2, the Appell level used in the decomposition."""
        return Fraction(self.N - self.M, 2)

    def label(self) -> str:
        return f"{self.M},{self.N}"


def phi_MN_build(spec: KacWakimotoSpec, precision=None):
    """phi_{M,N} = theta(z+1/2)^M / theta(z)^N as a quotient descriptor."""
    from .quotient import JacobiQuotient

    numerator = None
    if precision is not None:
        numerator = theta_series(precision).shift_z(0, HALF) ** spec.M
    return JacobiQuotient.kac_wakimoto(spec.M, spec.N, numerator=numerator)


# ---------------------------------------------------------------------------
# rank and crank


def crank_rank(which: str, precision, zeta_window: int = 40) -> QZSeries:
    P = _frac(precision)
    if which == "crank":
        out = pochhammer(1, 0, 1, None, P)
        for j in range(1, math.ceil(P)):
            out = out * _geometric(j, 1, 1, P) * _geometric(j, -1, 1, P)
    elif which == "rank":
        out = QZSeries.zero(P)
        n = 0
        while n * n < P:
            rel = P - n * n
            term = QZSeries.one().with_prec(rel)
            for j in range(1, n + 1):
                term = term * _geometric(j, 1, 1, rel) * _geometric(j, -1, 1, rel)
            out = out + term.mul_monomial(1, n * n)
            n += 1
    else:
        raise ValueError("which must be 'crank' or 'rank'")
    widest = out.max_abs_zeta()
    if widest > zeta_window:
        raise WindowTooSmall(f"zeta-exponent {widest} exceeds the window {zeta_window}")
    return out


# ---------------------------------------------------------------------------
# Kontsevich's F and the sum of tails


def kontsevich_at_root(h: int, k: int):
    """F(e(h/k)) = sum_{n<k} (q)_n at q = e(h/k); exact when e(h/k) is a power of i."""
    if k <= 0 or gcd(h, k) != 1:
        raise ValueError("need k > 0 and gcd(h, k) = 1")
    if 4 % k == 0:
        q = e_quarter(h * (4 // k))
        total = GaussianRational(0)
        poch = ONE
        qn = ONE
        for n in range(k):
            total = total + poch
            qn = qn * q
            poch = poch * (ONE - qn)
        return total
    q = cmath.exp(2j * math.pi * h / k)
    total = 0j
    poch = 1 + 0j
    for n in range(k):
        total += poch
        poch *= 1 - q ** (n + 1)
    return total


def chi12(n: int) -> int:
    """Kronecker symbol (12/n)."""
    r = n % 12
    if r in (1, 11):
        return 1
    if r in (5, 7):
        return -1
    return 0


def _tails_theta(grading: str, P) -> QZSeries:
    terms = {}
    n = 1
    while True:
        e = Fraction(n * n, 24) if grading == "n^2/24" else Fraction(n * n - 1, 24)
        if e >= P:
            break
        c = n * chi12(n)
        if c:
            terms[(e, Fraction(0))] = c
        n += 1
    return QZSeries(terms, P)


@dataclass
class SumOfTails:
    lhs: QZSeries
    eta_D: QZSeries
    theta_part: QZSeries
    sigma: Fraction
    grading: str
    printed_form_holds: bool
    checked_to: Fraction


def sum_of_tails_sides(precision) -> SumOfTails:
    """Compute both sides of the sum-of-tails identity and fit sign and grading.

    The left side is sum_n (eta - q^(1/24)(q)_n); the right side is
    eta*D + sigma * sum n chi12(n) q^g(n).  Every (sigma, g) pair in
    {+1/2, -1/2} x {n^2/24, (n^2-1)/24} is tried and the first exact match
    is returned.
    """
    P = _frac(precision)
    eta, D = eta_and_D(P)
    qinf = pochhammer(1, 0, 1, None, P)
    lhs = QZSeries.zero(P)
    poch = QZSeries.one()
    n = 0
    while n + 1 + Fraction(1, 24) < P:
        lhs = lhs + (qinf - poch).mul_monomial(1, Fraction(1, 24))
        poch = poch * QZSeries({(0, 0): 1, (n + 1, 0): -1})
        n += 1
    lhs = lhs.truncate(P)
    eta_D = (eta * D).truncate(P)
    fits = []
    for sigma in (Fraction(1, 2), Fraction(-1, 2)):
        for grading in ("n^2/24", "(n^2-1)/24"):
            theta = _tails_theta(grading, P)
            rhs = eta_D + theta.scale(sigma)
            if lhs.agrees_with(rhs, P):
                fits.append((sigma, grading, theta))
    if not fits:
        raise NoConsistentFit("no sign/grading makes the sum-of-tails identity hold")
    sigma, grading, theta = fits[0]
    printed = any(s == Fraction(-1, 2) and g == "(n^2-1)/24" for s, g, _ in fits)
    return SumOfTails(lhs, eta_D, theta, sigma, grading, printed, P)
