"""Truncated bivariate Puiseux-Laurent series in q and zeta.

A :class:`QZSeries` stores exact Gaussian-rational coefficients of
``q**(qn/q_den) * zeta**(zn/z_den)`` together with a precision ``prec``:
every term with q-exponent below ``prec`` is present and exact, and no
stored term reaches ``prec``.  Exact finite objects carry ``prec = inf``.

Internally the terms are grouped into q-slices, ``{qn: {zn: coeff}}``,
which is the natural layout for the graded convolutions below.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from math import comb, gcd

from .errors import Divergent, NonGaussianPhase, NonUnit, NotDivisible
from .gaussian import ONE, ZERO, GaussianRational, e_quarter, frac_str

INF = math.inf


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _prec(p):
    if p is None or p == INF:
        return INF
    if isinstance(p, float):
        if p == INF:
            return INF
        raise TypeError("precision must be rational or inf")
    return _frac(p)


def _min_prec(*ps):
    return min(ps)


class QZSeries:
    __slots__ = ("q_den", "z_den", "_slices", "prec")

    def __init__(self, terms=None, prec=INF):
        """Build from a mapping ``{(q_exp, z_exp): coeff}`` with rational exponents."""
        terms = dict(terms or {})
        q_den = 1
        z_den = 1
        for (qe, ze) in terms:
            q_den = _lcm(q_den, _frac(qe).denominator)
            z_den = _lcm(z_den, _frac(ze).denominator)
        slices: dict[int, dict[int, GaussianRational]] = {}
        for (qe, ze), c in terms.items():
            qn = int(_frac(qe) * q_den)
            zn = int(_frac(ze) * z_den)
            row = slices.setdefault(qn, {})
            row[zn] = row.get(zn, ZERO) + GaussianRational.coerce(c)
        self._set(q_den, z_den, slices, _prec(prec))

    # construction helpers -------------------------------------------------

    def _set(self, q_den, z_den, slices, prec):
        limit = None if prec == INF else prec * q_den
        clean = {}
        for qn, row in slices.items():
            if limit is not None and qn >= limit:
                continue
            row = {zn: c for zn, c in row.items() if c}
            if row:
                clean[qn] = row
        # reduce the exponent denominators to lowest terms
        gq = q_den
        gz = z_den
        for qn, row in clean.items():
            gq = gcd(gq, qn)
            for zn in row:
                gz = gcd(gz, zn)
        if gq > 1 or gz > 1:
            clean = {qn // gq: {zn // gz: c for zn, c in row.items()} for qn, row in clean.items()}
            q_den //= gq
            z_den //= gz
        self.q_den = q_den
        self.z_den = z_den
        self._slices = clean
        self.prec = prec

    @classmethod
    def _raw(cls, q_den, z_den, slices, prec) -> QZSeries:
        obj = cls.__new__(cls)
        obj._set(q_den, z_den, slices, prec)
        return obj

    @classmethod
    def monomial(cls, coeff=1, q=0, z=0, prec=INF) -> QZSeries:
        return cls({(_frac(q), _frac(z)): coeff}, prec)

    @classmethod
    def zero(cls, prec=INF) -> QZSeries:
        return cls({}, prec)

    @classmethod
    def one(cls) -> QZSeries:
        return cls.monomial(1)

    # inspection -----------------------------------------------------------

    def items(self):
        """Terms as ``((q_exp, z_exp), coeff)`` sorted by (q, z)."""
        out = []
        for qn in sorted(self._slices):
            row = self._slices[qn]
            for zn in sorted(row):
                out.append(((Fraction(qn, self.q_den), Fraction(zn, self.z_den)), row[zn]))
        return out

    def coeff(self, q, z=0) -> GaussianRational:
        qn = _frac(q) * self.q_den
        zn = _frac(z) * self.z_den
        if qn.denominator != 1 or zn.denominator != 1:
            return ZERO
        return self._slices.get(int(qn), {}).get(int(zn), ZERO)

    def __len__(self):
        return sum(len(r) for r in self._slices.values())

    def is_zero(self) -> bool:
        return not self._slices

    @property
    def valuation(self):
        """Least q-exponent present, or ``prec`` when no term is known to be nonzero."""
        if not self._slices:
            return self.prec
        return Fraction(min(self._slices), self.q_den)

    def q_exponents(self) -> list[Fraction]:
        return [Fraction(qn, self.q_den) for qn in sorted(self._slices)]

    def zeta_exponents(self) -> list[Fraction]:
        zs = set()
        for row in self._slices.values():
            zs.update(row)
        return [Fraction(zn, self.z_den) for zn in sorted(zs)]

    def is_zeta_free(self) -> bool:
        return all(set(row) == {0} for row in self._slices.values())

    def max_abs_zeta(self) -> Fraction:
        zs = self.zeta_exponents()
        return max((abs(s) for s in zs), default=Fraction(0))

    # equality / comparison --------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, QZSeries):
            return NotImplemented
        return (
            self.prec == other.prec
            and self.q_den == other.q_den
            and self.z_den == other.z_den
            and self._slices == other._slices
        )

    __hash__ = None

    def first_difference(self, other: QZSeries, upto=None):
        """Lowest (q, z) where the two series differ below ``upto``.

        ``upto`` defaults to the smaller of the two precisions.  Returns
        ``None`` or a tuple ``(q, z, self_coeff, other_coeff)``.
        """
        if upto is None:
            upto = _min_prec(self.prec, other.prec)
        diff = (self - other).truncate(upto)
        if diff.is_zero():
            return None
        (q, z), _ = diff.items()[0]
        return q, z, self.coeff(q, z), other.coeff(q, z)

    def agrees_with(self, other: QZSeries, upto=None) -> bool:
        return self.first_difference(other, upto) is None

    # ring operations --------------------------------------------------------

    def _rescaled(self, q_den, z_den):
        fq = q_den // self.q_den
        fz = z_den // self.z_den
        if fq == 1 and fz == 1:
            return self._slices
        return {qn * fq: {zn * fz: c for zn, c in row.items()} for qn, row in self._slices.items()}

    def truncate(self, prec) -> QZSeries:
        prec = _min_prec(self.prec, _prec(prec))
        return QZSeries._raw(self.q_den, self.z_den, self._slices, prec)

    def with_prec(self, prec) -> QZSeries:
        """Same terms, precision overridden (caller vouches for the new bound)."""
        return QZSeries._raw(self.q_den, self.z_den, self._slices, _prec(prec))

    def __add__(self, other):
        if not isinstance(other, QZSeries):
            try:
                other = QZSeries.monomial(GaussianRational.coerce(other))
            except TypeError:
                return NotImplemented
        qd = _lcm(self.q_den, other.q_den)
        zd = _lcm(self.z_den, other.z_den)
        a = self._rescaled(qd, zd)
        b = other._rescaled(qd, zd)
        out = {qn: dict(row) for qn, row in a.items()}
        for qn, row in b.items():
            dst = out.setdefault(qn, {})
            for zn, c in row.items():
                dst[zn] = dst[zn] + c if zn in dst else c
        return QZSeries._raw(qd, zd, out, _min_prec(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return QZSeries._raw(
            self.q_den, self.z_den,
            {qn: {zn: -c for zn, c in row.items()} for qn, row in self._slices.items()},
            self.prec,
        )

    def __sub__(self, other):
        if not isinstance(other, QZSeries):
            try:
                other = QZSeries.monomial(GaussianRational.coerce(other))
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> QZSeries:
        c = GaussianRational.coerce(c)
        if not c:
            return QZSeries.zero(self.prec)
        return QZSeries._raw(
            self.q_den, self.z_den,
            {qn: {zn: v * c for zn, v in row.items()} for qn, row in self._slices.items()},
            self.prec,
        )

    def mul_monomial(self, coeff, q=0, z=0) -> QZSeries:
        """Multiply by the exact monomial ``coeff * q**q * zeta**z`` (cheap shift)."""
        q = _frac(q)
        z = _frac(z)
        qd = _lcm(self.q_den, q.denominator)
        zd = _lcm(self.z_den, z.denominator)
        dq = int(q * qd)
        dz = int(z * zd)
        c = GaussianRational.coerce(coeff)
        src = self._rescaled(qd, zd)
        if c == ONE:
            out = {qn + dq: {zn + dz: v for zn, v in row.items()} for qn, row in src.items()}
        else:
            out = {qn + dq: {zn + dz: v * c for zn, v in row.items()} for qn, row in src.items()}
        prec = self.prec if self.prec == INF else self.prec + q
        return QZSeries._raw(qd, zd, out, prec)

    def __mul__(self, other):
        if not isinstance(other, QZSeries):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        return _convolve(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.invert() ** (-n)
        result = QZSeries.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def invert(self) -> QZSeries:
        return series_invert(self)

    # structural operations --------------------------------------------------

    def apply_D(self, which: str) -> QZSeries:
        return apply_D(which, self)

    def shift_z(self, lam, mu) -> QZSeries:
        return shift_z(self, lam, mu)

    def extract_zeta(self, s) -> QZSeries:
        return extract_zeta(self, s)

    def div_pole(self, k: int, j: int = 1) -> QZSeries:
        return exact_div_pole(self, k, j)

    def at_zeta_one(self) -> QZSeries:
        """Specialize zeta = 1 (z = 0); each q-slice collapses to one coefficient."""
        out = {}
        for qn, row in self._slices.items():
            total = ZERO
            for c in row.values():
                total = total + c
            if total:
                out[qn] = {0: total}
        return QZSeries._raw(self.q_den, 1, out, self.prec)

    def zeta_inverse(self) -> QZSeries:
        """Substitute zeta -> 1/zeta."""
        return QZSeries._raw(
            self.q_den, self.z_den,
            {qn: {-zn: c for zn, c in row.items()} for qn, row in self._slices.items()},
            self.prec,
        )

    def evaluate(self, tau: complex, z: complex = 0.0) -> complex:
        """Numeric value with q = e(tau), zeta**s = e(s z)."""
        total = 0j
        two_pi_i = 2j * math.pi
        for qn, row in self._slices.items():
            qa = cmath.exp(two_pi_i * tau * qn / self.q_den)
            acc = 0j
            for zn, c in row.items():
                acc += complex(c) * cmath.exp(two_pi_i * z * zn / self.z_den)
            total += qa * acc
        return total

    # serialization ------------------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        for qn in sorted(self._slices):
            row = self._slices[qn]
            for zn in sorted(row):
                c = row[zn]
                terms.append({"qn": qn, "zn": zn, "re": frac_str(c.re), "im": frac_str(c.im)})
        return {
            "q_den": self.q_den,
            "z_den": self.z_den,
            "prec": "inf" if self.prec == INF else frac_str(self.prec),
            "terms": terms,
        }

    @classmethod
    def from_json(cls, d) -> QZSeries:
        slices: dict[int, dict[int, GaussianRational]] = {}
        for t in d["terms"]:
            slices.setdefault(int(t["qn"]), {})[int(t["zn"])] = GaussianRational(
                Fraction(t["re"]), Fraction(t["im"])
            )
        prec = INF if d["prec"] == "inf" else Fraction(d["prec"])
        return cls._raw(int(d["q_den"]), int(d["z_den"]), slices, prec)

    def __repr__(self):
        shown = []
        for (q, z), c in self.items()[:6]:
            shown.append(f"{c}*q^{q}*z^{z}")
        more = "" if len(self) <= 6 else " + ..."
        tail = "" if self.prec == INF else f" + O(q^{self.prec})"
        return "QZSeries(" + (" + ".join(shown) or "0") + more + tail + ")"


# ---------------------------------------------------------------------------
# kernels


def _split(row):
    """Slice as parallel lists (zn, re, im); im list is None for real slices."""
    zs = list(row)
    res = [row[z].re for z in zs]
    ims = [row[z].im for z in zs]
    if not any(ims):
        ims = None
    return zs, res, ims


def _convolve(a: QZSeries, b: QZSeries) -> QZSeries:
    qd = _lcm(a.q_den, b.q_den)
    zd = _lcm(a.z_den, b.z_den)
    prec = _min_prec(a.prec + b.valuation, b.prec + a.valuation)
    if a.is_zero() or b.is_zero():
        return QZSeries.zero(prec)
    sa = a._rescaled(qd, zd)
    sb = b._rescaled(qd, zd)
    limit = None if prec == INF else prec * qd
    rows_b = [(qn, _split(row)) for qn, row in sorted(sb.items())]
    acc_re: dict[int, dict[int, object]] = {}
    acc_im: dict[int, dict[int, object]] = {}
    for qa in sorted(sa):
        za_list, ra_list, ia_list = _split(sa[qa])
        for qb, (zb_list, rb_list, ib_list) in rows_b:
            qn = qa + qb
            if limit is not None and qn >= limit:
                break
            dre = acc_re.setdefault(qn, {})
            if ia_list is None and ib_list is None:
                for za, ra in zip(za_list, ra_list):
                    for zb, rb in zip(zb_list, rb_list):
                        k = za + zb
                        dre[k] = dre.get(k, 0) + ra * rb
                continue
            dim = acc_im.setdefault(qn, {})
            ia_l = ia_list or [0] * len(za_list)
            ib_l = ib_list or [0] * len(zb_list)
            for za, ra, ia in zip(za_list, ra_list, ia_l):
                for zb, rb, ib in zip(zb_list, rb_list, ib_l):
                    k = za + zb
                    if ia:
                        if ib:
                            dre[k] = dre.get(k, 0) + ra * rb - ia * ib
                            dim[k] = dim.get(k, 0) + ra * ib + ia * rb
                        else:
                            dre[k] = dre.get(k, 0) + ra * rb
                            dim[k] = dim.get(k, 0) + ia * rb
                    else:
                        dre[k] = dre.get(k, 0) + ra * rb
                        if ib:
                            dim[k] = dim.get(k, 0) + ra * ib
    out = {}
    for qn in set(acc_re) | set(acc_im):
        rr = acc_re.get(qn, {})
        ii = acc_im.get(qn, {})
        row = {}
        for zn in set(rr) | set(ii):
            c = GaussianRational(rr.get(zn, 0), ii.get(zn, 0))
            if c:
                row[zn] = c
        if row:
            out[qn] = row
    return QZSeries._raw(qd, zd, out, prec)


def _row_mul(r1, r2):
    out = {}
    for z1, c1 in r1.items():
        for z2, c2 in r2.items():
            k = z1 + z2
            out[k] = out[k] + c1 * c2 if k in out else c1 * c2
    return out


def series_invert(a: QZSeries) -> QZSeries:
    """Multiplicative inverse; the lowest q-slice must be a single monomial."""
    if a.is_zero():
        raise NonUnit("cannot invert a series with no known nonzero term")
    q0 = min(a._slices)
    low = a._slices[q0]
    if len(low) != 1:
        raise NonUnit(f"lowest q-slice has {len(low)} zeta-terms; not a unit")
    (z0, c0), = low.items()
    c_inv = c0.inverse()
    alpha = Fraction(q0, a.q_den)
    s0 = Fraction(z0, a.z_den)
    # u = a / lead = 1 + (terms of positive q-order)
    u = a.mul_monomial(c_inv, -alpha, -s0)
    rel_prec = u.prec  # absolute = relative for u (valuation 0)
    qd, zd = u.q_den, u.z_den
    us = u._slices
    pos = sorted(k for k in us if k > 0)
    b: dict[int, dict[int, GaussianRational]] = {0: {0: ONE}}
    if rel_prec == INF:
        if not pos:
            inv_u = QZSeries._raw(qd, zd, b, INF)
            return inv_u.mul_monomial(c_inv, -alpha, -s0)
        raise NonUnit("inverse of a non-monomial exact series needs a finite precision")
    limit = rel_prec * qd
    # orders reachable as sums of positive exponents of u
    reach = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for r in frontier:
            for p in pos:
                t = r + p
                if t < limit and t not in reach:
                    reach.add(t)
                    nxt.append(t)
        frontier = nxt
    for n in sorted(reach):
        if n == 0:
            continue
        acc: dict[int, GaussianRational] = {}
        for p in pos:
            if p > n:
                break
            bn = b.get(n - p)
            if not bn:
                continue
            for zk, c in _row_mul(us[p], bn).items():
                acc[zk] = acc[zk] - c if zk in acc else -c
        acc = {k: v for k, v in acc.items() if v}
        if acc:
            b[n] = acc
    inv_u = QZSeries._raw(qd, zd, b, rel_prec)
    return inv_u.mul_monomial(c_inv, -alpha, -s0)


def _geometric(k: int, zsign: int, j: int, prec) -> QZSeries:
    """sum_t C(t+j-1, j-1) q^{k t} zeta^{zsign t} for k >= 1, to the given prec."""
    if prec == INF:
        raise Divergent("geometric expansion needs a finite precision")
    terms = {}
    t = 0
    while k * t < prec:
        terms[(Fraction(k * t), Fraction(zsign * t))] = comb(t + j - 1, j - 1)
        t += 1
    return QZSeries(terms, prec)


def exact_div_pole(a: QZSeries, k: int, j: int = 1) -> QZSeries:
    """Return ``a / (1 - q**k * zeta)**j``.

    For ``k != 0`` the pole factor is expanded geometrically (finite per
    q-order); for ``k == 0`` each q-slice must be divisible by ``(1-zeta)**j``.
    """
    if j < 0:
        raise ValueError("pole order must be nonnegative")
    if j == 0:
        return a
    if k >= 1:
        rel = a.prec - a.valuation if a.prec != INF else INF
        if rel == INF:
            raise Divergent("expansion of an exact series needs a precision")
        return a * _geometric(k, 1, j, rel)
    if k <= -1:
        shifted = a.mul_monomial((-1) ** j, -k * j, -j)
        rel = shifted.prec - shifted.valuation if shifted.prec != INF else INF
        if rel == INF:
            raise Divergent("expansion of an exact series needs a precision")
        return shifted * _geometric(-k, -1, j, rel)
    step = a.z_den
    out = {}
    for qn, row in a._slices.items():
        cur = row
        for _ in range(j):
            cur = _div_one_minus_zeta(cur, step, qn, a.q_den)
        if cur:
            out[qn] = cur
    return QZSeries._raw(a.q_den, a.z_den, out, a.prec)


def _div_one_minus_zeta(row, step, qn, q_den):
    # group exponents by residue modulo the zeta step; each class divides independently
    out = {}
    classes: dict[int, list[int]] = {}
    for zn in row:
        classes.setdefault(zn % step, []).append(zn)
    for members in classes.values():
        lo, hi = min(members), max(members)
        carry = ZERO
        s = lo
        while s < hi:
            carry = carry + row.get(s, ZERO)
            if carry:
                out[s] = carry
            s += step
        if carry + row.get(hi, ZERO):
            raise NotDivisible(
                f"q-slice {Fraction(qn, q_den)} is not divisible by (1 - zeta)"
            )
    return out


def pochhammer(base_q_exp, base_z_exp=0, base_coeff=1, length=None, precision=None) -> QZSeries:
    """``prod_{j=0}^{length-1} (1 - c q^{a+j} zeta^b)``; ``length=None`` means infinity."""
    a = _frac(base_q_exp)
    b = _frac(base_z_exp)
    prec = _prec(precision)
    result = QZSeries.one()
    if length is None:
        if prec == INF:
            raise Divergent("an infinite product needs a finite precision")
        if a < 0:
            raise Divergent("infinite product with a negative-order base cannot be truncated")
        if a == 0 and b == 0:
            raise Divergent("base with zero q- and zeta-exponent never becomes small")
        result = result.with_prec(prec)
        j = 0
        while a + j < prec:
            result = result * QZSeries({(0, 0): 1, (a + j, b): -GaussianRational.coerce(base_coeff)})
            j += 1
        return result
    for j in range(length):
        result = result * QZSeries({(0, 0): 1, (a + j, b): -GaussianRational.coerce(base_coeff)})
    if prec != INF:
        result = result.truncate(prec)
    return result


def apply_D(which: str, a: QZSeries) -> QZSeries:
    """D = (2 pi i)^{-1} d/dx for x in {tau, z}: multiply each term by its exponent."""
    if which not in ("tau", "z"):
        raise ValueError("which must be 'tau' or 'z'")
    out = {}
    if which == "tau":
        for qn, row in a._slices.items():
            if qn:
                f = Fraction(qn, a.q_den)
                out[qn] = {zn: c * f for zn, c in row.items()}
    else:
        for qn, row in a._slices.items():
            r = {zn: c * Fraction(zn, a.z_den) for zn, c in row.items() if zn}
            if r:
                out[qn] = r
    return QZSeries._raw(a.q_den, a.z_den, out, a.prec)


def shift_z(a: QZSeries, lam, mu) -> QZSeries:
    """Substitute z -> z + lam*tau + mu.

    Each term ``q^alpha zeta^s`` becomes ``e(mu s) q^{alpha + lam s} zeta^s``.
    The precision moves by the most negative ``lam*s`` among occurring
    exponents; this is sound when the truncated tail has no larger
    |zeta|-exponents than the stored part, which holds for the theta-type
    series built here (callers verifying identities keep a margin).
    """
    lam = _frac(lam)
    mu = _frac(mu)
    terms = {}
    min_shift = Fraction(0)
    for (q, s), c in a.items():
        ph = mu * s * 4
        if ph.denominator != 1:
            raise NonGaussianPhase(f"e({mu * s}) is not a power of i")
        shift = lam * s
        min_shift = min(min_shift, shift)
        terms[(q + shift, s)] = c * e_quarter(int(ph))
    prec = a.prec if a.prec == INF else a.prec + min_shift
    return QZSeries(terms, prec)


def extract_zeta(a: QZSeries, s) -> QZSeries:
    """Coefficient series of ``zeta**s`` (zeta removed)."""
    zn = _frac(s) * a.z_den
    if zn.denominator != 1:
        return QZSeries.zero(a.prec)
    zn = int(zn)
    out = {qn: {0: row[zn]} for qn, row in a._slices.items() if zn in row}
    return QZSeries._raw(a.q_den, 1, out, a.prec)


def ring_arith(op: str, a: QZSeries, b=None) -> QZSeries:
    if op == "add":
        return a + b
    if op == "negate":
        return -a
    if op == "multiply":
        return a * b
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"unknown op {op!r}")
