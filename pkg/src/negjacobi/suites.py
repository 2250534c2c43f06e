"""Named verification suites, run case-by-case on a process pool."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import decomposition as dec
from .gaussian import GaussianRational
from .numerics import checks, quantum
from .numerics.evaluate import EvalContext
from .numerics.quadrature import QuadratureSpec, fourier_quadrature
from .quotient import JacobiQuotient
from .report import Discrepancy, VerificationReport
from .special import KacWakimotoSpec, kontsevich_at_root

KW_FAMILY = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
TAUS = (0.13 + 1.04j, -0.21 + 0.8j, 0.5 + 1.5j)
HALF = Fraction(1, 2)
# theta(z)^-1 theta(z + 1/2 + tau/2)^-1 theta(z + tau/2): simple poles at 0 and -1/2 - tau/2
TWO_POLE = "0:0:-1;1/2:1/2:-1;1/2:0:1"
TWO_POLE_Z0 = (Fraction(-3, 4), Fraction(-3, 4))

SUITES = (
    "triple-product", "theta-elliptic", "cor12", "thm1-numeric", "thm2-numeric", "lemma31",
    "eq32", "eq33", "theta-decomp", "sum-of-tails", "rank-crank", "quantum",
)


# ---------------------------------------------------------------------------
# individual cases (top-level so they pickle)


def _cor12(M, N, P):
    return [dec.verify_cor12(KacWakimotoSpec(M, N), P)]


def _cor12_mutations(M, N, P):
    spec = KacWakimotoSpec(M, N)
    out = []
    for mut in [f"D{n}" for n in range(1, N + 1)] + ["eps", "sign"]:
        r = dec.verify_cor12(spec, P, mut)
        consts = {"mutation": mut, "mutant_status": r.status}
        if r.passed:
            consts["error"] = "injected fault went undetected"
        out.append(VerificationReport(f"cor12-mutation[{spec.label()}]!{mut}", not r.passed, r.checked_to,
                                      None, consts))
    return out


def _thm1(M, N, tau, zs, tol=1e-8):
    q = JacobiQuotient.kac_wakimoto(M, N)
    ctx = EvalContext(tau)
    return [checks.verify_thm1_numeric(q, z, ctx=ctx, tol=tol) for z in zs]


def _thm1_two_pole(tau, zs):
    q = JacobiQuotient.parse(TWO_POLE)
    ctx = EvalContext(tau)
    out = [checks.verify_thm1_numeric(q, z, TWO_POLE_Z0, ctx) for z in zs]
    z = zs[0]
    a = checks.thm1_rhs_numeric(q, z, TWO_POLE_Z0, ctx)
    b = checks.thm1_rhs_numeric(q, z, (Fraction(-1, 4), Fraction(-1, 4)), ctx)
    err = abs(a - b)
    ok = bool(err < 1e-8)
    out.append(VerificationReport(
        f"thm1-z0-invariance[{q.label()},tau={tau}]", ok, None,
        None if ok else Discrepancy(Fraction(0), Fraction(0), a, b), {"abs_error": float(f"{err:.3e}")}))
    for drop in (0, 1):
        r = checks.verify_thm1_numeric(q, z, TWO_POLE_Z0, ctx, drop_pole=drop)
        consts = {"dropped_pole": drop, "mutant_status": r.status}
        if r.passed:
            consts["error"] = "dropping a pole went undetected"
        out.append(VerificationReport(f"thm1-drop-pole[{q.label()},tau={tau}]!{drop}", not r.passed,
                                      None, None, consts))
    return out


def _thm2(M, N, tau, ells, tol=1e-7):
    q = JacobiQuotient.kac_wakimoto(M, N)
    ctx = EvalContext(tau)
    return [checks.verify_thm2_numeric(q, ell, ctx=ctx, tol=tol) for ell in ells]


def _thm2_exact(M, N, ell, tau):
    """Quadrature against the exact partial theta side evaluated at q."""
    spec = KacWakimotoSpec(M, N)
    ctx = EvalContext(tau)
    exact = dec.thm2_rhs_exact(spec, ell, 30).evaluate(tau)
    q = JacobiQuotient.kac_wakimoto(M, N)
    quad = fourier_quadrature(q, QuadratureSpec(-0.5 - tau / 2, Fraction(ell)), ctx).value
    err = abs(quad - exact)
    ok = bool(err < 1e-8)
    return [VerificationReport(
        f"thm2-exact[{spec.label()},ell={ell},tau={tau}]", ok, Fraction(30),
        None if ok else Discrepancy(Fraction(0), Fraction(0), complex(quad), exact),
        {"abs_error": float(f"{err:.3e}"), "tolerance": 1e-8})]


def _lemma31(M, eps, tau, seed):
    return [checks.residue_and_elliptic_check(M, eps, EvalContext(tau), 5, seed)]


def _eq32(M, eps, ell, P):
    return [dec.partial_theta_shift_check(M, eps, ell, lam, mu, P) for lam in (-1, 0, 1) for mu in (0, 1)]


def _eq33(M, eps, ell, P):
    return [dec.partial_theta_step_check(M, eps, ell, P)]


def _theta_decomp(P, tau):
    exact = dec.theta_decomp_check(P)
    _, hs = dec.theta_decomp_slices(P)
    q = JacobiQuotient.parse("0:0:2")
    ctx = EvalContext(tau)
    worst = 0.0
    for ell, h in hs.items():
        quad = fourier_quadrature(q, QuadratureSpec(0j, Fraction(ell)), ctx).value
        worst = max(worst, abs(quad - h.evaluate(tau)))
    ok = bool(worst < 1e-10)
    num = VerificationReport(f"theta-decomp-quadrature[tau={tau}]", ok, None, None,
                             {"abs_error": float(f"{worst:.3e}"), "tolerance": 1e-10,
                              **({} if ok else {"error": "quadrature slices disagree"})})
    return [exact, num]


def _kontsevich():
    expected = {(0, 1): GaussianRational(1), (1, 2): GaussianRational(3), (1, 4): GaussianRational(8, -3)}
    out = []
    for (h, k), want in expected.items():
        got = kontsevich_at_root(h, k)
        ok = got == want
        out.append(VerificationReport(
            f"kontsevich[{h}/{k}]", ok, None,
            None if ok else Discrepancy(Fraction(0), Fraction(0), got, want), {"value": str(got)}))
    return out


def _eta_radial():
    lim = quantum.radial_limit(quantum.eta_function, 0, quantum.approach_sequence(0.02, 6))
    ok = bool(abs(lim.limit) < 1e-6)
    consts = {"limit_abs": float(f"{abs(lim.limit):.3e}"), "t0": 0.02,
              "value_abs_at_t0": float(f"{abs(lim.values[0]):.3e}")}
    if not ok:
        consts["error"] = "extrapolated |eta| not below 1e-6"
    return [VerificationReport("quantum-eta-radial[x=0]", ok, None, None, consts)]


def _theta_plus_radial():
    f = quantum.theta_plus_at(-HALF, 1, HALF)
    lim = quantum.radial_limit(f, 1)
    return [VerificationReport("quantum-theta-plus-radial[x=1]", True, None, None,
                               {"limit": f"{lim.limit:.10g}", "stability": float(f"{lim.stability:.3e}")})]


def _cocycle(seed):
    f = quantum.theta_plus_at(-HALF, 1, HALF)
    xs = tuple(Fraction(k, 7) for k in range(1, 8))
    rows = quantum.cocycle_probe(quantum.CocycleProbe((0, -1, 1, 0), xs), f)
    d2 = [r.diff2 for r in rows if r.diff2 is not None]
    return [VerificationReport("quantum-cocycle[S]", True, None, None,
                               {"rows": len(rows), "max_diff2": float(f"{max(d2):.3e}"),
                                "asserted": False})]


CASES = {
    "cor12": _cor12, "cor12-mutations": _cor12_mutations, "thm1": _thm1,
    "thm1-two-pole": _thm1_two_pole, "thm2": _thm2, "thm2-exact": _thm2_exact,
    "lemma31": _lemma31, "eq32": _eq32, "eq33": _eq33, "theta-decomp": _theta_decomp,
    "triple-product": lambda P: [dec.triple_product_check(P)],
    "theta-elliptic": lambda lam, mu, P: [dec.theta_elliptic_check(lam, mu, P)],
    "sum-of-tails": lambda P: [dec.sum_of_tails_check(P)],
    "rank-crank": lambda P: [dec.rank_crank_check(P)],
    "kontsevich": _kontsevich, "eta-radial": _eta_radial,
    "theta-plus-radial": _theta_plus_radial, "cocycle": _cocycle,
}


def run_case(case):
    kind, args = case
    return CASES[kind](*args)


# ---------------------------------------------------------------------------
# suite assembly


def _random_zs(tau, count, rng):
    xs = rng.uniform(0.1, 0.9, (count, 2))
    return tuple(complex(x + y * tau) for x, y in xs)


def build_cases(suite: str, precision=None, mn=None, taus=None, seed: int = 0, tolerance=None):
    """Picklable (kind, args) cases for one suite; ``mn`` narrows the Kac-Wakimoto grid."""
    P = None if precision is None else Fraction(precision)
    family = (mn,) if mn else KW_FAMILY
    taus = tuple(taus) if taus else TAUS
    rng = np.random.default_rng(seed)
    if suite == "triple-product":
        return [("triple-product", (P or 50,))]
    if suite == "theta-elliptic":
        return [("theta-elliptic", (lam, mu, P or 30)) for lam in (-1, 0, 1) for mu in (-1, 0, 1)]
    if suite == "cor12":
        return [("cor12", (M, N, P or 25)) for M, N in family] + \
               [("cor12-mutations", (M, N, P or 25)) for M, N in family]
    if suite == "thm1-numeric":
        cases = []
        for tau in taus:
            cases += [("thm1", (M, N, tau, _random_zs(tau, 5, rng), tolerance or 1e-8)) for M, N in family]
            if not mn:
                cases.append(("thm1-two-pole", (tau, _random_zs(tau, 5, rng))))
        return cases
    if suite == "thm2-numeric":
        cases = []
        for tau in taus:
            for M, N in family:
                m = Fraction(M - N, 2)
                cases.append(("thm2", (M, N, tau, (m - 1, m, m + 1), tolerance or 1e-7)))
        cases += [("thm2-exact", (M, N, Fraction(M - N, 2), taus[0])) for M, N in family]
        return cases
    if suite == "lemma31":
        return [("lemma31", (M, eps, tau, seed)) for M in (HALF, Fraction(1), Fraction(3, 2))
                for eps in (0, 1) for tau in taus]
    if suite in ("eq32", "eq33"):
        return [(suite, (M, eps, ell, P or 40)) for M in (HALF, Fraction(1), Fraction(3, 2))
                for eps in (0, 1) for ell in (-HALF, HALF, Fraction(3, 2))]
    if suite == "theta-decomp":
        return [("theta-decomp", (P or 30, taus[0]))]
    if suite == "sum-of-tails":
        return [("sum-of-tails", (P or 30,))]
    if suite == "rank-crank":
        return [("rank-crank", (P or 20,))]
    if suite == "quantum":
        return [("kontsevich", ()), ("eta-radial", ()), ("theta-plus-radial", ()), ("cocycle", (seed,))]
    raise ValueError(f"unknown suite {suite!r}")


def run_cases(cases, threads: int = 1) -> list[VerificationReport]:
    if threads <= 1 or len(cases) <= 1:
        results = [run_case(c) for c in cases]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_case, cases))
    reports = [r for rs in results for r in rs]
    return sorted(reports, key=lambda r: r.id)


def run_suite(suite: str, threads: int = 1, **kw) -> list[VerificationReport]:
    names = SUITES if suite == "all" else (suite,)
    cases = []
    for name in names:
        cases += build_cases(name, **kw)
    return run_cases(cases, threads)
