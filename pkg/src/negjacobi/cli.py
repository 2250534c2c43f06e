"""Command-line entry point: ``negjacobi <command> [flags]``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import decomposition as dec
from .errors import JacobiError
from .gaussian import frac_str
from .jets import laurent_coeffs
from .numerics import quantum
from .numerics.evaluate import DEFAULT_TAU, EvalContext
from .numerics.quadrature import QuadratureSpec, fourier_quadrature
from .quotient import JacobiQuotient
from .report import report_emit
from .series import QZSeries
from .special import (
    KacWakimotoSpec, appell_F_jet, crank_rank, eta_and_D, kontsevich_at_root, partial_theta,
    theta_series, theta_vv,
)
from .suites import SUITES, run_suite

EXPANDABLE = ("theta", "eta", "D", "partial-theta", "theta-vv", "crank", "rank", "appell")


class UsageError(Exception):
    def __init__(self, flag: str, msg: str):
        super().__init__(f"{flag}: {msg}")
        self.flag = flag


# ---------------------------------------------------------------------------
# flag parsing


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational p/q, got {text!r}") from None


def _complex_pair(text: str) -> complex:
    try:
        re, im = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected re,im, got {text!r}") from None
    if im <= 0:
        raise argparse.ArgumentTypeError("tau must have positive imaginary part")
    return complex(re, im)


def _int_pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected M,N, got {text!r}") from None
    return a, b


def _rational_pair(text: str) -> tuple[Fraction, Fraction]:
    try:
        a, b = (Fraction(x) for x in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected lam,mu, got {text!r}") from None
    return a, b


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        n = 0
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return n


def _kw(mn) -> KacWakimotoSpec:
    try:
        return KacWakimotoSpec(*mn)
    except ValueError as exc:
        raise UsageError("--MN", str(exc)) from None


def _add_output(p, choices=("json", "csv", "text"), default="text"):
    p.add_argument("--output", choices=choices, default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="negjacobi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="exact q-expansion of a named function")
    p.add_argument("--function", choices=EXPANDABLE, required=True)
    p.add_argument("--precision", type=_rational, default=Fraction(10))
    p.add_argument("--ell", type=_rational, default=Fraction(0))
    p.add_argument("--eps", type=int, choices=(0, 1), default=0)
    p.add_argument("--level", type=_rational, default=Fraction(1), help="M for partial-theta and appell")
    p.add_argument("--index", type=_positive_int, default=1, help="m for theta-vv")
    p.add_argument("--jet-order", type=int, default=0)
    _add_output(p, default="json")

    p = sub.add_parser("laurent", help="exact Laurent data of phi_{M,N} at z = 0")
    p.add_argument("--MN", type=_int_pair, required=True)
    p.add_argument("--precision", type=_rational, default=Fraction(10))
    _add_output(p, ("json", "text"), "json")

    p = sub.add_parser("decompose", help="exact Appell-Lerch or partial theta side for phi_{M,N}")
    p.add_argument("--MN", type=_int_pair, required=True)
    p.add_argument("--precision", type=_rational, default=Fraction(10))
    p.add_argument("--ell", type=_rational, help="emit the h_ell partial theta side instead")
    _add_output(p, default="json")

    p = sub.add_parser("fourier", help="numeric Fourier coefficient h_{ell,z0} by quadrature")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--MN", type=_int_pair)
    which.add_argument("--quotient", help="theta quotient as a:b:e;a:b:e;...")
    p.add_argument("--ell", type=_rational, required=True)
    p.add_argument("--z0", type=_rational_pair, default=(Fraction(-1, 2), Fraction(-1, 2)))
    p.add_argument("--tau", type=_complex_pair, default=DEFAULT_TAU)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--points", type=_positive_int, default=32)
    _add_output(p, ("json", "text"), "json")

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", choices=SUITES + ("all",), required=True)
    p.add_argument("--MN", type=_int_pair)
    p.add_argument("--precision", type=_rational)
    p.add_argument("--tau", type=_complex_pair)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=_positive_int, default=1)
    _add_output(p)

    p = sub.add_parser("rank-crank", help="fit and verify the rank-crank PDE")
    p.add_argument("--precision", type=_rational, default=Fraction(20))
    p.add_argument("--zeta-window", type=_positive_int, default=40)
    _add_output(p)

    p = sub.add_parser("quantum-probe", help="radial limits, cocycle tables and Kontsevich values")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--radial", action="store_true", help="radial limit table at --x")
    kind.add_argument("--cocycle", action="store_true", help="cocycle table for --gamma")
    kind.add_argument("--kontsevich", action="store_true", help="F at e(--x)")
    p.add_argument("--function", choices=("eta", "theta-plus"), default="theta-plus")
    p.add_argument("--x", type=_rational, default=Fraction(0))
    p.add_argument("--xs", help="comma-separated sample rationals for --cocycle")
    p.add_argument("--gamma", default="0,-1,1,0", help="a,b,c,d")
    p.add_argument("--weight", type=_rational, default=Fraction(1, 2), help="k in (cx + d)^-k for --cocycle")
    p.add_argument("--ell", type=_rational, default=Fraction(-1, 2))
    p.add_argument("--eps", type=int, choices=(0, 1), default=1)
    p.add_argument("--level", type=_rational, default=Fraction(1, 2))
    p.add_argument("--z0", type=_rational_pair, default=(Fraction(0), Fraction(0)))
    p.add_argument("--t0", type=float)
    p.add_argument("--levels", type=_positive_int, default=6)
    p.add_argument("--tolerance", type=float, default=1e-5)
    _add_output(p, ("csv", "json"), "csv")
    return parser


# ---------------------------------------------------------------------------
# output helpers


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _series_out(s: QZSeries, fmt: str) -> str:
    if fmt == "json":
        return _dump(s.to_json())
    rows = [(qe, ze, c) for (qe, ze), c in s.items()]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["q_exp", "z_exp", "re", "im"])
        for qe, ze, c in rows:
            w.writerow([frac_str(qe), frac_str(ze), frac_str(c.re), frac_str(c.im)])
        w.writerow(["prec", "inf" if s.prec == float("inf") else frac_str(s.prec), "", ""])
        return buf.getvalue()
    lines = [f"q^{qe} zeta^{ze}: {c}" for qe, ze, c in rows]
    lines.append(f"+ O(q^{s.prec})")
    return "\n".join(lines) + "\n"


def _complex_json(v: complex) -> dict:
    return {"re": repr(float(v.real)), "im": repr(float(v.imag))}


# ---------------------------------------------------------------------------
# commands


def cmd_expand(a) -> tuple[int, str]:
    P = a.precision
    f = a.function
    if f == "appell":
        if a.level <= 0:
            raise UsageError("--level", "must be positive")
        if a.jet_order < 0:
            raise UsageError("--jet-order", "must be non-negative")
        jets = appell_F_jet(a.level, a.eps, a.jet_order, P)
        if a.output != "json":
            raise UsageError("--output", "appell jets are emitted as json only")
        return 0, _dump([j.to_json() for j in jets])
    if f == "theta":
        s = theta_series(P)
    elif f in ("eta", "D"):
        s = eta_and_D(P)[0 if f == "eta" else 1]
    elif f == "partial-theta":
        if a.level <= 0:
            raise UsageError("--level", "must be positive")
        s = partial_theta(a.ell, a.eps, a.level, P)
    elif f == "theta-vv":
        if a.ell.denominator != 1:
            raise UsageError("--ell", "theta-vv needs an integer ell")
        s = theta_vv(a.index, int(a.ell), P)
    else:
        s = crank_rank(f, P)
    return 0, _series_out(s, a.output)


def cmd_laurent(a) -> tuple[int, str]:
    spec = _kw(a.MN)
    data = laurent_coeffs(spec, precision=a.precision)
    if a.output == "json":
        return 0, _dump(data.to_json())
    lines = [f"phi_{{{spec.label()}}} pole at z = 0, order {data.order}"]
    for n, d in enumerate(data.D, start=1):
        lines.append(f"D_{n}:")
        lines += ["  " + ln for ln in _series_out(d, "text").splitlines()]
    return 0, "\n".join(lines) + "\n"


def cmd_decompose(a) -> tuple[int, str]:
    spec = _kw(a.MN)
    if a.ell is not None:
        if (a.ell - spec.index).denominator != 1:
            raise UsageError("--ell", f"must lie in m + Z with m = {spec.index}")
        return 0, _series_out(dec.thm2_rhs_exact(spec, a.ell, a.precision), a.output)
    pieces = dec.thm1_rhs_exact(spec, a.precision)
    if a.output == "json":
        return 0, _dump({
            "MN": spec.label(), "index": frac_str(spec.index), "eps": spec.eps,
            "terms": [{"n": p.n, "scale": p.scale.to_json(), "appell": p.jet.to_json()} for p in pieces],
        })
    # csv/text: the multiplied-through side theta^N * (sum) equals theta(z+1/2)^M
    return 0, _series_out(dec.multiply_through(pieces, spec.N, a.precision), a.output)


def cmd_fourier(a) -> tuple[int, str]:
    if a.MN is not None:
        spec = _kw(a.MN)
        quot = JacobiQuotient.kac_wakimoto(spec.M, spec.N)
    else:
        try:
            quot = JacobiQuotient.parse(a.quotient)
        except ValueError as exc:
            raise UsageError("--quotient", str(exc)) from None
    if (a.ell - quot.index).denominator != 1:
        raise UsageError("--ell", f"must lie in m + Z with m = {quot.index}")
    try:
        qspec = QuadratureSpec(float(a.z0[0]) * a.tau + float(a.z0[1]), a.ell, a.points)
    except ValueError as exc:
        raise UsageError("--points", str(exc)) from None
    res = fourier_quadrature(quot, qspec, EvalContext(a.tau, eps=a.tolerance))
    out = {
        "quotient": quot.label(), "ell": frac_str(a.ell), "z0": [frac_str(x) for x in a.z0],
        "tau": _complex_json(a.tau), "value": _complex_json(res.value), "n_points": res.n_points,
        "doubling_error": repr(res.doubling_error), "rule": res.rule,
        "deform_spread": repr(res.deform_spread),
    }
    if a.output == "json":
        return 0, _dump(out)
    return 0, "".join(f"{k}: {out[k]}\n" for k in sorted(out))


def cmd_verify(a) -> tuple[int, str]:
    mn = None
    if a.MN is not None:
        spec = _kw(a.MN)
        mn = (spec.M, spec.N)
    if a.precision is not None and a.precision <= 0:
        raise UsageError("--precision", "must be positive")
    if a.tolerance is not None and a.tolerance <= 0:
        raise UsageError("--tolerance", "must be positive")
    reports = run_suite(a.suite, threads=a.threads, precision=a.precision, mn=mn,
                        taus=(a.tau,) if a.tau else None, seed=a.seed, tolerance=a.tolerance)
    code = 0 if all(r.passed for r in reports) else 1
    return code, report_emit(reports, a.output)


def cmd_rank_crank(a) -> tuple[int, str]:
    r = dec.rank_crank_check(a.precision, a.zeta_window)
    return (0 if r.passed else 1), report_emit([r], a.output)


def cmd_quantum(a) -> tuple[int, str]:
    if a.kontsevich:
        x = a.x
        v = kontsevich_at_root(x.numerator, x.denominator)
        out = {"x": frac_str(x), "value": v.to_json() if hasattr(v, "to_json") else _complex_json(v)}
        if a.output == "json":
            return 0, _dump(out)
        return 0, f"x,value\r\n{frac_str(x)},{v}\r\n"
    if a.function == "eta":
        f = quantum.eta_function
    else:
        if a.level <= 0:
            raise UsageError("--level", "must be positive")
        f = quantum.theta_plus_at(a.ell, a.eps, a.level, *a.z0)
    ts = None
    if a.t0 is not None:
        if a.t0 <= 0:
            raise UsageError("--t0", "must be positive")
        ts = tuple(quantum.approach_sequence(a.t0, a.levels))
    if a.radial:
        lim = quantum.radial_limit(f, a.x, ts or quantum.approach_sequence(levels=a.levels, x=a.x),
                                   a.tolerance)
        rows = quantum.radial_rows(lim)
    else:
        try:
            gamma = tuple(int(x) for x in a.gamma.split(","))
            if len(gamma) != 4:
                raise ValueError
        except ValueError:
            raise UsageError("--gamma", "expected four integers a,b,c,d") from None
        if not a.xs:
            raise UsageError("--xs", "required with --cocycle")
        try:
            xs = tuple(Fraction(x) for x in a.xs.split(","))
            probe = quantum.CocycleProbe(gamma, xs, ts, a.weight)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError("--gamma" if "gamma" in str(exc) else "--xs", str(exc)) from None
        rows = quantum.cocycle_probe(probe, f, a.tolerance)
    if a.output == "csv":
        return 0, quantum.rows_to_csv(rows)
    return 0, _dump([{
        "x": frac_str(r.x), "t": repr(r.t), "value": _complex_json(r.value),
        "extrapolant": _complex_json(r.extrapolant),
        "diff1": None if r.diff1 is None else repr(r.diff1),
        "diff2": None if r.diff2 is None else repr(r.diff2),
    } for r in rows])


COMMANDS = {
    "expand": cmd_expand, "laurent": cmd_laurent, "decompose": cmd_decompose, "fourier": cmd_fourier,
    "verify": cmd_verify, "rank-crank": cmd_rank_crank, "quantum-probe": cmd_quantum,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, text = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (JacobiError, ValueError, ArithmeticError) as exc:
        print(f"{parser.prog}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
