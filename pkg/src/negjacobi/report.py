"""Verification reports and their text/JSON/CSV rendering."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .gaussian import GaussianRational, frac_str
from .series import INF


@dataclass(frozen=True)
class Discrepancy:
    q: Fraction
    z: Fraction
    lhs: GaussianRational | complex
    rhs: GaussianRational | complex

    def to_json(self) -> dict:
        return {"q": frac_str(self.q), "z": frac_str(self.z),
                "lhs": _value_json(self.lhs), "rhs": _value_json(self.rhs)}

    @classmethod
    def from_json(cls, d) -> Discrepancy:
        return cls(Fraction(d["q"]), Fraction(d["z"]), _value_from_json(d["lhs"]), _value_from_json(d["rhs"]))

    @classmethod
    def from_series_diff(cls, diff) -> Discrepancy | None:
        if diff is None:
            return None
        q, z, a, b = diff
        return cls(q, z, a, b)


def _value_json(v):
    if isinstance(v, GaussianRational):
        return v.to_json()
    v = complex(v)
    return {"re": repr(v.real), "im": repr(v.imag)}


def _value_from_json(d):
    if "/" in d["re"] and "/" in d["im"]:
        return GaussianRational.from_json(d)
    return complex(float(d["re"]), float(d["im"]))


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one identity check.

    ``checked_to`` is the q-order for exact checks; numeric checks carry
    their tolerance and worst observed error in ``derived_constants``.
    ``wall_ms`` stays ``None`` unless the caller asks for timing, so that
    serialized reports are byte-identical across runs.
    """

    id: str
    passed: bool
    checked_to: Fraction | None = None
    first_discrepancy: Discrepancy | None = None
    derived_constants: dict = field(default_factory=dict)
    wall_ms: float | None = None

    def __post_init__(self):
        if not self.passed and self.first_discrepancy is None and "error" not in self.derived_constants:
            raise ValueError("a failing report needs a discrepancy or an error entry")

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        ct = self.checked_to
        return {
            "id": self.id,
            "status": self.status,
            "checked_to": None if ct is None else ("inf" if ct == INF else frac_str(ct)),
            "first_discrepancy": None if self.first_discrepancy is None else self.first_discrepancy.to_json(),
            "derived_constants": self.derived_constants,
            "wall_ms": self.wall_ms,
        }

    @classmethod
    def from_json(cls, d) -> VerificationReport:
        ct = d.get("checked_to")
        fd = d.get("first_discrepancy")
        return cls(
            id=d["id"],
            passed=d["status"] == "pass",
            checked_to=None if ct is None else (INF if ct == "inf" else Fraction(ct)),
            first_discrepancy=None if fd is None else Discrepancy.from_json(fd),
            derived_constants=d.get("derived_constants") or {},
            wall_ms=d.get("wall_ms"),
        )


def summary_line(reports) -> str:
    p = sum(1 for r in reports if r.passed)
    return f"passed {p} / failed {len(reports) - p} / total {len(reports)}"


def report_emit(reports, fmt: str = "text") -> str:
    rs = sorted(reports, key=lambda r: r.id)
    if fmt == "json":
        payload = {"reports": [r.to_json() for r in rs], "summary": summary_line(rs)}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["id", "status", "checked_to", "discrepancy_q", "discrepancy_z", "derived_constants"])
        for r in rs:
            j = r.to_json()
            fd = j["first_discrepancy"] or {}
            w.writerow([r.id, r.status, j["checked_to"] or "", fd.get("q", ""), fd.get("z", ""),
                        json.dumps(r.derived_constants, sort_keys=True)])
        w.writerow([summary_line(rs)])
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = []
    for r in rs:
        line = f"{r.status.upper():4} {r.id}"
        j = r.to_json()
        if j["checked_to"] is not None:
            line += f"  to O(q^{r.checked_to})"
        if r.first_discrepancy is not None:
            fd = j["first_discrepancy"]
            line += f"  first difference at q^{fd['q']} zeta^{fd['z']}"
        for k in sorted(r.derived_constants):
            line += f"  {k}={r.derived_constants[k]}"
        lines.append(line)
    lines.append(summary_line(rs))
    return "\n".join(lines) + "\n"
