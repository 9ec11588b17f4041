"""Structured report documents: building, serialization and parsing.

Reals are stored as ``repr`` strings, which round-trip binary64 values
exactly; integers and booleans stay native JSON.  No timestamps are written,
so equal inputs give byte-identical documents.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any

from .disk import ConstructionParams, MapReport
from .oracle import OracleReport
from .sphere import BINDING, ContactFormReport, LedgerEntry, ReebOrbitClass

__all__ = [
    "SCHEMA_VERSION",
    "REAL_FIELDS",
    "build_report",
    "dumps",
    "loads",
    "orbit_table_csv",
    "render_text",
    "report_passed",
    "oracle_document",
    "render_oracle_text",
    "sweep_csv",
]

SCHEMA_VERSION = "1.0"

ORBIT_COLUMNS = ("kind", "k", "sigma", "mu", "mu_mean_per_k", "T", "mu_s3", "rho_bar")

# keys whose values are reals wherever they appear
REAL_FIELDS = frozenset({
    "eps", "theta", "eta", "delta", "nu", "R", "margin", "nonstrict_margin", "t_min", "volume", "rho_sys",
    "s", "S", "Delta", "sigma", "mu_mean_per_k", "T", "rho_bar", "max_residual", "tolerance",
    "target_eps",
})


def real(x) -> str | None:
    """Full-precision decimal string of a real (None passes through)."""
    return None if x is None else repr(float(x))


def _params_doc(p: ConstructionParams) -> dict[str, Any]:
    return {"n": p.n, "eps": real(p.eps), "theta": real(p.theta), "eta": real(p.eta),
            "delta": real(p.delta), "nu": real(p.nu), "R": real(p.R)}


def _mapn_doc(mapn: MapReport | None) -> list[dict[str, Any]]:
    if mapn is None:
        # reference runs have no construction to certify
        return [{"label": lab, "description": "not applicable to this mode", "passed": None,
                 "strict": None, "margin": None, "nonstrict_margin": None, "worst": "",
                 "certificates": []}
                for lab in ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii")]
    return [{"label": st.label, "description": st.description, "passed": bool(st.passed),
             "strict": bool(st.strict), "margin": real(st.margin),
             "nonstrict_margin": real(st.nonstrict_margin), "worst": st.worst,
             "certificates": list(st.certificates)} for st in mapn.statements]


def _ledger_doc(entries: list[LedgerEntry]) -> list[dict[str, Any]]:
    return [{"clause": e.clause, "passed": bool(e.passed), "margin": real(e.margin),
             "detail": e.detail} for e in entries]


def _orbit_row(o: ReebOrbitClass) -> dict[str, Any]:
    if o.source == BINDING:
        kind, sigma, mu, mean = BINDING, None, None, None
    else:
        c = o.source
        kind, sigma, mu, mean = c.kind.value, real(c.sigma), int(c.mu), real(c.mu_mean_per_k)
    return {"kind": kind, "k": int(o.k), "sigma": sigma, "mu": mu, "mu_mean_per_k": mean,
            "T": real(o.T), "mu_s3": int(o.mu_s3), "rho_bar": real(o.rho_bar)}


def build_report(params: ConstructionParams, mapn: MapReport | None, contact: ContactFormReport,
                 ledger: list[LedgerEntry]) -> dict[str, Any]:
    """Assemble the report document from the pipeline outputs."""
    return {
        "schema_version": SCHEMA_VERSION,
        "params": _params_doc(params),
        "mapn_ledger": _mapn_doc(mapn),
        "theorem_ledger": _ledger_doc(ledger),
        "contact_report": {
            "t_min": real(contact.t_min), "volume": real(contact.volume),
            "rho_sys": real(contact.rho_sys), "s": real(contact.s), "S": real(contact.S),
            "Delta": real(contact.Delta), "dynamically_convex": bool(contact.dynamically_convex),
        },
        "orbit_classes": [_orbit_row(o) for o in contact.orbits],
    }


def report_passed(doc: dict[str, Any]) -> bool:
    """True iff every applicable ledger entry passes."""
    entries = [e for e in doc["mapn_ledger"] if e["passed"] is not None] + doc["theorem_ledger"]
    return all(e["passed"] for e in entries)


def dumps(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _decode(obj, key=None):
    if isinstance(obj, dict):
        return {k: _decode(v, k) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v, key) for v in obj]
    if key in REAL_FIELDS and isinstance(obj, str):
        return float(obj)
    return obj


def loads(text: str) -> dict[str, Any]:
    """Parse a document, turning real-valued strings back into floats."""
    return _decode(json.loads(text))


def orbit_table_csv(doc: dict[str, Any]) -> str:
    """One row per orbit class, reals at full precision."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ORBIT_COLUMNS)
    for row in doc["orbit_classes"]:
        w.writerow(["" if row[c] is None else row[c] for c in ORBIT_COLUMNS])
    return buf.getvalue()


def _fmt(x, digits=10):
    if x is None:
        return "-"
    v = float(x)
    return f"{v:.{digits}g}" if math.isfinite(v) else str(v)


def render_text(doc: dict[str, Any], title: str = "") -> str:
    """Human-readable summary of a report document."""
    p, c = doc["params"], doc["contact_report"]
    lines = [title] if title else []
    lines.append(f"params: n={p['n']} eps={_fmt(p['eps'])} theta={_fmt(p['theta'])} "
                 f"eta={_fmt(p['eta'])} delta={_fmt(p['delta'])} nu={_fmt(p['nu'])} R={_fmt(p['R'])}")
    lines.append("map statements:")
    for e in doc["mapn_ledger"]:
        status = "n/a " if e["passed"] is None else ("PASS" if e["passed"] else "FAIL")
        lines.append(f"  ({e['label']:>4}) {status} margin={_fmt(e['margin'])}  {e['description']}")
    lines.append("sphere invariants:")
    for key in ("t_min", "volume", "rho_sys", "s", "S", "Delta"):
        lines.append(f"  {key:>8} = {_fmt(c[key], 15)}")
    lines.append(f"  dynamically convex: {c['dynamically_convex']}")
    lines.append("theorem clauses:")
    for e in doc["theorem_ledger"]:
        lines.append(f"  {'PASS' if e['passed'] else 'FAIL'} {e['clause']}  (margin {_fmt(e['margin'])}; {e['detail']})")
    lines.append(f"orbit classes: {len(doc['orbit_classes'])}")
    lines.append("overall: " + ("PASS" if report_passed(doc) else "FAIL"))
    return "\n".join(lines) + "\n"


def oracle_document(rep: OracleReport) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": rep.seed,
        "residuals": [{"check": r.check, "cases": r.cases, "max_residual": real(r.max_residual),
                       "tolerance": real(r.tolerance), "passed": bool(r.passed),
                       "infeasible": bool(r.infeasible)} for r in rep.rows],
        "cz_cases": [{"label": c.label, "k": c.k, "s": real(c.s), "closed_form": c.closed_form,
                      "sampled": c.sampled, "agree": bool(c.agree)} for c in rep.cz_cases],
    }


def render_oracle_text(doc: dict[str, Any]) -> str:
    lines = [f"oracle suite, seed {doc['seed']}"]
    for r in doc["residuals"]:
        flag = "PASS" if r["passed"] else ("INFEASIBLE" if r["infeasible"] else "FAIL")
        lines.append(f"  {flag:<10} {r['check']}: max {_fmt(r['max_residual'], 3)} "
                     f"< {_fmt(r['tolerance'], 3)} over {r['cases']} cases")
    agree = sum(c["agree"] for c in doc["cz_cases"])
    lines.append(f"  index cases: {agree}/{len(doc['cz_cases'])} agree")
    for c in doc["cz_cases"]:
        if not c["agree"]:
            lines.append(f"    mismatch {c['label']} k={c['k']} s={c['s']}: "
                         f"closed form {c['closed_form']}, sampled {c['sampled']}")
    return "\n".join(lines) + "\n"


SWEEP_COLUMNS = ("n", "eps", "passed", "rho_sys", "s", "S", "Delta", "rho_margin", "s_margin",
                 "S_error", "Delta_margin", "error")


def sweep_csv(rows: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in SWEEP_COLUMNS})
    return buf.getvalue()
