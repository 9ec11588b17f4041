"""Command-line front end.

Subcommands ``verify``, ``oracle``, ``sweep``, ``reference`` and ``plot``.
Settings come from, in increasing priority: built-in defaults, the
``REEBLIFT_OUT`` environment variable (output directory), a ``key = value``
file given with ``--config``, and command-line flags.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
errors, 3 when a requested tolerance is below what double precision can
deliver, 4 when the parameter search fails.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .disk import ConstructionParams, select_params, verify_mapn
from .errors import ParameterSearchError
from .oracle import oracle_suite
from .report import (build_report, dumps, oracle_document, orbit_table_csv, render_oracle_text,
                     render_text, report_passed, sweep_csv)
from .sphere import (LedgerEntry, contact_report, reference_ledger, theorem_ledger,
                     verify_theorems)

__all__ = ["RunConfig", "main", "run_verify", "run_oracle", "run_sweep", "run_reference", "run_plot"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_SEARCH_FAILED = 4

ENV_OUT = "REEBLIFT_OUT"
DEFAULT_OUT = "reeblift-out"
COMMANDS = ("verify", "oracle", "sweep", "reference", "plot")


@dataclass
class RunConfig:
    """Everything a subcommand needs; ``k_max`` defaults to 8n."""

    command: str = "verify"
    n: int = 2
    eps: float = 0.5
    k_max: int | None = None
    seed: int = 0
    out: str = DEFAULT_OUT
    fmt: str = "text"
    theta: float | None = None
    eta: float | None = None
    delta: float | None = None
    tol: float | None = None
    cases: int = 100
    n_list: list[int] = field(default_factory=lambda: [2, 3, 4])
    eps_list: list[float] = field(default_factory=lambda: [0.25])

    @property
    def kmax(self) -> int:
        return 8 * self.n if self.k_max is None else self.k_max

    @property
    def has_overrides(self) -> bool:
        return any(v is not None for v in (self.theta, self.eta, self.delta))

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.k_max is not None and self.k_max < self.n:
            raise ValueError("kmax must be at least n")
        if self.fmt not in ("json", "csv", "text"):
            raise ValueError("format must be json, csv or text")
        if self.cases < 1:
            raise ValueError("cases must be positive")


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


# config key -> (RunConfig field, parser)
_KEYS = {
    "n": ("n", int), "eps": ("eps", float), "kmax": ("k_max", int), "seed": ("seed", int),
    "out": ("out", str), "format": ("fmt", str), "theta": ("theta", float),
    "eta": ("eta", float), "delta": ("delta", float), "tol": ("tol", float),
    "cases": ("cases", int), "n_list": ("n_list", _int_list), "eps_list": ("eps_list", _float_list),
}


def read_config_file(path: str | Path) -> dict[str, object]:
    """Parse a ``key = value`` file (``#`` comments allowed) into RunConfig fields."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.read_string("[run]\n" + Path(path).read_text())
    values = {}
    for key, raw in parser["run"].items():
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise ValueError(f"unknown config key {key!r}")
        name, conv = _KEYS[key]
        values[name] = conv(raw)
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file mirroring the flags")
    common.add_argument("--n", type=int, help="number of sectors (>= 2)")
    common.add_argument("--eps", type=float, help="target smallness parameter (> 0)")
    common.add_argument("--kmax", type=int, help="largest iterate checked directly (default 8n)")
    common.add_argument("--theta", type=float, help="override the twist angle")
    common.add_argument("--eta", type=float, help="override the twist area fraction")
    common.add_argument("--delta", type=float, help="override the cutoff half-width")
    common.add_argument("--seed", type=int, help="random seed (oracle)")
    common.add_argument("--tol", type=float, help="replace every oracle tolerance")
    common.add_argument("--cases", type=int, help="number of random oracle Hamiltonians")
    common.add_argument("--n-list", dest="n_list", type=_int_list, help="sweep values of n, e.g. 2,3,4")
    common.add_argument("--eps-list", dest="eps_list", type=_float_list, help="sweep values of eps")
    common.add_argument("--out", help=f"output directory (default ${ENV_OUT} or ./{DEFAULT_OUT})")
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "text"),
                        help="format printed to stdout")
    parser = argparse.ArgumentParser(
        prog="reeblift",
        description="Build low-systole contact forms on the three-sphere and certify their invariants.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "verify": "select parameters for (n, eps) and check every statement",
        "oracle": "compare closed forms with brute-force integration",
        "sweep": "tabulate invariants over a grid of n and eps",
        "reference": "the round sphere (identity disk map)",
        "plot": "write the four SVG figures for (n, eps)",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def config_from_args(argv: list[str] | None = None) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    values: dict[str, object] = {"command": args.command}
    env_out = os.environ.get(ENV_OUT)
    if env_out:
        values["out"] = env_out
    try:
        if args.config:
            values.update(read_config_file(args.config))
        for key, (name, _) in _KEYS.items():
            v = getattr(args, "fmt" if key == "format" else key, None)
            if v is not None:
                values[name] = v
        cfg = RunConfig(**values)
        cfg.validate()
    except (ValueError, OSError) as exc:
        parser.error(str(exc))
    return cfg


# pipelines -----------------------------------------------------------------


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _tag(x: float) -> str:
    return repr(float(x))


def _invariant_entry(params: ConstructionParams) -> LedgerEntry:
    margins = params.invariant_margins()
    bad = [k for k, m in margins.items() if not m > 0]
    worst = min(margins.values())
    return LedgerEntry("parameter invariants hold", not bad, worst,
                       "violated: " + "; ".join(bad) if bad else "all defining inequalities hold")


def _overridden_params(cfg: RunConfig) -> ConstructionParams:
    if cfg.theta is not None and cfg.eta is not None and cfg.delta is not None:
        return ConstructionParams(cfg.n, cfg.eps, cfg.theta, cfg.eta, cfg.delta)
    base = select_params(cfg.n, cfg.eps, k_max=cfg.k_max)
    changes = {k: getattr(cfg, k) for k in ("theta", "eta", "delta") if getattr(cfg, k) is not None}
    return dataclasses.replace(base, **changes)


def verify_document(cfg: RunConfig) -> dict:
    """Run the verification pipeline for ``cfg`` and return the report document.

    Raises
    ------
    ParameterSearchError
        If no admissible parameters are found.
    ValueError
        If overrides leave the admissible box entirely (e.g. eta >= 1).
    """
    if cfg.has_overrides:
        params = _overridden_params(cfg)
        mapn = verify_mapn(params, cfg.kmax)
        contact = contact_report(params, cfg.kmax)
        ledger = [_invariant_entry(params)] + theorem_ledger(cfg.n, cfg.eps, contact)
        return build_report(params, mapn, contact, ledger)
    rep = verify_theorems(cfg.n, cfg.eps, cfg.k_max)
    return build_report(rep.params, rep.mapn, rep.contact, rep.ledger)


def _failures(doc: dict) -> list[str]:
    """Failing inequalities in check order: parameter invariants, map statements, clauses."""
    found = []
    for e in doc["theorem_ledger"]:
        if not e["passed"] and e["clause"] == "parameter invariants hold":
            found += [f"parameter invariant {x}" for x in e["detail"].removeprefix("violated: ").split("; ")]
    for e in doc["mapn_ledger"]:
        if e["passed"] is False:
            found.append(f"statement ({e['label']}) {e['description']} [margin {e['margin']} at {e['worst']}]")
    for e in doc["theorem_ledger"]:
        if not e["passed"] and e["clause"] != "parameter invariants hold":
            found.append(f"{e['clause']} [{e['detail']}]")
    return found


def _emit(cfg: RunConfig, doc: dict, stem: str, title: str) -> int:
    out = Path(cfg.out)
    _write(out, f"{stem}.json", dumps(doc))
    _write(out, f"{stem}-orbits.csv", orbit_table_csv(doc))
    if cfg.fmt == "json":
        sys.stdout.write(dumps(doc))
    elif cfg.fmt == "csv":
        sys.stdout.write(orbit_table_csv(doc))
    else:
        sys.stdout.write(render_text(doc, title))
    if report_passed(doc):
        return EXIT_OK
    failures = _failures(doc)
    print(f"check failed; first failing inequality: {failures[0]}", file=sys.stderr)
    for f in failures[1:]:
        print(f"  also failing: {f}", file=sys.stderr)
    return EXIT_CHECK_FAILED


def run_verify(cfg: RunConfig) -> int:
    try:
        doc = verify_document(cfg)
    except ParameterSearchError as exc:
        print(f"parameter search failed: {exc}", file=sys.stderr)
        return EXIT_SEARCH_FAILED
    except ValueError as exc:
        print(f"check failed; {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    stem = f"verify-n{cfg.n}-eps{_tag(cfg.eps)}"
    return _emit(cfg, doc, stem, f"verify n={cfg.n} eps={cfg.eps!r}")


def run_reference(cfg: RunConfig) -> int:
    params = ConstructionParams.reference(cfg.n, cfg.eps)
    contact = contact_report(params, cfg.kmax)
    doc = build_report(params, None, contact, reference_ledger(contact, cfg.kmax))
    return _emit(cfg, doc, f"reference-n{cfg.n}", "reference (round sphere)")


def run_oracle(cfg: RunConfig) -> int:
    rep = oracle_suite(seed=cfg.seed, n_cases=cfg.cases, tol=cfg.tol)
    doc = oracle_document(rep)
    _write(Path(cfg.out), f"oracle-seed{cfg.seed}.json", dumps(doc))
    sys.stdout.write(dumps(doc) if cfg.fmt == "json" else render_oracle_text(doc))
    if rep.passed:
        return EXIT_OK
    return EXIT_INFEASIBLE if rep.infeasible else EXIT_CHECK_FAILED


def sweep_rows(cfg: RunConfig) -> list[dict]:
    """One row per (n, eps) cell; failures are recorded and the sweep continues."""
    rows = []
    for n in cfg.n_list:
        for eps in cfg.eps_list:
            row: dict = {"n": n, "eps": repr(float(eps)), "passed": False}
            try:
                rep = verify_theorems(n, eps, cfg.k_max)
            except (ParameterSearchError, ValueError) as exc:
                row["error"] = str(exc)
                rows.append(row)
                continue
            c, c0 = rep.contact, -(n - 1) ** 2 + 2
            row.update(
                passed=bool(rep.passed), rho_sys=repr(c.rho_sys), s=repr(c.s), S=repr(c.S),
                Delta=repr(c.Delta),
                rho_margin=repr(min(c.rho_sys - (n - eps), n - c.rho_sys)),
                s_margin=repr(min(c.s - c0, c0 + eps - c.s)),
                S_error=repr(abs(c.S - 2.0)),
                Delta_margin=repr(min(c.Delta - ((n - 1) ** 2 - eps), (n - 1) ** 2 - c.Delta)),
            )
            rows.append(row)
    return rows


def run_sweep(cfg: RunConfig) -> int:
    from .plots import plot_rho_vs_eps

    rows = sweep_rows(cfg)
    out = Path(cfg.out)
    table = sweep_csv(rows)
    _write(out, "sweep.csv", table)
    _write(out, "sweep.json", json.dumps({"schema_version": "1.0", "rows": rows}, indent=2) + "\n")
    plot_rho_vs_eps(rows, out / "sweep-rho_sys.svg")
    sys.stdout.write(json.dumps(rows, indent=2) + "\n" if cfg.fmt == "json" else table)
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_CHECK_FAILED


def run_plot(cfg: RunConfig) -> int:
    from .plots import emit_plots

    try:
        if cfg.has_overrides:
            params = _overridden_params(cfg)
        else:
            params = verify_theorems(cfg.n, cfg.eps, cfg.k_max).params
    except ParameterSearchError as exc:
        print(f"parameter search failed: {exc}", file=sys.stderr)
        return EXIT_SEARCH_FAILED
    rep = contact_report(params, cfg.kmax)
    for p in emit_plots(params, rep, cfg.out, stem=f"n{cfg.n}"):
        print(p)
    return EXIT_OK


RUNNERS = {"verify": run_verify, "oracle": run_oracle, "sweep": run_sweep,
           "reference": run_reference, "plot": run_plot}


def main(argv: list[str] | None = None) -> int:
    cfg = config_from_args(argv)
    return RUNNERS[cfg.command](cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
