"""``effham`` command line: sweep, decompose, diagnose, discount, contour.

Exit status is 0 when everything completed and passed, 2 when a
diagnostic failed and 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .. import diagnose as dg
from ..effective import sweep
from ..hamlib import HamlibError, decompose_profile, reference_stats
from ..hjsolver import SolverError
from ..minmax import compose_inductive, piece_tables
from .config import ConfigError, RunConfig, describe, load_config
from .contours import contours_json
from .tables import TableFormatError, read_table, write_table

log = logging.getLogger("effham")

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def table_path(out, pipeline, S):
    return os.path.join(out, f"{pipeline}_S{S!r}.csv")


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True, default=float)
        fh.write("\n")


def _extra(cfg: RunConfig, S):
    return {"scale": repr(float(S)), "n": cfg.grid.n, "scheme": cfg.solver.scheme,
            "window": repr(cfg.solver.window), "tol_slope": repr(cfg.solver.tol_slope)}


def _direct(cfg, V):
    return sweep(cfg.hamiltonian, V, cfg.pgrid, cfg.grid, cfg.solver)


def cmd_sweep(cfg: RunConfig, out: str) -> int:
    for V in cfg.potentials():
        log.info("direct sweep at S=%r", V.scale)
        tab = _direct(cfg, V)
        write_table(tab, table_path(out, "direct", V.scale), cfg.digest(), _extra(cfg, V.scale))
    return EXIT_OK


def cmd_decompose(cfg: RunConfig, out: str) -> int:
    if cfg.profile is None:
        raise ConfigError("decompose needs a radial profile in [hamiltonian]")
    plan = decompose_profile(cfg.profile, require_ordering=False)
    summary = {"config_hash": cfg.digest(), "plan": plan.metadata(), "scales": {}}
    for V in cfg.potentials():
        log.info("composed table at S=%r", V.scale)
        st = reference_stats(V)
        pieces = piece_tables(plan, V, cfg.pgrid, cfg.grid, cfg.solver)
        tab = compose_inductive(plan.with_potential(st.min, st.max), pieces)
        if "duality" in cfg.pipelines:
            for j, pt in enumerate(pieces):
                write_table(pt, table_path(out, f"piece{j}", V.scale), cfg.digest(), _extra(cfg, V.scale))
        write_table(tab, table_path(out, "composed", V.scale), cfg.digest(), _extra(cfg, V.scale))
        entry = {"all_converged": tab.all_converged}
        direct = table_path(out, "direct", V.scale)
        if os.path.exists(direct):
            d = read_table(direct)
            ok = d.converged & tab.converged
            entry["max_abs_difference"] = float(np.abs(d.values - tab.values)[ok].max()) if ok.any() else None
        summary["scales"][repr(V.scale)] = entry
    _write_json(os.path.join(out, "decompose.json"), summary)
    return EXIT_OK


def _load_or_sweep(cfg, out, V):
    path = table_path(out, "direct", V.scale)
    if os.path.exists(path):
        return read_table(path)
    tab = _direct(cfg, V)
    write_table(tab, path, cfg.digest(), _extra(cfg, V.scale))
    return tab


def cmd_diagnose(cfg: RunConfig, out: str, checks=None, levels=None) -> int:
    checks = list(checks or cfg.diagnostics.checks)
    levels = levels if levels is not None else cfg.diagnostics.levels
    tol = cfg.diagnostics.level_tolerance
    tables = {V.scale: _load_or_sweep(cfg, out, V) for V in cfg.potentials()}
    reports = []
    for S, tab in tables.items():
        for check in checks:
            if check == "evenness":
                rep = dg.evenness_defect(tab, tol)
            elif check == "quasiconvexity":
                rep = dg.quasiconvexity_check(tab, tol, levels)
            elif check == "levelset":
                if not levels:
                    raise ConfigError("the levelset check needs levels (--levels or diagnostics.levels)")
                for mu in levels:
                    reports.append((S, dg.levelset_convexity(tab, mu, tol)))
                continue
            elif check == "flatpart":
                rep = dg.flat_part(tab, tol)
            else:
                continue
            reports.append((S, rep))
    if "flimit" in checks:
        reports.append((None, dg.compare_flimit(tables, tol, strict=True)))
    payload = {"config_hash": cfg.digest(), "run": describe(cfg), "reports": []}
    for S, rep in reports:
        line = rep.summary() if S is None else f"S={S!r} {rep.summary()}"
        print(line)
        payload["reports"].append({"scale": S, "kind": rep.kind, "passed": rep.passed,
                                   "defect": rep.defect, "tolerance": rep.tolerance,
                                   "witnesses": [list(map(str, w)) for w in rep.witnesses],
                                   "details": {k: v for k, v in rep.details.items()
                                               if isinstance(v, (int, float, str, bool, list))}})
    _write_json(os.path.join(out, "diagnostics.json"), payload)
    return EXIT_OK if all(rep.passed for _, rep in reports) else EXIT_FAILED


def cmd_discount(cfg: RunConfig, out: str, lambdas=None) -> int:
    lambdas = lambdas or list(cfg.discount.lambdas)
    points = cfg.discount.points or [tuple([0.0] * cfg.dimension)]
    payload = {"config_hash": cfg.digest(), "run": describe(cfg), "results": []}
    ok = True
    for V in cfg.potentials():
        for p in points:
            rep = dg.discounted_consistency(cfg.hamiltonian, V, p, lambdas, cfg.grid, cfg.solver,
                                            tolerance=cfg.discount.tolerance)
            print(f"S={V.scale!r} p={tuple(p)} {rep.summary()}")
            ok &= rep.passed
            payload["results"].append({"scale": V.scale, "p": list(p), "passed": rep.passed,
                                       "defects": rep.details["defects"], "hbar": rep.details["hbar"],
                                       "lambdas": lambdas})
    _write_json(os.path.join(out, "discount.json"), payload)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_contour(cfg: RunConfig, out: str, levels=None) -> int:
    if cfg.dimension != 2:
        raise ConfigError("contours need a 2-D configuration")
    for V in cfg.potentials():
        tab = _load_or_sweep(cfg, out, V)
        lv = levels if levels is not None else cfg.diagnostics.levels
        if lv is None:
            lo, hi = float(tab.values.min()), float(tab.values.max())
            lv = list(np.linspace(lo, hi, 12)[1:-1])
        text = contours_json(tab, lv)
        with open(os.path.join(out, f"contours_S{V.scale!r}.json"), "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="effham", description="Effective Hamiltonians of periodic cell problems.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("sweep", "direct big-T tables for every scale"),
                           ("decompose", "tables composed from monotone pieces"),
                           ("diagnose", "structural checks on the direct tables"),
                           ("discount", "discounted-problem consistency"),
                           ("contour", "iso-lines of 2-D tables as JSON")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", required=True, help="TOML run configuration")
        sp.add_argument("--out", help="output directory (default: [run] output)")
        if name == "diagnose":
            sp.add_argument("--check", action="append", choices=dg.KINDS[:5],
                            help="check to run; repeat for several")
        if name in ("diagnose", "contour"):
            sp.add_argument("--levels", type=_floats, help="comma-separated levels")
        if name == "discount":
            sp.add_argument("--lambda", dest="lambdas", type=_floats, help="comma-separated discounts")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        out = args.out or cfg.output
        os.makedirs(out, exist_ok=True)
        if args.command == "sweep":
            return cmd_sweep(cfg, out)
        if args.command == "decompose":
            return cmd_decompose(cfg, out)
        if args.command == "diagnose":
            return cmd_diagnose(cfg, out, args.check, args.levels)
        if args.command == "discount":
            return cmd_discount(cfg, out, args.lambdas)
        return cmd_contour(cfg, out, args.levels)
    except (ConfigError, HamlibError, SolverError, TableFormatError, OSError, ValueError) as exc:
        print(f"effham: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
