"""Command line entry point: ``scatspec <verb> --config cfg.json --out DIR``.

Verbs
-----
hankel-sv       Hankel singular values of the config's symbol.
scatter         Scattering matrix (both routes for lattice models) and
                determinant checks, optionally over a ``lambdas`` grid.
limitset        Predicted limit set, its counting function and safe thresholds.
model-op-check  Model-operator spectrum vs. limit set, and dilation invariance.
verify-theorem  Full delta sweep; writes report.json and counts.csv.

The exit code is 0 only if every check in the written output passed.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ScatSpecError, StageError
from .hankel import singular_values
from .limitset import N0, build_sigma0, safe_thresholds
from .model_operator import check_scaling, spectrum_check, random_unitary, smatrix_result
from .scattering import UNITARITY_TOL, continuum_smatrix, stationary_smatrix, transfer_smatrix
from .verify import _r, config_from_dict, emit, run_sweep, scattering_model

log = logging.getLogger("scatspec")


def _write(out: Path, name: str, payload: dict):
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(json.dumps(_r(payload), indent=2, sort_keys=True) + "\n")
    log.info("wrote %s", path)
    return path


def _scatter_at(cfg, lam):
    if cfg.kind == "lattice":
        model = scattering_model(cfg)
        st, ing = stationary_smatrix(model, lam)
        tr = transfer_smatrix(model, lam)
        diff = float(np.max(np.abs(st.S - tr.S)))
        entry = {"lambda": lam, "stationary": st.to_dict(), "transfer": tr.to_dict(),
                 "difference": diff, "condition_number": ing.condition_number,
                 "det_residual": max(st.det_residual, tr.det_residual)}
        ok = diff <= 1e-8 and max(st.unitarity_defect, tr.unitarity_defect) <= UNITARITY_TOL \
            and entry["det_residual"] <= 1e-10
        return st, entry, ok
    sc = continuum_smatrix(float(cfg.model["X"]), int(cfg.model["n"]), cfg.potential, lam)
    entry = {"lambda": lam, "continuum": sc.to_dict(), "det_residual": sc.det_residual,
             "richardson_delta": sc.extra["richardson_delta"]}
    return sc, entry, sc.unitarity_defect <= UNITARITY_TOL and sc.det_residual <= 1e-10


def cmd_hankel_sv(cfg, args):
    hs = singular_values(cfg.symbol, cfg.hankel_M)
    _write(args.out, "hankel.json", {"symbol": cfg.symbol.label, **hs.to_dict(limit=cfg.hankel_M)})
    return True


def cmd_scatter(cfg, args):
    lams = cfg.raw.get("lambdas", [cfg.lam])
    entries, ok = [], True
    for lam in lams:
        _, entry, good = _scatter_at(cfg, float(lam))
        entries.append({**entry, "ok": good})
        ok &= good
    _write(args.out, "scatter.json", {"runs": entries, "passed": ok})
    return ok


def cmd_limitset(cfg, args):
    sc, _, ok = _scatter_at(cfg, cfg.lam)
    hs = singular_values(cfg.symbol, cfg.hankel_M)
    ls = build_sigma0(hs, sc, floor=cfg.sigma0_floor)
    thr = safe_thresholds(ls)
    _write(args.out, "limitset.json", {"sigma0": ls.to_dict(), "thresholds": thr,
                                       "N0": {f"{s:.12g}": N0(ls, s) for s in thr},
                                       "scattering_ok": ok})
    return ok


def cmd_model_op_check(cfg, args):
    M = cfg.hankel_M
    sc, _, ok = _scatter_at(cfg, cfg.lam)
    reports = {"pipeline": spectrum_check(cfg.symbol, sc, M).to_dict()}
    rng = np.random.default_rng(int(cfg.raw.get("seed", 0)))
    for i in range(int(cfg.raw.get("random_unitaries", 3))):
        reports[f"random_{i}"] = spectrum_check(cfg.symbol, smatrix_result(random_unitary(2, rng)), M).to_dict()
    scaling = check_scaling(cfg.symbol, cfg.raw.get("scaling_deltas", [0.5, 1.0, 2.0]), sc, M=M)
    passed = ok and scaling.passed and all(r["passed"] for r in reports.values())
    _write(args.out, "model_op.json", {"spectrum_match": reports, "scaling": scaling.to_dict(), "passed": passed})
    return passed


def cmd_verify_theorem(cfg, args):
    try:
        report = run_sweep(cfg, jobs=args.jobs, strict=args.strict)
    except StageError as exc:
        log.error("%s", exc)
        emit(exc.report, args.out)
        return False
    emit(report, args.out)
    for key, val in report.summary["checks"].items():
        log.info("%-20s %s", key, "PASS" if val else "FAIL")
    return report.passed


COMMANDS = {
    "hankel-sv": cmd_hankel_sv,
    "scatter": cmd_scatter,
    "limitset": cmd_limitset,
    "model-op-check": cmd_model_op_check,
    "verify-theorem": cmd_verify_theorem,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="scatspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in COMMANDS:
        p = sub.add_parser(verb)
        p.add_argument("--config", required=True, type=Path, help="JSON experiment config")
        p.add_argument("--out", required=True, type=Path, help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="concurrent delta points")
        p.add_argument("--strict", action="store_true", help="treat warnings as errors")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_dict(json.loads(args.config.read_text()))
    except (OSError, ValueError, KeyError) as exc:
        print(f"scatspec: bad config {args.config}: {exc}", file=sys.stderr)
        return 2
    try:
        with warnings.catch_warnings():
            if args.strict:
                warnings.simplefilter("error")
            ok = COMMANDS[args.verb](cfg, args)
    except (ScatSpecError, ValueError, ArithmeticError, Warning) as exc:
        print(f"scatspec {args.verb}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"scatspec {args.verb}: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
