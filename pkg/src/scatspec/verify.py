"""Delta sweeps of the full pipeline and their machine-readable reports.

For every ``delta`` in the config the model is rebuilt at size
``L(delta) = ceil(L_factor / delta)``, the spectrum of ``A(delta)`` is
computed, and the counts ``N_{+-A}(s, inf)`` are compared with ``N0(s)`` at
the safe thresholds of the predicted limit set.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ScatSpecError, StageError
from .hankel import singular_values
from .limitset import N0, RESOLUTION_FLOOR, build_sigma0, local_gap, safe_thresholds
from .models import (LatticeModel, PotentialSpec, build_continuum_pair, build_lattice_pair,
                     potential_from_descriptor)
from .scattering import continuum_smatrix, stationary_smatrix, transfer_smatrix
from .spectral import UNSTABLE_BAND, count_above_sorted, difference_spectrum
from .symbols import SymbolFunction, symbol_from_descriptor

__all__ = [
    "ExperimentConfig",
    "CountingReport",
    "load_config",
    "config_from_dict",
    "lattice_size",
    "scattering_model",
    "run_sweep",
    "emit",
    "report_json",
    "counts_csv",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = ("delta", "s", "n_plus", "n_minus", "n0", "match")
SIGNIFICANT = 12
TRANSFER_AGREEMENT = 1e-8


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed experiment config (see ``configs/`` for examples).

    ``match_required_below``: match flags are required for every ``delta`` at
    or below this value (``None`` means all of them).
    """

    model: dict
    potential: PotentialSpec
    lam: float
    symbol: SymbolFunction
    deltas: tuple
    L_factor: float = 40.0
    hankel_M: int = 64
    tolerances: dict = field(default_factory=dict)
    match_required_below: Optional[float] = None
    name: str = "experiment"
    raw: dict = field(default_factory=dict, compare=False)

    @property
    def kind(self) -> str:
        return self.model.get("kind", "lattice")

    @property
    def sigma0_floor(self) -> float:
        return float(self.tolerances.get("sigma0_floor", RESOLUTION_FLOOR))

    def validate(self):
        d = self.deltas
        if any(x <= 0 for x in d):
            raise ValueError("deltas must be positive")
        if any(b >= a for a, b in zip(d, d[1:])):
            raise ValueError("deltas must be strictly decreasing")
        if self.L_factor <= 0:
            raise ValueError("L_factor must be positive")
        if self.kind == "lattice":
            if not abs(self.lam) < 2.0 - 1e-3:
                raise ValueError(f"lambda={self.lam} is not inside the lattice band (-2, 2) with margin")
        elif self.kind == "continuum":
            if not self.lam > 0.05:
                raise ValueError(f"lambda={self.lam} must exceed 0.05 for the continuum model")
            for key in ("X", "n"):
                if key not in self.model:
                    raise ValueError(f"continuum model needs {key!r}")
        else:
            raise ValueError(f"unknown model kind {self.kind!r}")
        return self


def config_from_dict(raw: dict) -> ExperimentConfig:
    cfg = ExperimentConfig(
        model=dict(raw.get("model", {"kind": "lattice"})),
        potential=potential_from_descriptor(raw["potential"]),
        lam=float(raw.get("lambda", 0.0)),
        symbol=symbol_from_descriptor(raw.get("symbol", {"kind": "poisson", "a": 1.0})),
        deltas=tuple(float(x) for x in raw.get("deltas", ())),
        L_factor=float(raw.get("L_factor", 40.0)),
        hankel_M=int(raw.get("hankel_M", 64)),
        tolerances=dict(raw.get("tolerances", {})),
        match_required_below=raw.get("match_required_below"),
        name=str(raw.get("name", "experiment")),
        raw=raw,
    )
    return cfg.validate()


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(raw)


def lattice_size(cfg: ExperimentConfig, delta: float) -> int:
    """``max(ceil(L_factor / delta), 4 * reach)`` for lattice models."""
    L = math.ceil(cfg.L_factor / delta - 1e-9)
    sites = cfg.potential.sites() if cfg.potential.kind == "point-masses" else {}
    if sites:
        L = max(L, 4 * max(abs(n) for n in sites))
    return L


def scattering_model(cfg: ExperimentConfig) -> LatticeModel:
    """Smallest admissible lattice carrying the config's potential (``S`` ignores ``L``)."""
    sites = cfg.potential.sites()
    return LatticeModel(max(1, 4 * max((abs(n) for n in sites), default=0)), cfg.potential)


def continuum_size(cfg: ExperimentConfig, delta: float) -> tuple[float, int]:
    """Box half-length ``max(X, L_factor / delta)`` at the config's grid step."""
    X0, n0 = float(cfg.model["X"]), int(cfg.model["n"])
    h = 2 * X0 / (n0 + 1)
    X = max(X0, cfg.L_factor / delta)
    n = max(n0, int(round(2 * X / h)) - 1)
    return X, n


def _r(x):
    """Round to a fixed number of significant digits for stable serialisation."""
    if isinstance(x, float):
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{SIGNIFICANT}g}")
    if isinstance(x, dict):
        return {str(k): _r(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_r(v) for v in x]
    if isinstance(x, np.generic):
        return _r(x.item())
    return x


@dataclass
class CountingReport:
    """Results of one sweep.  ``rows`` holds one entry per ``(delta, s)``."""

    name: str
    config: dict
    tolerances: dict
    scattering: dict = field(default_factory=dict)
    hankel: dict = field(default_factory=dict)
    sigma0: dict = field(default_factory=dict)
    thresholds: list = field(default_factory=list)
    deltas: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.summary.get("passed", False)) and not self.errors

    def to_dict(self) -> dict:
        # timings are excluded: report.json must be byte-stable across reruns
        return _r({
            "name": self.name,
            "config": self.config,
            "tolerances": self.tolerances,
            "scattering": self.scattering,
            "hankel": self.hankel,
            "sigma0": self.sigma0,
            "thresholds": self.thresholds,
            "deltas": self.deltas,
            "rows": self.rows,
            "errors": self.errors,
            "warnings": self.warnings,
            "summary": self.summary,
        })


def _scattering_stage(cfg: ExperimentConfig):
    if cfg.kind == "lattice":
        model = scattering_model(cfg)
        sc, ing = stationary_smatrix(model, cfg.lam)
        tr = transfer_smatrix(model, cfg.lam)
        diff = float(np.max(np.abs(sc.S - tr.S)))
        info = sc.to_dict()
        info.update(transfer_difference=diff, transfer_ok=diff <= TRANSFER_AGREEMENT,
                    condition_number=ing.condition_number, det_residual=sc.det_residual)
        return sc, info
    sc = continuum_smatrix(float(cfg.model["X"]), int(cfg.model["n"]), cfg.potential, cfg.lam)
    info = sc.to_dict()
    info.update(richardson_delta=sc.extra["richardson_delta"], det_residual=sc.det_residual)
    return sc, info


def _delta_stage(cfg: ExperimentConfig, delta: float, ls, thresholds):
    t0 = time.perf_counter()
    if cfg.kind == "lattice":
        L = lattice_size(cfg, delta)
        h0, h, _ = build_lattice_pair(L, cfg.potential)
        size = {"L": L}
    else:
        X, n = continuum_size(cfg, delta)
        h0, h, _ = build_continuum_pair(X, n, cfg.potential)
        size = {"X": X, "n": n}
    eig = difference_spectrum(h0, h, cfg.symbol, delta, cfg.lam).eigenvalues
    elapsed = time.perf_counter() - t0

    rows = []
    for s in thresholds:
        n_plus, n_minus = count_above_sorted(eig, s)
        n0 = N0(ls, s)
        unstable = bool(eig.size and min(np.min(np.abs(eig - s)), np.min(np.abs(eig + s))) < UNSTABLE_BAND)
        rows.append({"delta": delta, "s": s, "n_plus": n_plus, "n_minus": n_minus, "n0": n0,
                     "match": n_plus == n0 and n_minus == n0, "unstable": unstable})

    windows = []
    for i, (nu, k) in enumerate(zip(ls.values, ls.multiplicities)):
        rho = local_gap(ls, i) / 3.0
        cp = int(np.count_nonzero((eig > nu - rho) & (eig < nu + rho)))
        cm = int(np.count_nonzero((eig > -nu - rho) & (eig < -nu + rho)))
        windows.append({"nu": nu, "multiplicity": k, "rho": rho, "count_plus": cp,
                          "count_minus": cm, "ok": cp == k and cm == k})

    top = eig[np.argsort(-np.abs(eig), kind="stable")[:10]]
    info = {"delta": delta, **size, "dim": int(eig.size),
            "top_eigenvalues": [float(x) for x in top], "windows": windows}
    return info, rows, elapsed


def run_sweep(cfg: ExperimentConfig, jobs: int = 1, strict: bool = False) -> CountingReport:
    """Run the sweep described by ``cfg``.

    Raises
    ------
    StageError
        When a stage fails.  The partially filled report is attached as
        ``exc.report``.
    """
    tolerances = {
        "sigma0_floor": cfg.sigma0_floor,
        "merge": 1e-9,
        "hankel_convergence": 1e-7,
        "unstable_band": UNSTABLE_BAND,
        "transfer_agreement": TRANSFER_AGREEMENT,
        "window_radius": "local_gap/3",
        "L_factor": cfg.L_factor,
    }
    report = CountingReport(cfg.name, cfg.raw, tolerances)
    if not cfg.deltas:
        raise ValueError("delta list is empty")

    def fail(stage, delta, exc):
        report.errors.append({"stage": stage, "delta": delta, "error": f"{type(exc).__name__}: {exc}"})
        err = StageError(stage, delta, exc)
        err.report = report
        return err

    t0 = time.perf_counter()
    try:
        sc, report.scattering = _scattering_stage(cfg)
    except (ScatSpecError, ValueError, ArithmeticError) as exc:
        raise fail("scattering", None, exc) from exc
    report.timings["scattering"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    try:
        hs = singular_values(cfg.symbol, cfg.hankel_M)
    except (ScatSpecError, ValueError, ArithmeticError) as exc:
        raise fail("hankel", None, exc) from exc
    report.hankel = hs.to_dict()
    report.timings["hankel"] = time.perf_counter() - t0

    try:
        ls = build_sigma0(hs, sc, floor=cfg.sigma0_floor)
        thresholds = safe_thresholds(ls)
    except (ScatSpecError, ValueError) as exc:
        raise fail("limitset", None, exc) from exc
    report.sigma0 = ls.to_dict()
    report.thresholds = list(thresholds)

    def job(delta):
        try:
            return delta, _delta_stage(cfg, delta, ls, thresholds), None
        except (ScatSpecError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            return delta, None, exc

    with ThreadPoolExecutor(max_workers=max(1, int(jobs))) as pool:
        results = {d: (out, exc) for d, out, exc in pool.map(job, cfg.deltas)}

    first_error = None
    for delta in cfg.deltas:
        out, exc = results[delta]
        if exc is not None:
            first_error = first_error or fail("delta-spectrum", delta, exc)
            continue
        info, rows, elapsed = out
        report.deltas.append(info)
        report.rows.extend(rows)
        report.timings[f"delta={delta:g}"] = elapsed

    report.summary = _summarize(cfg, report, strict)
    if first_error is not None:
        raise first_error
    return report


def _summarize(cfg, report, strict):
    required = [d for d in cfg.deltas
                if cfg.match_required_below is None or d <= cfg.match_required_below + 1e-15]
    req_rows = [r for r in report.rows if r["delta"] in required]
    matches_ok = bool(req_rows) and all(r["match"] for r in req_rows)

    # soft property: once matched at some delta, a threshold stays matched
    onset = []
    for s in report.thresholds:
        seq = [r for r in report.rows if r["s"] == s]
        seen = False
        for r in seq:
            if r["match"]:
                seen = True
            elif seen:
                onset.append({"s": s, "delta": r["delta"]})
    for v in onset:
        report.warnings.append({"kind": "onset", **v})
    for r in report.rows:
        if r["unstable"]:
            report.warnings.append({"kind": "unstable-threshold", "delta": r["delta"], "s": r["s"]})

    smallest = report.deltas[-1] if report.deltas and report.deltas[-1]["delta"] == cfg.deltas[-1] else None
    windows_ok = smallest is not None and all(c["ok"] for c in smallest["windows"])
    first_match = None
    for info in reversed(report.deltas):
        if all(r["match"] for r in report.rows if r["delta"] == info["delta"]):
            first_match = info["delta"]
        else:
            break
    checks = {"matches": matches_ok, "windows": windows_ok}
    if "transfer_ok" in report.scattering:
        checks["transfer_agreement"] = bool(report.scattering["transfer_ok"])
    passed = all(checks.values()) and not (strict and report.warnings)
    return {"checks": checks, "passed": passed, "strict": strict,
            "smallest_delta_all_matching_from": first_match, "required_deltas": required}


def report_json(reports: Sequence[CountingReport]) -> str:
    return json.dumps({"runs": [r.to_dict() for r in reports]}, indent=2, sort_keys=True) + "\n"


def counts_csv(reports: Sequence[CountingReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep in reports:
        for row in rep.to_dict()["rows"]:
            w.writerow([repr(row["delta"]), repr(row["s"]), row["n_plus"], row["n_minus"], row["n0"],
                        "true" if row["match"] else "false"])
    return buf.getvalue()


def emit(report, out_dir) -> dict:
    """Write ``report.json``, ``counts.csv`` and (separately) ``timings.json``.

    ``report`` may be a single :class:`CountingReport`, a sequence of them, or
    ``None``/empty for an empty ``runs`` array.  Returns the written paths.
    """
    if report is None:
        reports = []
    elif isinstance(report, CountingReport):
        reports = [report]
    else:
        reports = list(report)
    out = Path(out_dir)
    paths = {"report": out / "report.json", "counts": out / "counts.csv", "timings": out / "timings.json"}
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths["report"].write_text(report_json(reports))
        paths["counts"].write_text(counts_csv(reports))
        timings = {r.name: r.timings for r in reports}
        paths["timings"].write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write report to {out}: {exc}") from exc
    return paths
