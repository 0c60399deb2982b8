"""Command line entry point: ``pdecert <subcommand> [--config PATH] ...``.

Exit codes: 0 all certificates pass, 2 a certificate failed, 3 the solver
failed, 4 the configuration is invalid.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import advdiff as ad
from . import heat
from . import inequalities as iq
from . import moser
from . import navier_stokes as ns
from . import presets
from .certificates import FAIL, INDETERMINATE, PASS, BoundCertificate, combine
from .exceptions import ConfigError, DomainError, PdeCertError
from .grid import Field, GridSpec, lp_norm
from .report import fmt, line_chart, load_config, write_csv, write_json

ENV_OUT = "PDECERT_OUT"
EXIT_OK, EXIT_CERT, EXIT_SOLVER, EXIT_CONFIG = 0, 2, 3, 4


@dataclass
class RunReport:
    command: str
    scenario_id: str
    seed: int
    config: dict
    certificates: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    solver: dict = field(default_factory=dict)
    solver_failed: bool = False

    def add(self, cert: BoundCertificate):
        self.certificates.append(cert)

    @property
    def all_pass(self) -> bool:
        return all(c.status != FAIL for c in self.certificates)

    @property
    def exit_code(self) -> int:
        if self.solver_failed:
            return EXIT_SOLVER
        return EXIT_OK if self.all_pass else EXIT_CERT

    def cert_rows(self):
        rows = []
        for c in self.certificates:
            rows.append({
                "name": c.name,
                "status": c.status,
                "pass": c.status != FAIL,
                "degenerate": c.status == INDETERMINATE,
                "lhs": c.lhs,
                "rhs": c.rhs,
                "constant": c.constant,
                "min_margin": c.details.get("min_margin", c.margin),
            })
        return rows

    def to_dict(self):
        return {
            "command": self.command,
            "scenario_id": self.scenario_id,
            "seed": self.seed,
            "config": self.config,
            "verdicts": self.verdicts,
            "certificates": self.cert_rows(),
            "files": sorted(self.files),
            "solver": self.solver,
            "all_pass": self.all_pass,
        }


def scenario_id(command, config) -> str:
    blob = json.dumps({"command": command, "config": config}, sort_keys=True, default=str)
    return f"{command}-{hashlib.sha256(blob.encode()).hexdigest()[:12]}"


def _new_report(command, cfg):
    return RunReport(command, scenario_id(command, cfg), int(cfg.get("seed", 0)), dict(cfg))


def _finish(report: RunReport, out: Path, series_rows=None, svg=None):
    out.mkdir(parents=True, exist_ok=True)
    if series_rows is not None:
        write_csv(out / "series.csv", ["t", "quantity", "value"], series_rows)
        report.files.append("series.csv")
    if svg is not None:
        (out / "plot.svg").write_text(svg)
        report.files.append("plot.svg")
    report.files.append("report.json")
    write_json(out / "report.json", report.to_dict())
    return report


# ns-decay -------------------------------------------------------------------------

NS_SCHEMA = {
    "preset": (str, "taylor-green"),
    "N": (int, 64),
    "L": (float, 2 * math.pi),
    "nu": (float, 0.5),
    "dt": (float, 5e-3),
    "t_final": (float, 2.0),
    "l2": (float, 1.0),
    "amplitude": (float, 1.0),
    "seed": (int, 0),
    "snapshot_every": (int, 20),
    "checkpoint": (float, 0.0),
    "m": (int, 1),
    "cfl": (float, 1.0),
    "energy_tol": (float, 1e-6),
    "q_tol": (float, 5e-2),
}


def _eventually_decreasing(series, rtol=1e-9) -> BoundCertificate:
    """Second half of a weighted series never increases by more than rtol."""
    v = series.values
    tail = v[len(v) // 2:]
    if len(tail) < 2 or tail.max() == 0:
        return BoundCertificate(f"decay_trend[{series.quantity}]", 0.0, 0.0, status=INDETERMINATE)
    jumps = np.diff(tail) - rtol * tail[:-1]
    worst = float(max(jumps.max(), 0.0))
    return BoundCertificate(f"decay_trend[{series.quantity}]", worst, 0.0)


def run_ns_decay(cfg: dict, out: Path, svg=False) -> RunReport:
    if cfg["preset"] not in presets.NS_PRESETS:
        raise ConfigError(f"unknown preset {cfg['preset']!r}; choose from {presets.NS_PRESETS}")
    report = _new_report("ns-decay", cfg)
    grid = presets.ns_grid(cfg["preset"], cfg["N"], cfg["L"])
    u0 = presets.ns_initial(cfg["preset"], grid, cfg["seed"], cfg["l2"], cfg["amplitude"])
    state0 = ns.NSState.initial(u0, cfg["nu"], cfl=cfg["cfl"])
    try:
        state = ns.integrate(state0, cfg["t_final"], cfg["dt"], snapshot_every=cfg["snapshot_every"])
    except PdeCertError as exc:
        report.solver_failed = True
        report.verdicts["solver_error"] = f"{type(exc).__name__}: {exc}"
        return _finish(report, out, list(state0.history.to_rows()))
    report.solver = {"steps": state.steps, "rejections": 0}
    report.add(ns.energy_certificate(state, tol=cfg["energy_tol"]))
    u_l2 = lp_norm(state0.u, 2)
    onset = ns.gradient_monotonicity_onset(state)
    report.verdicts["gradient_onset"] = onset
    if grid.n == 3:
        certs = [ns.q_estimate_certificate(state0, lag, tol=cfg["q_tol"]) for lag in (0.1, 1.0)]
        for c in certs:
            c.name = f"q_estimate[lag={c.details['lag']:g}]"
            report.add(c)
        report.add(ns.trilinear_certificate(state0.u))
        bound = ns.tstar_bound(cfg["nu"], u_l2)
        report.verdicts["tstar_bound"] = bound
        if u_l2 > 0:
            ok = ns.tstar_below_ceiling(cfg["nu"], u_l2)
            ceiling = float(ns.TSTAR_CEILING) * cfg["nu"] ** -5 * u_l2**4
            # status from the exact rational comparison, not the float one
            report.add(BoundCertificate("tstar_ceiling", bound, ceiling, status=PASS if ok else FAIL))
        else:
            report.add(BoundCertificate("tstar_ceiling", 0.0, 0.0, status=INDETERMINATE))
        if onset is None:
            report.add(BoundCertificate("onset_below_tstar", math.inf, bound, status=FAIL))
        else:
            report.add(BoundCertificate("onset_below_tstar", onset, bound))
    rows = list(state.history.to_rows())
    snaps = [t for t, _ in state.snapshots if t >= cfg["checkpoint"]]
    if len(snaps) >= 2:
        t0 = snaps[0]
        u_t0 = dict(state.snapshots)[t0]
        chk = ns.LerayCheckpoint(t0, u_t0)
        for m in range(cfg["m"] + 1):
            a, b = ns.decay_monitor(state, chk, m)
            report.add(_eventually_decreasing(a))
            report.verdicts[f"max_heat_error_m{m}"] = float(b.values.max())
            rows += [(t, a.quantity, v) for t, v in zip(a.times, a.values)]
            rows += [(t, b.quantity, v) for t, v in zip(b.times, b.values)]
    if cfg["preset"] == "taylor-green":
        exact = u0 * math.exp(-2 * cfg["nu"] * state.t)
        err = float(np.abs(state.u.values - exact.values).max())
        scale = max(lp_norm(u0, math.inf), 1e-300)
        report.add(BoundCertificate("taylor_green_exact", err, 1e-8 * scale))
    picture = None
    if svg:
        h = state.history
        picture = line_chart({q: (h[q].times, h[q].values) for q in ("W", "D1_L2", "dissipation")},
                             title=f"ns-decay {cfg['preset']}")
    return _finish(report, out, rows, picture)


# heat-check --------------------------------------------------------------------------

HEAT_SCHEMA = {
    "n": (int, 1),
    "N": (int, 0),
    "nu": (float, 1.0),
    "T": (float, 1.0),
    "datum": (str, "dipole"),
    "window_start": (float, 0.2),
    "per_decade": (int, 10),
    "slope_tol": (float, 0.1),
    "taus": ("floats", [0.1, 1.0, 10.0]),
    "smoothing_K": (float, 1.0),
    "seed": (int, 0),
}
HEAT_DEFAULT_N = {1: 4096, 2: 1024, 3: 256}
SMOOTH_N = {1: 1024, 2: 256, 3: 64}


def heat_decay_setup(n, nu, T, datum="dipole", N=0):
    """Grid with L = 40 sqrt(nu T) and a datum of width one cell."""
    N = N or HEAT_DEFAULT_N[n]
    L = 40 * math.sqrt(nu * T)
    grid = GridSpec(n, N, L)
    s2 = grid.dx**2
    if datum == "dipole":
        u0 = Field.from_function(grid, lambda *x: x[0] * np.exp(-sum(xi**2 for xi in x) / (2 * s2)))
        expected = -(n / 4 + 0.5)
    elif datum == "gaussian":
        u0 = Field.from_function(grid, lambda *x: np.exp(-sum(xi**2 for xi in x) / (2 * s2)))
        expected = -n / 4
    else:
        raise ConfigError(f"datum must be 'dipole' or 'gaussian', got {datum!r}")
    return u0, expected


def run_heat_check(cfg: dict, out: Path, svg=False) -> RunReport:
    n = cfg["n"]
    if n not in (1, 2, 3):
        raise ConfigError("n must be 1, 2 or 3")
    report = _new_report("heat-check", cfg)
    nu, T = cfg["nu"], cfg["T"]
    u0, expected = heat_decay_setup(n, nu, T, cfg["datum"], cfg["N"])
    times = heat.geometric_times(cfg["window_start"] * T, T, cfg["per_decade"])
    series = heat.l2_decay_series(u0, nu, times)
    slope = series.loglog_slope()
    report.verdicts.update({"fitted_slope": slope, "expected_slope": expected})
    report.add(BoundCertificate("decay_slope", abs(slope - expected), cfg["slope_tol"],
                                details={"slope": slope}))
    sgrid = GridSpec(n, SMOOTH_N[n], 40 * math.sqrt(nu * T))
    g = Field.from_function(sgrid, lambda *x: np.exp(-sum(xi**2 for xi in x) / 4.0))
    alpha = [1] + [0] * (n - 1)
    ratios = []
    for tau in cfg["taus"]:
        c = heat.smoothing_certificate(g, nu, tau, alpha, 1.0, K=cfg["smoothing_K"])
        c.name = f"smoothing[tau={tau:g}]"
        ratios.append(c.details["ratio"])
        report.add(c)
    report.verdicts["smoothing_ratios"] = ratios
    c2 = heat.smoothing_certificate(g, nu, cfg["taus"][0], [0] * n, 2.0)
    c2.name = "l2_contraction"
    report.add(c2)
    rows = [(t, "L2", v) for t, v in zip(series.times, series.values)]
    picture = line_chart({"L2": (series.times, series.values)}, title="heat decay") if svg else None
    return _finish(report, out, rows, picture)


# advdiff-run -----------------------------------------------------------------------

AD_SCHEMA = {
    "scenario": (str, ""),
    "n": (int, 1),
    "N": (int, 256),
    "L": (float, 20.0),
    "kappa": (float, 0.0),
    "p0": (int, 1),
    "b": (str, "sine"),
    "b_strength": (float, 1.0),
    "A": (str, "identity"),
    "A_amp": (float, 0.5),
    "f": (str, "none"),
    "f_strength": (float, 1.0),
    "u0": (str, "gaussian"),
    "amplitude": (float, 1.0),
    "width": (float, 1.0),
    "seed": (int, 0),
    "t_final": (float, 2.0),
    "p_set": ("floats", [1.0, 2.0]),
    "linfty_p": ("floats", [1.0]),
    "audit_q": ("floats", [2.0]),
    "audit_tol": (float, 1e-2),
    "cap_factor": (float, 1e6),
    "dt_floor": (float, 1e-10),
    "cfl": (float, 0.5),
    "max_steps": (int, 400000),
}
_PROBLEM_KEYS = ("n", "N", "L", "kappa", "b", "b_strength", "A", "A_amp", "f", "f_strength",
                 "u0", "amplitude", "width", "seed", "p0")


def build_problem(cfg):
    keys = {k: cfg[k] for k in _PROBLEM_KEYS}
    if cfg["scenario"]:
        named = {d["name"]: d for d in presets.HETEROGENEOUS}
        if cfg["scenario"] not in named:
            raise ConfigError(f"unknown scenario {cfg['scenario']!r}; choose from {sorted(named)}")
        keys = dict(named[cfg["scenario"]])
        keys.pop("name")
    try:
        return presets.problem(horizon=cfg["t_final"], name=cfg["scenario"], **keys)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def advdiff_certificates(result: ad.RunResult, cfg) -> list:
    spec = result.spec
    certs = [ad.mass_certificate(result)]
    for p in cfg["p_set"]:
        if p >= spec.p0:
            certs.append(ad.lp_growth_certificate(result, p))
    for p in cfg["linfty_p"]:
        certs.append(ad.linfty_bound_certificate(result, p))
    for q in cfg["audit_q"]:
        if len(result.trackers) >= 3:
            certs.append(ad.energy_identity_audit(result, q, tol=cfg["audit_tol"]))
    if 1.0 in result.trackers.p_set and 2.0 in result.trackers.p_set and 2.0 in result.trackers.audit_q \
            and 2 > 2 * spec.n * spec.kappa and spec.source is None:
        params = moser.IterationParams(spec.n, spec.kappa, 1.0)
        live = [moser.growth_step_certificate(s, params) for s in ad.growth_samples(result, 2.0)]
        live = [c for c in live if not c.details["inert"]]
        certs.append(combine("growth_step[q=2]", live) if live else
                     BoundCertificate("growth_step[q=2]", 0.0, 0.0, status=INDETERMINATE))
    if np.all(spec.u0.scalar >= 0):
        low = float(result.trackers.array("min").min())
        certs.append(BoundCertificate("positivity", -low, 1e-12 * result.u0_norms[math.inf]))
    return certs


def run_advdiff(cfg: dict, out: Path, svg=False) -> RunReport:
    for p in cfg["linfty_p"]:
        if not p > cfg["n"] * cfg["kappa"]:
            raise ConfigError(f"linfty_p = {p} must exceed n*kappa (criticality)")
    report = _new_report("advdiff-run", cfg)
    spec = build_problem(cfg)
    try:
        result = ad.Solver(spec, p_set=cfg["p_set"], audit_q=cfg["audit_q"], cfl=cfg["cfl"],
                           cap_factor=cfg["cap_factor"], dt_floor=cfg["dt_floor"]).run(
            cfg["t_final"], max_steps=cfg["max_steps"])
    except PdeCertError as exc:
        report.solver_failed = True
        report.verdicts["solver_error"] = f"{type(exc).__name__}: {exc}"
        return _finish(report, out)
    report.solver = {"steps": result.state.steps, "rejections": 0}
    existence = ad.global_existence_verdict(spec)
    report.verdicts.update({"run": result.verdict, "blow_up_time": result.blow_up_time,
                            "max_sup_norm": result.max_sup_norm, "theorem": existence.verdict})
    for c in advdiff_certificates(result, cfg):
        report.add(c)
    if existence.verdict.startswith("global"):
        report.add(BoundCertificate("existence_soundness", float(result.verdict == ad.BLOW_UP), 0.0))
    tr = result.trackers
    rows = []
    for key in sorted(tr.data):
        for t, v in zip(tr.times, tr.data[key]):
            rows.append((t, key, v))
    picture = None
    if svg:
        picture = line_chart({k: (tr.times, tr.array(k)) for k in ("sup", "L2", "Bmu") if k in tr.data},
                             title=f"advdiff {spec.name}")
    return _finish(report, out, rows, picture)


# phase-scan -------------------------------------------------------------------------

SCAN_SCHEMA = {
    "n": (int, 1),
    "N": (int, 256),
    "L": (float, 40.0),
    "mode": (str, "conservative"),
    "kappas": ("floats", [0.5, 1.0, 2.0]),
    "amplitudes": ("floats", [0.1 * 2**i for i in range(8)]),
    "horizon": (float, 50.0),
    "strength": (float, 1.0),
    "max_steps": (int, 400000),
    "seed": (int, 0),
}


def scan_cell(args):
    """One (kappa, amplitude) cell; module-level so worker processes can pickle it."""
    kappa, amp, cfg = args
    try:
        r = ad.fujita_contrast_run(kappa, amp, cfg["mode"], horizon=cfg["horizon"], n=cfg["n"],
                                   N=cfg["N"], L=cfg["L"], strength=cfg["strength"],
                                   max_steps=cfg["max_steps"])
    except PdeCertError as exc:
        return {"kappa": kappa, "amplitude": amp, "verdict": "solver-error", "theorem": "unknown",
                "blow_up_time": None, "max_sup": None, "steps": 0, "error": str(exc)}
    theorem = ad.global_existence_verdict(r.spec).verdict
    if r.verdict == ad.BLOW_UP:
        verdict = "blow-up"
    elif r.verdict == ad.BUDGET:
        verdict = "budget-exhausted"
    else:
        verdict = "global" if theorem.startswith("global") else "horizon-reached"
    return {"kappa": kappa, "amplitude": amp, "verdict": verdict, "theorem": theorem,
            "blow_up_time": r.blow_up_time, "max_sup": r.max_sup_norm, "steps": r.state.steps,
            "l1_ok": ad.mass_certificate(r).passed if cfg["mode"] == "conservative" else None}


def run_phase_scan(cfg: dict, out: Path, svg=False, workers=1) -> RunReport:
    if cfg["mode"] not in ("conservative", "reaction"):
        raise ConfigError(f"mode must be 'conservative' or 'reaction', got {cfg['mode']!r}")
    report = _new_report("phase-scan", cfg)
    jobs = [(k, a, cfg) for k in cfg["kappas"] for a in cfg["amplitudes"]]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(scan_cell, jobs))
    else:
        cells = [scan_cell(j) for j in jobs]
    bad = [c for c in cells if c["theorem"].startswith("global") and c["verdict"] == "blow-up"]
    report.add(BoundCertificate("scan_soundness", float(len(bad)), 0.0,
                                details={"in_region": sum(c["theorem"].startswith("global") for c in cells)}))
    if cfg["mode"] == "conservative":
        l1_bad = [c for c in cells if c.get("l1_ok") is False]
        report.add(BoundCertificate("scan_l1_nonincrease", float(len(l1_bad)), 0.0))
    report.verdicts["cells"] = cells
    report.solver = {"steps": int(sum(c["steps"] for c in cells)), "rejections": 0}
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "scan.csv", ["kappa", "amplitude", "verdict", "theorem", "blow_up_time", "max_sup", "steps"],
              [(c["kappa"], c["amplitude"], c["verdict"], c["theorem"],
                "" if c["blow_up_time"] is None else c["blow_up_time"],
                "" if c["max_sup"] is None else c["max_sup"], c["steps"]) for c in cells])
    report.files.append("scan.csv")
    picture = None
    if svg:
        lines = {}
        for k in cfg["kappas"]:
            row = [c for c in cells if c["kappa"] == k and c["max_sup"]]
            lines[f"kappa={k:g}"] = ([c["amplitude"] for c in row], [c["max_sup"] for c in row])
        picture = line_chart(lines, title=f"phase scan ({cfg['mode']}): max sup vs amplitude")
    return _finish(report, out, None, picture)


# ineq-suite --------------------------------------------------------------------------

INEQ_SCHEMA = {
    "count": (int, 100),
    "seed": (int, 0),
    "names": ("strs", ["all"]),
    "vector": (bool, True),
    "vector_count": (int, 20),
    "tol": (float, 1e-3),
    "trilinear": (bool, True),
    "scaling": (bool, True),
}


def trilinear_corpus(count, seed=0, N=32):
    grid = GridSpec(3, N, 2 * math.pi)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        out.append(ns.trilinear_certificate(
            ns.random_divfree(grid, int(rng.integers(2**32)), l2=1.0, k_peak=float(rng.uniform(1.5, 4.0)))))
    return out


def run_ineq_suite(cfg: dict, out: Path, svg=False) -> RunReport:
    report = _new_report("ineq-suite", cfg)
    every = iq.registry()
    names = cfg["names"]
    chosen = every if names == ["all"] else [s for s in every if s.name in names]
    if not chosen:
        raise ConfigError(f"no inequality matches {names}")
    rows = []
    summaries = []
    for n in (1, 2, 3):
        group = [s for s in chosen if s.n == n]
        if group:
            summaries += iq.corpus_audit_many(group, cfg["count"], seed=cfg["seed"], tol=cfg["tol"])
    chosen = sorted(chosen, key=lambda s: s.n)
    for ineq, s in zip(chosen, summaries):
        for i, r in enumerate(s.ratios):
            rows.append((ineq.name, ineq.n, i, r, r <= 1 + cfg["tol"]))
        report.add(BoundCertificate(f"corpus[{ineq.name},n={ineq.n}]", s.max_ratio, 1.0, tol=cfg["tol"],
                                    details={"failures": len(s.failures), "rejected": s.rejected}))
        if cfg["vector"] and ineq.vector_ok:
            v = iq.corpus_audit(ineq, cfg["vector_count"], seed=cfg["seed"] + 1, vector=True, tol=cfg["tol"])
            report.add(BoundCertificate(f"vector[{ineq.name},n={ineq.n}]", v.max_ratio, 1.0, tol=cfg["tol"]))
        if cfg["scaling"]:
            report.add(iq.scaling_audit(ineq))
    if cfg["trilinear"]:
        tri = trilinear_corpus(cfg["count"], cfg["seed"])
        report.add(combine("corpus[trilinear,n=3]", tri))
        for i, c in enumerate(tri):
            rows.append(("trilinear", 3, i, c.ratio, c.passed))
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "ineq.csv", ["inequality", "n", "sample_id", "ratio", "pass"], rows)
    report.files.append("ineq.csv")
    return _finish(report, out)


# moser-table --------------------------------------------------------------------------

MOSER_SCHEMA = {
    "n": (int, 1),
    "kappa": (float, 0.0),
    "p": (float, 1.0),
    "K_nash": (float, 1.0),
    "m_max": (int, 10),
    "Bmu": (float, 1.0),
    "Up": (float, 1.0),
    "u0_norm": (float, 1.0),
    "seed": (int, 0),
}


def run_moser_table(cfg: dict, out: Path, svg=False) -> RunReport:
    try:
        params = moser.IterationParams(cfg["n"], cfg["kappa"], cfg["p"], cfg["K_nash"])
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    if cfg["m_max"] < 1:
        raise ConfigError("m_max must be >= 1")
    report = _new_report("moser-table", cfg)
    rows = moser.bound_ledger(params, cfg["m_max"], cfg["u0_norm"], cfg["Bmu"], cfg["Up"])
    K = moser.K_nkp(params.n, params.kappa, params.p)
    worst = max(r.c_1l for r in rows)
    strict = all(moser.c_jm(params, j, m) < K for m in range(1, cfg["m_max"] + 1) for j in range(1, m + 1))
    report.add(BoundCertificate("c_jm_bound", worst, K, status=PASS if strict else FAIL))
    for m in range(1, cfg["m_max"] + 1):
        for c in moser.telescoping_check(params, m):
            c.name = f"{c.name}[m={m}]"
            report.add(c)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "moser.csv", ["level", "q", "lambda", "C_1_l", "bound"],
              [(r.level, r.q, r.lam, r.c_1l, r.bound) for r in rows])
    report.files.append("moser.csv")
    picture = None
    if svg:
        picture = line_chart({"C(1,l)": ([r.level for r in rows], [r.c_1l for r in rows])},
                             title="C(1,l) against level", logy=False)
    return _finish(report, out, None, picture)


COMMANDS = {
    "ns-decay": (NS_SCHEMA, run_ns_decay),
    "heat-check": (HEAT_SCHEMA, run_heat_check),
    "advdiff-run": (AD_SCHEMA, run_advdiff),
    "phase-scan": (SCAN_SCHEMA, run_phase_scan),
    "ineq-suite": (INEQ_SCHEMA, run_ineq_suite),
    "moser-table": (MOSER_SCHEMA, run_moser_table),
}


def _seed(text):
    val = int(text)
    if not 0 <= val < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return val


def build_parser():
    parser = argparse.ArgumentParser(prog="pdecert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None, help="key = value scenario file")
        p.add_argument("--out", type=Path, default=None,
                       help=f"output directory (default ${ENV_OUT} or ./pdecert-out/<command>)")
        p.add_argument("--seed", type=_seed, default=None)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--svg", action="store_true", help="also write plot.svg")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    schema, runner = COMMANDS[args.command]
    out = args.out or Path(os.environ.get(ENV_OUT, "pdecert-out")) / args.command
    try:
        cfg = load_config(args.config, schema)
        if args.seed is not None:
            cfg["seed"] = args.seed
        started = time.perf_counter()
        if args.command == "phase-scan":
            report = runner(cfg, out, svg=args.svg, workers=max(1, args.workers))
        else:
            report = runner(cfg, out, svg=args.svg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    # wall-clock lives apart from report.json so reports stay byte-identical
    (out / "timing.json").write_text(json.dumps({"wall_clock_s": time.perf_counter() - started}) + "\n")
    for c in report.certificates:
        print(f"{c.status:13s} {c.name}  lhs={fmt(c.lhs)} rhs={fmt(c.rhs)}")
    print(f"report: {out / 'report.json'}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
