"""Command line experiment runner.

    finitepsido run <config.toml>
    finitepsido validate <config.toml>
    finitepsido sweep <directory> [--out sweep.csv] [--jobs N]

Exit status: 0 when every hard assertion passes (expected-negative results,
such as an undersampled lattice that is not a frame, count as passing), 1 when
a hard assertion fails, 2 for an invalid configuration, 3 for a numerical
abort (singular operator or an ambiguous rank decision).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .config import ConfigError, ExperimentConfig, load_config
from .csvio import read_signal_csv, read_symbol_csv, write_rows, write_signal_csv, write_symbol_csv
from .gabor import (GaborSystem, delta_window, frame_bounds, gaussian_window,
                    lattice_commutation_defect, random_window, subgroup_indicator_window,
                    tight_window)
from .group import Group, Lattice, Weight, constant_weight, polynomial_weight, subexponential_weight
from .identities import (calculus_suite, composition_residual, key_identity_residual,
                         pure_shift_symbols, transform_suite)
from .psido import Symbol, kn_matrix
from .sjostrand import (RankDecisionError, SingularOperatorError, almost_diag_envelope,
                        default_window, discrete_case_matrix, gabor_matrix,
                        lattice_cv, reverse_envelope, section6_norms, sjostrand_norm,
                        wiener_experiment)
from .transforms import Signal

SCHEMA_VERSION = "1.0"

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3

SWEEP_COLUMNS = [
    "config", "kind", "moduli", "pos_steps", "freq_steps", "redundancy", "weight", "s",
    "symbols", "frame_A", "frame_B", "is_frame", "sjostrand_sigma", "sjostrand_tau",
    "cv_sigma", "cv_tau", "equivalence_constant", "decay_rate_sigma", "decay_rate_tau",
    "max_residual", "passed", "status",
]

ENVELOPE_COLUMNS = ["symbol", "envelope", "index", "coords", "value", "weight"]


class NumericalAbort(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# building inputs


class Inputs:
    """Everything a run needs, built (and checked) before any output is written."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.group = Group(cfg.moduli)
        self.lattice = (Lattice(self.group, cfg.pos_steps, cfg.freq_steps)
                        if cfg.pos_steps is not None else None)
        self.window = build_window(cfg, self.group)
        weight_group = self.group if cfg.kind == "section6" else self.group.phase_space()
        self.weight = build_weight(cfg, weight_group)
        self.symbols = build_symbols(cfg, self.group)


def build_window(cfg: ExperimentConfig, G: Group) -> Signal:
    spec = cfg.window
    kind = spec["type"]
    if kind == "delta":
        g = delta_window(G)
    elif kind == "subgroup-indicator":
        g = subgroup_indicator_window(G, spec["steps"])
    elif kind == "gaussian":
        g = gaussian_window(G, spec.get("width"))
    elif kind == "random":
        g = random_window(G, np.random.default_rng([cfg.seed, 1]))
    else:
        try:
            g = read_signal_csv(cfg.resolve(spec["path"]), G)
        except (OSError, ValueError) as e:
            raise ConfigError(f"window csv: {e}") from None
    if not np.any(g.data):
        raise ConfigError("window is identically zero")
    return g


def build_weight(cfg: ExperimentConfig, group: Group) -> Weight:
    spec = cfg.weight
    if spec["type"] == "constant":
        v = constant_weight(group)
    elif spec["type"] == "polynomial":
        v = polynomial_weight(group, spec["s"])
    else:
        v = subexponential_weight(group, spec["a"], spec["b"], spec["s"])
    chk = v.check()
    if not (chk["normalized"] and chk["even"] and chk["submultiplicative"]):
        raise ConfigError(f"weight {v.label} is not admissible: {chk}")
    return v


def build_symbols(cfg: ExperimentConfig, G: Group) -> list[Symbol]:
    spec = cfg.symbol
    kind = spec["type"]
    if kind == "identity":
        return [Symbol.identity(G)]
    if kind in ("shift", "neumann"):
        x, xi = int(G.index(spec["x"])), int(G.index(spec["xi"]))
        s = Symbol.tf_shift(G, x, xi)
        return [s if kind == "shift" else Symbol.identity(G) * 2.0 + s]
    if kind == "random":
        rng = np.random.default_rng(cfg.seed)
        out = []
        for _ in range(spec["count"]):
            s = Symbol.random(G, rng, decay=spec["decay"], scale=spec["scale"])
            out.append(Symbol.identity(G) + s if spec["plus_identity"] else s)
        return out
    try:
        return [read_symbol_csv(cfg.resolve(spec["path"]), G)]
    except (OSError, ValueError) as e:
        raise ConfigError(f"symbol csv: {e}") from None


# ---------------------------------------------------------------------------
# report helpers


class Report:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.assertions: list[dict] = []
        self.results: dict = {}
        self.notices: list[str] = []
        self.envelopes: list[list] = []
        self.summary: dict = {}
        self.status = "ok"

    def check(self, name: str, value: float, tol: float, *, hard: bool = True,
              expected_negative: bool = False, upper: bool = True) -> bool:
        """Record ``value < tol`` (``upper``) or ``value > tol``."""
        passed = bool(value < tol) if upper else bool(value > tol)
        self.assertions.append({"name": name, "value": value, "tolerance": tol,
                                "comparison": "<" if upper else ">", "passed": passed,
                                "hard": hard, "expected_negative": expected_negative})
        return passed

    def flag(self, name: str, passed: bool, *, hard: bool = True,
             expected_negative: bool = False) -> bool:
        self.assertions.append({"name": name, "passed": bool(passed), "hard": hard,
                                "expected_negative": expected_negative})
        return passed

    @property
    def failed(self) -> list[dict]:
        return [a for a in self.assertions
                if a["hard"] and not a["passed"] and not a["expected_negative"]]

    @property
    def passed(self) -> bool:
        return self.status == "ok" and not self.failed

    def add_envelope(self, label: str, which: str, env) -> None:
        for i, (c, val) in enumerate(zip(env.group.coords, env.values)):
            self.envelopes.append([label, which, i, " ".join(map(str, c)), float(val),
                                   float(env.weight.values[i])])

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "package_version": __version__,
            "backend": kernels.BACKEND,
            "config": self.cfg.as_dict(),
            "status": self.status,
            "passed": self.passed,
            "assertions": self.assertions,
            "notices": self.notices,
            "results": self.results,
            "summary": self.summary,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }


def _clean(obj):
    """Make an object JSON safe: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def decay_rate(curve: list[tuple[int, float]]) -> float:
    """Least-squares slope c of log env(r) ~ -c r over the positive part of a decay curve."""
    pts = [(r, math.log(v)) for r, v in curve if v > 1e-300]
    if len(pts) < 2:
        return float("nan")
    r, y = np.array(pts).T
    return float(-np.polyfit(r, y, 1)[0])


# ---------------------------------------------------------------------------
# experiment kinds


def _system(inp: Inputs, rep: Report, tighten: bool) -> tuple[GaborSystem, object]:
    sys_ = GaborSystem(inp.window * (1.0 / inp.window.norm()), inp.lattice)
    fb = frame_bounds(sys_)
    rep.results["frame"] = fb.as_dict()
    if tighten and fb.is_frame:
        sys_ = GaborSystem(tight_window(sys_), inp.lattice)
        fb = frame_bounds(sys_)
        rep.results["tight_frame"] = fb.as_dict()
    return sys_, fb


def run_identities(inp: Inputs, rep: Report):
    G = inp.group
    tol = inp.cfg.tolerances["identity"]
    seeds = range(inp.cfg.seed, inp.cfg.seed + inp.cfg.output.get("seeds", 100))
    ts = transform_suite(G, seeds)
    cs = calculus_suite(G, seeds)
    for name, r in ts["residuals"].items():
        rep.check(name, r, tol)
    for name, r in cs.items():
        rep.check(name, r, tol)
    rep.results["transform_suite"] = ts["residuals"]
    rep.results["calculus_suite"] = cs
    n = G.order
    if n <= 8:
        shifts = pure_shift_symbols(G)
        worst = max(composition_residual(a, b) for a in shifts for b in shifts)
        rep.check("composition_pure_shifts", worst, tol)
        rep.results["composition_pure_shifts"] = worst
    rng = np.random.default_rng(inp.cfg.seed)
    sigma = Symbol.random(G, rng)
    f, g = Signal.random(G, rng), Signal.random(G, rng)
    if n <= 6:
        pairs = None
        rep.results["key_identity_pairs"] = "all"
    else:
        pairs = list(zip(rng.integers(0, n * n, 256).tolist(), rng.integers(0, n * n, 256).tolist()))
        rep.results["key_identity_pairs"] = 256
    k = key_identity_residual(sigma, f, g, pairs)
    rep.check("key_identity", k, tol)
    rep.results["key_identity"] = k
    rep.summary["max_residual"] = max(a["value"] for a in rep.assertions)


def run_frames(inp: Inputs, rep: Report):
    tol = inp.cfg.tolerances["frame"]
    sys_, fb = _system(inp, rep, tighten=False)
    rep.summary.update(frame_A=fb.lower_bound, frame_B=fb.upper_bound, is_frame=fb.is_frame)
    if not fb.is_frame:
        rep.flag("is_frame", False, expected_negative=True)
        rep.notices.append("lattice/window pair is not a frame: tight window and domination "
                           "suite skipped")
        return
    rep.flag("is_frame", True)
    tight = GaborSystem(tight_window(sys_), inp.lattice)
    tb = frame_bounds(tight)
    rep.results["tight_frame"] = tb.as_dict()
    rep.check("tight_lower_bound", abs(tb.lower_bound - 1), tol)
    rep.check("tight_upper_bound", abs(tb.upper_bound - 1), tol)
    rep.results["commutation_defect"] = lattice_commutation_defect(sys_)
    rep.summary.update(frame_A=fb.lower_bound, frame_B=fb.upper_bound)
    _domination(inp, rep, tight, tb)


def _domination(inp: Inputs, rep: Report, sys_: GaborSystem, fb) -> list:
    tols = inp.cfg.tolerances
    tight = fb.is_tight and abs(fb.upper_bound - 1) < 1e-8
    rows = []
    for i, sigma in enumerate(inp.symbols):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            M = gabor_matrix(sigma, sys_, check_tight=False)
        h = almost_diag_envelope(sigma, sys_, inp.weight)
        dom = h.dominates(M.entries, rtol=tols["domination"])
        rep.flag(f"domination[{i}]", dom["violations"] == 0)
        res = {"domination": dom, "h_mass": h.mass}
        if tight:
            res["factorization"] = M.factorization_residual(sigma)
            res["range"] = M.range_residuals()
            rep.check(f"factorization[{i}]", res["factorization"], tols["factorization"])
            rep.check(f"range[{i}]", max(res["range"].values()), tols["factorization"])
        snorm = sjostrand_norm(sigma, default_window(sys_.window), inp.weight)
        cvn = lattice_cv(M.entries, sys_.lattice, inp.weight).norm
        res.update(sjostrand_norm=snorm, cv_norm=cvn,
                   equivalence_constant=cvn / snorm if snorm > 0 else float("nan"))
        rev = reverse_envelope(h, sys_, inp.weight)
        rchk = rev.check(sigma, sys_.window)
        res["reverse"] = {"lattice_mass": rev.lattice_part.mass, "H_mass": rev.H.mass,
                          "check": rchk}
        rep.flag(f"reverse_envelope[{i}]", rchk["violations"] == 0, hard=fb.is_frame,
                 expected_negative=not fb.is_frame)
        res["decay_h"] = h.decay_curve()
        rep.add_envelope(str(i), "h", h)
        rows.append(res)
    rep.results["symbols"] = rows
    if rows:
        rep.summary.update(
            sjostrand_sigma=max(r["sjostrand_norm"] for r in rows),
            cv_sigma=max(r["cv_norm"] for r in rows),
            equivalence_constant=max(r["equivalence_constant"] for r in rows),
            decay_rate_sigma=min(decay_rate(r["decay_h"]) for r in rows),
        )
    return rows


def run_almost_diag(inp: Inputs, rep: Report):
    sys_, fb = _system(inp, rep, tighten=inp.cfg.window["tight"])
    rep.summary.update(frame_A=fb.lower_bound, frame_B=fb.upper_bound, is_frame=fb.is_frame)
    if not fb.is_frame:
        rep.notices.append("not a frame: the reverse reconstruction is recorded as "
                           "expected-negative")
    _domination(inp, rep, sys_, fb)


def run_wiener(inp: Inputs, rep: Report):
    sys_, fb = _system(inp, rep, tighten=True)
    rep.summary.update(frame_A=fb.lower_bound, frame_B=fb.upper_bound, is_frame=fb.is_frame)
    if not fb.is_frame:
        raise NumericalAbort("the Wiener experiment needs a frame; this lattice/window is not one")
    tols = inp.cfg.tolerances
    rows = []
    for i, sigma in enumerate(inp.symbols):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                wr = wiener_experiment(sigma, sys_, inp.weight, tols["inverse"], tols["pinv"])
        except (SingularOperatorError, RankDecisionError) as e:
            raise NumericalAbort(f"symbol {i}: {type(e).__name__}: {e}") from None
        rep.check(f"inverse[{i}]", wr.residual_inverse, tols["inverse"])
        rep.check(f"pseudoinverse[{i}]", wr.residual_pinv, tols["pinv"])
        rep.check(f"penrose[{i}]", max(wr.penrose.values()), tols["pinv"])
        rep.flag(f"finite_norms[{i}]", wr.passed["finite_norms"])
        rows.append(wr.as_dict())
        rep.add_envelope(str(i), "sigma", wr.envelope_sigma)
        rep.add_envelope(str(i), "tau", wr.envelope_tau)
    rep.results["symbols"] = rows
    rep.summary.update(
        sjostrand_sigma=max(r["sjostrand_norm_sigma"] for r in rows),
        sjostrand_tau=max(r["sjostrand_norm_tau"] for r in rows),
        cv_sigma=max(r["cv_norm_sigma"] for r in rows),
        cv_tau=max(r["cv_norm_tau"] for r in rows),
        equivalence_constant=max(r["cv_norm_sigma"] / r["sjostrand_norm_sigma"] for r in rows),
        decay_rate_sigma=min(decay_rate(r["decay_sigma"]) for r in rows),
        decay_rate_tau=min(decay_rate(r["decay_tau"]) for r in rows),
        max_residual=max(max(r["residual_inverse"], r["residual_pinv"]) for r in rows),
    )


def run_section6(inp: Inputs, rep: Report):
    tol = inp.cfg.tolerances["section6"]
    rows = []
    for i, sigma in enumerate(inp.symbols):
        norms = section6_norms(sigma, inp.weight)
        d = abs(norms["discrete_cv"] - norms["discrete_symbol"])
        p = abs(norms["periodic_cv"] - norms["periodic_symbol"])
        m = float(np.abs(discrete_case_matrix(sigma) - kn_matrix(sigma).data).max())
        rep.check(f"discrete_norm[{i}]", d, tol)
        rep.check(f"periodic_norm[{i}]", p, tol)
        rep.check(f"discrete_matrix[{i}]", m, tol)
        rows.append({**norms, "discrete_residual": d, "periodic_residual": p,
                     "matrix_residual": m})
    rep.results["symbols"] = rows
    rep.summary.update(cv_sigma=max(r["discrete_cv"] for r in rows),
                       sjostrand_sigma=max(r["discrete_symbol"] for r in rows),
                       max_residual=max(max(r["discrete_residual"], r["periodic_residual"])
                                        for r in rows))


RUNNERS = {
    "identities": run_identities,
    "frames": run_frames,
    "almost-diag": run_almost_diag,
    "wiener": run_wiener,
    "section6": run_section6,
}


# ---------------------------------------------------------------------------
# verbs


def execute(cfg: ExperimentConfig, write: bool = True) -> tuple[int, Report]:
    """Run one validated config; returns (exit status, report)."""
    inp = Inputs(cfg)              # may raise ConfigError; nothing written yet
    rep = Report(cfg)
    status = EXIT_OK
    try:
        RUNNERS[cfg.kind](inp, rep)
    except NumericalAbort as e:
        rep.status = "aborted"
        rep.notices.append(str(e))
        status = EXIT_ABORT
    if status == EXIT_OK and rep.failed:
        status = EXIT_FAIL
    rep.summary.setdefault("max_residual", max(
        (a["value"] for a in rep.assertions if "value" in a), default=float("nan")))
    if write:
        write_outputs(cfg, inp, rep)
    return status, rep


def write_outputs(cfg: ExperimentConfig, inp: Inputs, rep: Report) -> None:
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(
        json.dumps(_clean(rep.as_dict()), indent=2, sort_keys=True) + "\n")
    write_rows(out / "envelopes.csv", ENVELOPE_COLUMNS, rep.envelopes)
    if cfg.output.get("save_symbols"):
        for i, s in enumerate(inp.symbols):
            write_symbol_csv(out / f"symbol_{i}.csv", s)
    if cfg.output.get("save_window"):
        write_signal_csv(out / "window.csv", inp.window)


def summary_row(cfg: ExperimentConfig, rep: Report) -> dict:
    s = rep.summary
    lat = cfg.pos_steps is not None
    red = ""
    if lat:
        n = math.prod(cfg.moduli)
        size = math.prod(m // a for m, a in zip(cfg.moduli, cfg.pos_steps)) * \
            math.prod(m // b for m, b in zip(cfg.moduli, cfg.freq_steps))
        red = size / n
    row = {
        "config": cfg.source.name if cfg.source else "",
        "kind": cfg.kind,
        "moduli": " ".join(map(str, cfg.moduli)),
        "pos_steps": " ".join(map(str, cfg.pos_steps)) if lat else "",
        "freq_steps": " ".join(map(str, cfg.freq_steps)) if lat else "",
        "redundancy": red,
        "weight": cfg.weight["type"],
        "s": cfg.weight.get("s", ""),
        "symbols": cfg.symbol["type"],
        "passed": rep.passed,
        "status": rep.status,
    }
    for col in SWEEP_COLUMNS:
        if col not in row:
            v = s.get(col, "")
            row[col] = float(v) if isinstance(v, (float, np.floating)) else v
    return row


def _run_one(path: str) -> tuple[int, dict]:
    cfg = load_config(path)
    status, rep = execute(cfg)
    return status, summary_row(cfg, rep)


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        status, rep = execute(cfg)
    except ConfigError as e:
        print(f"invalid config: {e}", file=sys.stderr)
        return EXIT_CONFIG
    for a in rep.assertions:
        mark = "ok" if a["passed"] else ("expected-negative" if a["expected_negative"] else "FAIL")
        val = f" {a['value']:.3e}" if "value" in a else ""
        print(f"{mark:>17}  {a['name']}{val}")
    for note in rep.notices:
        print(f"notice: {note}")
    print(f"report: {cfg.output_dir / 'report.json'} (exit {status})")
    return status


def cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
        Inputs(cfg)
    except ConfigError as e:
        print(f"invalid config: {e}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"ok: {cfg.kind} on Z{' x Z'.join(map(str, cfg.moduli))}")
    return EXIT_OK


def sweep(paths: list[Path], out: Path, jobs: int = 1) -> int:
    """Run every config and write one CSV row each; all configs must share a kind."""
    cfgs = [load_config(p) for p in paths]
    kinds = {c.kind for c in cfgs}
    if len(kinds) > 1:
        raise ConfigError(f"sweep needs a single experiment kind, found {sorted(kinds)}")
    for c in cfgs:
        Inputs(c)
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_one, [str(p) for p in paths]))
    else:
        results = [_run_one(str(p)) for p in paths]
    write_rows(out, SWEEP_COLUMNS, [[r[c] for c in SWEEP_COLUMNS] for _, r in results])
    statuses = [s for s, _ in results]
    if EXIT_ABORT in statuses:
        return EXIT_ABORT
    return EXIT_FAIL if EXIT_FAIL in statuses else EXIT_OK


def cmd_sweep(args) -> int:
    d = Path(args.directory)
    if not d.is_dir():
        print(f"not a directory: {d}", file=sys.stderr)
        return EXIT_CONFIG
    paths = sorted(d.glob("*.toml"))
    out = Path(args.out) if args.out else d / "sweep.csv"
    try:
        status = sweep(paths, out, args.jobs)
    except ConfigError as e:
        print(f"invalid sweep: {e}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{len(paths)} configs -> {out} (exit {status})")
    return status


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="finitepsido",
                                description="Time-frequency experiments on finite abelian groups.")
    sub = p.add_subparsers(dest="verb", required=True)
    r = sub.add_parser("run", help="run one experiment")
    r.add_argument("config")
    r.set_defaults(func=cmd_run)
    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)
    s = sub.add_parser("sweep", help="run every *.toml in a directory")
    s.add_argument("directory")
    s.add_argument("--out", help="CSV path (default: <directory>/sweep.csv)")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sweep)
    args = p.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
