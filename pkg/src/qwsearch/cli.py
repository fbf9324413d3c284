"""``qwsearch`` command line: sweeps, validation against brute force, fits,
identity checks and lattice constants, all written as CSV or JSON.

Exit codes: 0 ok, 2 validation failure, 3 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.stats

from . import asymptotics as asy
from ._validation import build_graph, check_marked
from .exceptions import ConfigError, DimensionTooLarge, InsufficientData, QWSearchError
from .graphs import random_marked
from .simulator import default_tmax, probability_curve, smallest_nonzero_eigenphase
from .solver import model_probability, solve
from .spectra import build_model

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG = 0, 2, 3
MODES = ("analyze", "simulate", "validate", "scaling", "fit", "lemmas", "constants")
SCALING_COLUMNS = ["n", "N", "m_count", "lambda", "t_opt", "p_succ", "t_run", "rescaled_t",
                   "half_minus_p_succ", "error"]
VALIDATE_COLUMNS = ["n", "m_count", "marked", "lambda_solver", "lambda_dense", "abs_dlambda",
                    "p_succ_solver", "p_peak_sim", "t_opt_solver", "t_peak_sim", "passed", "error"]
LEMMA_COLUMNS = ["lemma", "n", "v", "lhs", "rhs", "abs_err", "passed"]
CONSTANT_COLUMNS = ["sqrt_n", "N", "S1", "c_estimate", "step_change", "within_bounds"]
CONSTANT_SIZES = (64, 128, 256, 512, 1024)
LAMBDA_TOL = 1e-8


# -- configuration ------------------------------------------------------

@dataclass(frozen=True)
class MarkedSpec:
    """Either explicit labels or ``count`` random vertices per ``seed``."""

    explicit: Optional[tuple] = None
    counts: tuple = ()
    seed: int = 0

    def sets(self, graph, repeats: int = 1):
        """Yield ``(seed, MarkedSet)`` pairs for one graph."""
        if self.explicit is not None:
            yield None, check_marked(graph, self.explicit)
            return
        for k in self.counts:
            for r in range(repeats):
                yield self.seed + r, random_marked(graph, k, self.seed + r)


@dataclass
class ExperimentConfig:
    mode: str
    graph: str = "hypercube"
    sizes: list = field(default_factory=list)
    marked: Optional[MarkedSpec] = None
    out: Optional[str] = None
    tmax: Optional[int] = None
    min_n_fit: int = 30
    input: Optional[str] = None
    jobs: int = 1
    repeats: int = 1


def parse_sizes(text: str) -> list:
    sizes = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            sizes.extend(range(int(lo), int(hi) + 1))
        else:
            sizes.append(int(part))
    if not sizes:
        raise ConfigError("--sizes is empty")
    return sizes


def parse_marked(text: str, graph: str) -> MarkedSpec:
    """``random:K[,K2,...]:seed`` or an explicit comma list (``x:y`` pairs on
    the lattice, integers on the hypercube)."""
    text = text.strip()
    if text.startswith("random:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"expected random:K:seed, got {text!r}")
        try:
            counts = tuple(int(c) for c in parts[1].split(",") if c)
            seed = int(parts[2])
        except ValueError:
            raise ConfigError(f"bad random marked spec {text!r}")
        if not counts or min(counts) < 1:
            raise ConfigError("random marked counts must be positive")
        return MarkedSpec(counts=counts, seed=seed)
    items = [p for p in text.split(",") if p.strip()]
    if not items:
        raise ConfigError("marked set is empty")
    try:
        if graph == "lattice":
            labels = tuple(tuple(int(c) for c in p.split(":")) for p in items)
            if any(len(lab) != 2 for lab in labels):
                raise ValueError
        else:
            labels = tuple(int(p) for p in items)
    except ValueError:
        raise ConfigError(f"cannot parse marked list {text!r} for graph {graph}")
    if len(set(labels)) != len(labels):
        raise ConfigError(f"marked list {text!r} repeats a vertex")
    return MarkedSpec(explicit=labels)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qwsearch", description=__doc__.splitlines()[0])
    p.add_argument("mode", choices=MODES)
    p.add_argument("--graph", choices=("lattice", "hypercube"), default="hypercube")
    p.add_argument("--sizes", help="comma list, ranges as a..b")
    p.add_argument("--marked", help="list (0,7 or 0:0,1:0) or random:K[,K2..]:seed")
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.add_argument("--tmax", type=int, help="simulation horizon in steps")
    p.add_argument("--min-n-fit", type=int, default=30, dest="min_n_fit")
    p.add_argument("--input", help="scaling CSV to fit")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--repeats", type=int, default=1, help="seeds per random marked count")
    return p


def parse_config(argv=None) -> ExperimentConfig:
    ns = build_parser().parse_args(argv)
    cfg = ExperimentConfig(mode=ns.mode, graph=ns.graph, out=ns.out, tmax=ns.tmax,
                           min_n_fit=ns.min_n_fit, input=ns.input, jobs=max(1, ns.jobs),
                           repeats=max(1, ns.repeats))
    if ns.sizes:
        cfg.sizes = parse_sizes(ns.sizes)
    if ns.marked:
        cfg.marked = parse_marked(ns.marked, ns.graph)
    if cfg.mode in ("analyze", "simulate", "validate", "scaling"):
        if not cfg.sizes:
            raise ConfigError(f"mode {cfg.mode} needs --sizes")
        if cfg.marked is None:
            raise ConfigError(f"mode {cfg.mode} needs --marked")
        for s in cfg.sizes:
            build_graph(cfg.graph, s)
    if cfg.mode == "fit" and not cfg.input:
        raise ConfigError("mode fit needs --input")
    if cfg.tmax is not None and cfg.tmax < 1:
        raise ConfigError("--tmax must be >= 1")
    return cfg


# -- output -------------------------------------------------------------

def _fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if x is None:
        return ""
    return str(x)


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text: str, path: Optional[str]) -> None:
    """Write atomically so a failed run never leaves a partial file."""
    if not path:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".qwsearch-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _label(graph, marked) -> str:
    if graph.kind == "lattice":
        return " ".join(f"{x}:{y}" for x, y in marked)
    return " ".join(str(v) for v in marked)


def _map(fn, tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def _tasks(cfg):
    out = []
    for size in cfg.sizes:
        graph = build_graph(cfg.graph, size)
        for seed, marked in cfg.marked.sets(graph, cfg.repeats):
            out.append((cfg.graph, size, marked.vertices, seed, cfg.tmax))
    return out


# -- modes --------------------------------------------------------------

def _scaling_row(task) -> dict:
    kind, size, marked, _seed, _ = task
    graph = build_graph(kind, size)
    N = graph.num_vertices
    row = {"n": size, "N": N, "m_count": len(marked), "error": ""}
    try:
        sol = solve(build_model(kind, size, marked))
    except (QWSearchError, ArithmeticError, np.linalg.LinAlgError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        for c in ("lambda", "t_opt", "p_succ", "t_run", "rescaled_t", "half_minus_p_succ"):
            row[c] = math.nan
        return row
    row.update({
        "lambda": sol.lam,
        "t_opt": sol.t_opt,
        "p_succ": sol.p_succ,
        "t_run": sol.t_run,
        "rescaled_t": sol.t_opt * math.sqrt(len(marked)) / math.sqrt(N),
        "half_minus_p_succ": 0.5 - sol.p_succ,
    })
    return row


def run_scaling(cfg: ExperimentConfig) -> list:
    rows = _map(_scaling_row, _tasks(cfg), cfg.jobs)
    return sorted(rows, key=lambda r: (r["m_count"], r["n"]))


def _analyze_one(task) -> dict:
    kind, size, marked, seed, _ = task
    graph = build_graph(kind, size)
    doc = {"graph": kind, "size": size, "seed": seed, "marked": _label(graph, marked)}
    try:
        doc.update(solve(build_model(kind, size, marked)).to_dict())
    except (QWSearchError, ArithmeticError) as exc:
        doc["error"] = f"{type(exc).__name__}: {exc}"
    return doc


def run_analyze(cfg: ExperimentConfig) -> list:
    return _map(_analyze_one, _tasks(cfg), cfg.jobs)


def _simulate_one(task) -> list:
    kind, size, marked, seed, tmax = task
    graph = build_graph(kind, size)
    curve = probability_curve(graph, marked, tmax)
    try:
        p_mod = model_probability(solve(build_model(kind, size, marked)), curve.t)
    except (QWSearchError, ArithmeticError):
        p_mod = np.full(curve.t.shape, math.nan)
    label = _label(graph, marked)
    return [{"n": size, "m_count": len(marked), "marked": label, "t": int(t), "p_sim": float(p),
             "p_model": float(q)} for t, p, q in zip(curve.t, curve.p, p_mod)]


def run_simulate(cfg: ExperimentConfig) -> list:
    rows = [r for chunk in _map(_simulate_one, _tasks(cfg), cfg.jobs) for r in chunk]
    return sorted(rows, key=lambda r: (r["n"], r["m_count"], r["marked"], r["t"]))


def _validate_one(task) -> dict:
    kind, size, marked, _seed, tmax = task
    graph = build_graph(kind, size)
    row = {"n": size, "m_count": len(marked), "marked": _label(graph, marked), "error": ""}
    try:
        sol = solve(build_model(kind, size, marked))
        lam_dense, _gap = smallest_nonzero_eigenphase(graph, marked)
    except DimensionTooLarge:
        raise
    except (QWSearchError, ArithmeticError) as exc:
        row.update(error=f"{type(exc).__name__}: {exc}", passed=False)
        return row
    # One period of p_succ sin^2(lam t); later beats can exceed the first peak.
    horizon = tmax or max(1, int(math.ceil(2 * sol.t_opt)))
    curve = probability_curve(graph, marked, horizon)
    dlam = abs(sol.lam - lam_dense)
    ok = dlam <= LAMBDA_TOL and abs(sol.t_opt - curve.t_peak) <= max(2.0, 0.05 * sol.t_opt)
    row.update({
        "lambda_solver": sol.lam, "lambda_dense": lam_dense, "abs_dlambda": dlam,
        "p_succ_solver": sol.p_succ, "p_peak_sim": curve.p_peak,
        "t_opt_solver": sol.t_opt, "t_peak_sim": curve.t_peak, "passed": bool(ok),
    })
    return row


def run_validate(cfg: ExperimentConfig) -> list:
    rows = _map(_validate_one, _tasks(cfg), cfg.jobs)
    return sorted(rows, key=lambda r: (r["n"], r["m_count"], r["marked"]))


def run_fit(path: str, min_n: int = 30) -> dict:
    """Least squares of ``ln(0.5 - p_succ)`` on ``ln n`` for ``n >= min_n``."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and not {"n", "p_succ"} <= set(rows[0]):
        raise ConfigError("fit input needs columns n and p_succ")
    ns, gaps, dropped = [], [], 0
    for r in rows:
        try:
            n, p = float(r["n"]), float(r["p_succ"])
        except ValueError:
            dropped += 1
            continue
        if n < min_n:
            continue
        if not math.isfinite(p) or 0.5 - p <= 0:
            dropped += 1
            continue
        ns.append(n)
        gaps.append(0.5 - p)
    if dropped:
        warnings.warn(f"dropped {dropped} rows with 0.5 - p_succ <= 0 or unparsable values")
    if len(ns) < 3:
        raise InsufficientData(f"need at least 3 usable rows with n >= {min_n}, got {len(ns)}")
    res = scipy.stats.linregress(np.log(ns), np.log(gaps))
    return {
        "slope": float(res.slope),
        "intercept": float(res.intercept),
        "r_squared": float(res.rvalue ** 2),
        "coefficient": float(math.exp(res.intercept)),
        "exponent": float(-res.slope),
        "rows_used": len(ns),
        "rows_dropped": dropped,
        "min_n": min_n,
    }


def run_lemmas(sizes=None) -> list:
    rows = []

    def add(lemma, n, v, lhs, rhs, tol):
        err = abs(lhs - rhs)
        rows.append({"lemma": lemma, "n": n, "v": v, "lhs": lhs, "rhs": rhs, "abs_err": err,
                     "passed": bool(err <= tol)})

    for n in range(1, 15):
        for v in range(1, n + 1):
            add("B2", n, v, *asy.lemma_b2_check(n, v, "brute"), 1e-9)
    for n in range(30, 61):
        lhs, rhs = asy.lemma_b1_check(n)
        add("B1", n, "", lhs, rhs, asy.lemma_b1_bound(n))
    for s in sizes or range(4, 65):
        N = s * s
        add("S2", s, "1:0", asy.lattice_s2(s, 1, 0), (N - 1) / 2, 1e-9)
    n = 40
    for w in (1, n // 2, n):
        hs = asy.hypercube_sums(n, (1 << w) - 1)
        add("S_odd", n, w, hs.S_odd, 1.0, 5.0 / n)
        add("S_even", n, w, hs.S_even, 1.0, 5.0 / n)
    return rows


def run_constants(sizes=None) -> list:
    rows, prev = [], None
    lo, hi = 2.0 / math.pi ** 2, 1.0
    for s in sizes or CONSTANT_SIZES:
        s1 = asy.lattice_s1(s)
        c = asy.c_estimate(s)
        rows.append({"sqrt_n": s, "N": s * s, "S1": s1, "c_estimate": c,
                     "step_change": math.nan if prev is None else abs(c - prev),
                     "within_bounds": bool(lo <= c <= hi)})
        prev = c
    return rows


# -- entry point --------------------------------------------------------

def run(cfg: ExperimentConfig) -> int:
    if cfg.mode == "scaling":
        rows = run_scaling(cfg)
        _emit(_csv_text(SCALING_COLUMNS, rows), cfg.out)
        return EXIT_OK
    if cfg.mode == "analyze":
        _emit(json.dumps(run_analyze(cfg), indent=2, sort_keys=True) + "\n", cfg.out)
        return EXIT_OK
    if cfg.mode == "simulate":
        _emit(_csv_text(["n", "m_count", "marked", "t", "p_sim", "p_model"], run_simulate(cfg)), cfg.out)
        return EXIT_OK
    if cfg.mode == "validate":
        rows = run_validate(cfg)
        _emit(_csv_text(VALIDATE_COLUMNS, rows), cfg.out)
        return EXIT_OK if all(r["passed"] for r in rows) else EXIT_VALIDATION
    if cfg.mode == "fit":
        _emit(json.dumps(run_fit(cfg.input, cfg.min_n_fit), indent=2, sort_keys=True) + "\n", cfg.out)
        return EXIT_OK
    if cfg.mode == "lemmas":
        rows = run_lemmas(cfg.sizes or None)
        _emit(_csv_text(LEMMA_COLUMNS, rows), cfg.out)
        return EXIT_OK if all(r["passed"] for r in rows) else EXIT_VALIDATION
    if cfg.mode == "constants":
        rows = run_constants(cfg.sizes or None)
        _emit(_csv_text(CONSTANT_COLUMNS, rows), cfg.out)
        return EXIT_OK if all(r["within_bounds"] for r in rows) else EXIT_VALIDATION
    raise ConfigError(f"unknown mode {cfg.mode!r}")


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except InsufficientData as exc:
        print(f"qwsearch: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (QWSearchError, FileNotFoundError) as exc:
        print(f"qwsearch: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
