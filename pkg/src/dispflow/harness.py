"""Experiment orchestration and file output.

Time series are written as CSV in full double precision (17 significant
digits) so that acceptance tolerances are measured, never masked by
formatting.  Column layouts:

    geometric:  t,l2_ux_sq,e1,e2,h2_seminorm_sq,f_ratio
    complex:    t,l2_q_sq,test1,test2,laurey1_re,laurey1_im,laurey2
    compare:    t,modulus_gap,e1_gap,e2_gap,holonomy_angle

The cross-solver comparison evolves the same initial curve with the
geometric integrator and, in parallel, the frame coordinate extracted at
t = 0 with the split-step solver; only gauge-invariant data (|q| and the
functionals) are compared.  Phases are never compared: the frame solves a
transport equation whose time gauge the reduction does not pin down.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import complexflow
from .complexflow import (l2norm_sq, laurey1, laurey2, param_map, run_complex,
                          test1, test2)
from .config import RunConfig, make_initial
from .energies import EnergyReport, energy1, energy2
from .flow import FlowParams, StepperConfig, run, suggest_dt
from .frame import build_parallel_frame, extract_q
from .grid import DiscreteCurve

GEOMETRIC_HEADER = "t,l2_ux_sq,e1,e2,h2_seminorm_sq,f_ratio"
COMPLEX_HEADER = "t,l2_q_sq,test1,test2,laurey1_re,laurey1_im,laurey2"
COMPARE_HEADER = "t,modulus_gap,e1_gap,e2_gap,holonomy_angle"


def _fmt(v: float) -> str:
    return "%.17e" % v


def output_dir(cfg: RunConfig) -> str:
    """Config output_dir, overridden by the DISPFLOW_OUT environment variable."""
    return os.environ.get("DISPFLOW_OUT", cfg.output_dir)


def emit_timeseries(rows, header: str, path: str) -> str:
    """Write rows of floats under the given header; returns the path."""
    rows = list(rows)
    if not rows:
        raise ValueError("refusing to write an empty time series")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def read_timeseries(path: str):
    """Inverse of emit_timeseries: (header, list of row tuples)."""
    with open(path) as fh:
        header = fh.readline().strip()
        rows = [tuple(float(tok) for tok in line.split(","))
                for line in fh if line.strip()]
    return header, rows


def report_rows(reports) -> list:
    return [(r.time, r.l2_ux_sq, r.e1, r.e2, r.h2_seminorm_sq, r.f_ratio)
            for r in reports]


def run_geometric(cfg: RunConfig, diagnostics: dict | None = None):
    """Run the geometric solver from a config; returns (samples, csv_rows)."""
    params = FlowParams(cfg.a, cfg.b, cfg.K)
    curve = make_initial(cfg.ic_name, cfg.ic_params, cfg.n, params.radius, cfg.seed)
    stepper = StepperConfig(dt=cfg.dt, cfl_safety=cfg.cfl_safety, scheme=cfg.scheme)
    samples = run(curve, params, stepper, cfg.t_end, cfg.sample_every,
                  diagnostics=diagnostics)
    return samples, report_rows([rep for _, rep in samples])


def complex_rows(samples, a: float, b: float, K: float) -> list:
    p = param_map(a, b, K)
    rows = []
    for t, q in samples:
        l1 = laurey1(q, p)
        rows.append((t, l2norm_sq(q), test1(q, a, b), test2(q, a, b, K),
                     l1.real, l1.imag, laurey2(q, p)))
    return rows


def run_complex_mode(cfg: RunConfig):
    """Run the split-step solver from a config; returns (samples, csv_rows)."""
    q0 = make_initial(cfg.ic_name, cfg.ic_params, cfg.n, 1.0, cfg.seed)
    dt = cfg.dt if cfg.dt is not None else 1e-4
    samples = run_complex(q0, cfg.a, cfg.b, cfg.K, dt, cfg.t_end, cfg.sample_every)
    return samples, complex_rows(samples, cfg.a, cfg.b, cfg.K)


@dataclass
class CompareReport:
    """Gauge-invariant gaps between the geometric and reduced solvers."""

    rows: list  # (t, modulus_gap, e1_gap, e2_gap, holonomy_angle)

    @property
    def max_modulus_gap(self) -> float:
        return max(r[1] for r in self.rows)

    @property
    def max_e1_gap(self) -> float:
        return max(r[2] for r in self.rows)

    @property
    def max_e2_gap(self) -> float:
        return max(r[3] for r in self.rows)


def compare_frame(cfg: RunConfig, complex_dt: float = 1e-4) -> CompareReport:
    """Evolve the curve geometrically and its t=0 frame coordinate with the
    reduced equation; report modulus and functional gaps over time.

    The extracted field's phase convention is fixed by the default frame
    seed (normalized tangent direction at node 0).  The split-step solver
    is stepped so that its samples land exactly on the geometric sample
    times.
    """
    params = FlowParams(cfg.a, cfg.b, cfg.K)
    samples, _ = run_geometric(cfg)
    curve0 = samples[0][0].curve
    frame0 = build_parallel_frame(curve0)
    q = extract_q(curve0, frame0, cfg.scheme).astype(complex)

    rows = []
    t_prev = 0.0
    for state, _rep in samples:
        if state.time > t_prev:
            span = state.time - t_prev
            nsub = max(1, int(np.ceil(span / complex_dt - 1e-12)))
            sub = run_complex(q, cfg.a, cfg.b, cfg.K, span / nsub, span,
                              sample_every=max(nsub, 1))
            q = sub[-1][1]
            t_prev = state.time
        frame = build_parallel_frame(state.curve)
        q_geo = extract_q(state.curve, frame, cfg.scheme)
        gap = float(np.abs(np.abs(q_geo) - np.abs(q)).max())
        e1_gap = abs(energy1(state.curve, params, cfg.scheme)
                     - test1(q, cfg.a, cfg.b))
        e2_gap = abs(energy2(state.curve, params, cfg.scheme)
                     - test2(q, cfg.a, cfg.b, cfg.K))
        rows.append((state.time, gap, e1_gap, e2_gap, frame.holonomy_angle))
    return CompareReport(rows=rows)


def check_identities(trials: int = 100, seed: int = 0, n: int = 64,
                     verbose: bool = False) -> dict:
    """Random-draw verification of the parameter-map identities.

    Draws (q, a, b, K) with |beta| > 0.1 and checks

        laurey1(q; map(a,b,K)) / (3 beta) == test1(q; a, b)
        -laurey2(q; map(a,b,K))           == test2(q; a, b, K)

    to 1e-12 relative.  Returns the max relative errors and a pass flag.
    """
    rng = np.random.default_rng(seed)
    x = np.arange(n) / n
    max1 = max2 = 0.0
    done = 0
    while done < trials:
        a = rng.uniform(-2.0, 2.0)
        b = rng.uniform(-2.0, 2.0)
        K = rng.uniform(0.2, 3.0)
        p = param_map(a, b, K)
        if abs(p.beta) <= 0.1:
            continue
        q = np.zeros(n, dtype=complex)
        for m in range(-6, 7):
            q += ((rng.standard_normal() + 1j * rng.standard_normal())
                  * np.exp(-0.4 * abs(m)) * np.exp(2j * np.pi * m * x))
        t1 = test1(q, a, b)
        t2 = test2(q, a, b, K)
        l1 = laurey1(q, p).real / (3.0 * p.beta)
        l2 = -laurey2(q, p)
        err1 = abs(l1 - t1) / max(1.0, abs(t1))
        err2 = abs(l2 - t2) / max(1.0, abs(t2))
        max1 = max(max1, err1)
        max2 = max(max2, err2)
        done += 1
    ok = max1 < 1e-12 and max2 < 1e-12
    result = {"trials": trials, "max_rel_err_first": max1,
              "max_rel_err_second": max2, "ok": ok}
    if verbose:
        print("identity check over %d draws (|beta| > 0.1):" % trials)
        print("  first functional : max rel err %.3e" % max1)
        print("  second functional: max rel err %.3e" % max2)
        print("  %s" % ("PASS" if ok else "FAIL"))
    return result


def fit_order(ns, errors) -> float:
    """Least-squares slope of log(error) against log(1/N)."""
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if np.any(errors <= 0.0):
        return float("inf")
    return float(np.polyfit(np.log(1.0 / ns), np.log(errors), 1)[0])


def convergence_study(cfg: RunConfig, levels: int = 3, verbose: bool = True):
    """Grid ladder N, 2N, 4N, ...: conservation drifts vs resolution.

    Each level runs the geometric solver to cfg.t_end with the level's own
    CFL-limited dt and reports the relative drifts of ||u_x||^2 and E1.
    Returns rows (N, dt, l2_drift, e1_drift) plus fitted orders.
    """
    rows = []
    for lev in range(levels):
        n = cfg.n * (2 ** lev)
        if n > 4096:
            break
        level_cfg = RunConfig(
            mode="geometric", n=n, t_end=cfg.t_end, a=cfg.a, b=cfg.b, K=cfg.K,
            dt=cfg.dt, cfl_safety=cfg.cfl_safety, scheme=cfg.scheme,
            ic_name=cfg.ic_name, ic_params=dict(cfg.ic_params), seed=cfg.seed,
            output_dir=cfg.output_dir, sample_every=cfg.sample_every,
        ).validate()
        diagnostics = {}
        samples, _ = run_geometric(level_cfg, diagnostics)
        reports = [rep for _, rep in samples]
        l2_drift = max(abs(r.l2_ux_sq - reports[0].l2_ux_sq) for r in reports)
        l2_drift /= max(1.0, abs(reports[0].l2_ux_sq))
        e1_drift = max(abs(r.e1 - reports[0].e1) for r in reports)
        e1_drift /= 1.0 + abs(reports[0].e1)
        rows.append((n, diagnostics["dt"], l2_drift, e1_drift))
        if verbose:
            print("N = %4d  dt = %.3e  l2 drift = %.3e  e1 drift = %.3e"
                  % rows[-1])
    orders = {}
    if len(rows) >= 2:
        ns = [r[0] for r in rows]
        orders["l2"] = fit_order(ns, [max(r[2], 1e-300) for r in rows])
        orders["e1"] = fit_order(ns, [max(r[3], 1e-300) for r in rows])
        if verbose:
            print("fitted order: l2 %.2f, e1 %.2f" % (orders["l2"], orders["e1"]))
    return rows, orders
