"""Right-hand sides and time integration of the geometric flow.

The evolution is

    u_t = a * D_x^2 u_x + J_u D_x u_x + b * g(u_x, u_x) u_x

on the sphere of radius r, discretized with u_x = D u (unprojected) and
D_x = P o D.  With that choice the a = b = 0 right-hand side reduces
exactly to the vortex-filament form u x u_xx, since the projection's
normal component is annihilated by the cross product.

Explicit RK4 with post-step renormalization is used in time.  The
third-order term makes the stable step scale like dx^3: RK4 is stable on
the imaginary axis up to |lambda| dt <= 2*sqrt(2), and the extreme
eigenvalue of the linearized operator is |a| mu^3 + mu^2 (+ a small
transport term from b), mu being the largest frequency of the derivative
matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import _kernels
from .energies import EnergyReport, make_report
from .geometry import FlowParams, renormalize
from .grid import DiscreteCurve, derivative, diff_matrix, max_symbol

# fraction of the RK4 imaginary-axis stability interval 2*sqrt(2) that
# cfl_safety = 1 corresponds to
STABILITY_LIMIT = 2.8

# max-norm of u_x beyond which the run is declared blown up
BLOWUP_UX_MAX = 1.0e6


class CFLViolation(ValueError):
    """Requested dt exceeds the stability bound of the stepper."""


class BlowUpError(RuntimeError):
    """Non-finite values or runaway gradients during time stepping.

    Carries the abort time, the last finite max-norm of u_x, and the
    partial trajectory sampled so far.
    """

    def __init__(self, time: float, max_norm: float, trajectory=None):
        super().__init__(
            "blow-up at t = %.6e (||u_x||_inf = %.3e)" % (time, max_norm)
        )
        self.time = time
        self.max_norm = max_norm
        self.trajectory = trajectory if trajectory is not None else []


@dataclass(frozen=True)
class StepperConfig:
    """Time-stepping controls.

    dt = None picks cfl_safety times the stability limit of the scheme,
    evaluated on the initial curve.  The CFL bound uses the initial
    gradients only; instability from later growth is caught by the
    blow-up monitor instead.
    """

    dt: Optional[float] = None
    cfl_safety: float = 0.5
    renormalize_each_step: bool = True
    scheme: str = "spectral"

    def __post_init__(self):
        if not (0.0 < self.cfl_safety <= 1.0):
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.dt is not None and self.dt <= 0.0:
            raise ValueError("dt must be positive")


@dataclass
class TrajectoryState:
    time: float
    curve: DiscreteCurve


def _rhs_array(u: np.ndarray, d: np.ndarray, a: float, b: float, r: float) -> np.ndarray:
    """Intrinsic right-hand side on a bare (N, 3) array (RK4 stages leave
    the sphere slightly, so no curve validation here)."""
    inv_r2 = 1.0 / r**2
    ux = d @ u
    w = d @ ux
    z = w - ((w * u).sum(axis=1) * inv_r2)[:, None] * u  # D_x u_x
    w2 = d @ z
    zz = w2 - ((w2 * u).sum(axis=1) * inv_r2)[:, None] * u  # D_x^2 u_x
    jz = np.cross(u / r, z)
    g = (ux * ux).sum(axis=1)
    return a * zz + jz + b * g[:, None] * ux


def rhs_intrinsic(curve: DiscreteCurve, params: FlowParams,
                  scheme: str = "spectral") -> np.ndarray:
    """a * D_x^2 u_x + J D_x u_x + b * g(u_x,u_x) u_x along the curve."""
    d = diff_matrix(curve.n, scheme)
    return _rhs_array(curve.points, d, params.a, params.b, curve.radius)


def rhs_darios(curve: DiscreteCurve, scheme: str = "spectral") -> np.ndarray:
    """Classical vortex-filament right-hand side u x u_xx (unit sphere only)."""
    _require_unit_radius(curve)
    uxx = derivative(curve.points, scheme, order=2)
    return np.cross(curve.points, uxx)


def rhs_fm(curve: DiscreteCurve, a: float, scheme: str = "spectral") -> np.ndarray:
    """Extrinsic third-order filament model:

        u x u_xx + a * [u_xxx + (3/2) {u_x x (u x u_x)}_x]

    evaluated literally with the chosen derivative scheme (unit sphere).
    """
    _require_unit_radius(curve)
    u = curve.points
    ux = derivative(u, scheme)
    uxx = derivative(ux, scheme)
    uxxx = derivative(uxx, scheme)
    w = np.cross(ux, np.cross(u, ux))
    return np.cross(u, uxx) + a * (uxxx + 1.5 * derivative(w, scheme))


def _require_unit_radius(curve: DiscreteCurve):
    if abs(curve.radius - 1.0) > 1e-12:
        raise ValueError("extrinsic filament forms are stated on the unit sphere")


def suggest_dt(curve: DiscreteCurve, params: FlowParams, cfg: StepperConfig) -> float:
    """cfl_safety * (RK4 stability limit) for the linearized operator."""
    mu = max_symbol(curve.n, cfg.scheme)
    ux = derivative(curve.points, cfg.scheme)
    ux_max_sq = float((ux * ux).sum(axis=1).max())
    lam = abs(params.a) * mu**3 + mu**2 + abs(params.b) * ux_max_sq * mu
    return cfg.cfl_safety * STABILITY_LIMIT / lam


def step_rk4(state: TrajectoryState, params: FlowParams,
             cfg: StepperConfig) -> TrajectoryState:
    """One classical RK4 step with optional renormalization to the sphere.

    Raises CFLViolation when cfg.dt exceeds the stability bound and
    BlowUpError when a stage produces non-finite values.
    """
    if cfg.dt is None:
        cfg = replace(cfg, dt=suggest_dt(state.curve, params, cfg))
    # the bound is state dependent through the gradient bound in the
    # transport term; 5% slack keeps a dt chosen from the initial curve
    # valid while gradients wander
    dt_max = suggest_dt(state.curve, params, cfg)
    if cfg.dt > dt_max * 1.05:
        raise CFLViolation(
            "dt = %.3e exceeds the CFL bound %.3e (N=%d, scheme=%s)"
            % (cfg.dt, dt_max, state.curve.n, cfg.scheme)
        )
    d = diff_matrix(state.curve.n, cfg.scheme)
    u = state.curve.points
    r = state.curve.radius
    dt = cfg.dt
    k1 = _rhs_array(u, d, params.a, params.b, r)
    k2 = _rhs_array(u + 0.5 * dt * k1, d, params.a, params.b, r)
    k3 = _rhs_array(u + 0.5 * dt * k2, d, params.a, params.b, r)
    k4 = _rhs_array(u + dt * k3, d, params.a, params.b, r)
    unew = u + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    if not np.all(np.isfinite(unew)):
        ux = d @ u
        raise BlowUpError(state.time, float(np.abs(ux).max()))
    if cfg.renormalize_each_step:
        unew = renormalize(unew, r)
    return TrajectoryState(state.time + dt, DiscreteCurve(unew, r))


def run(initial: DiscreteCurve, params: FlowParams, cfg: StepperConfig,
        t_end: float, sample_every: int = 100, diagnostics: Optional[dict] = None):
    """Integrate the flow to t_end, sampling diagnostics along the way.

    Returns a list of (TrajectoryState, EnergyReport) pairs: the initial
    state, one sample every sample_every steps, and the final state
    (final time within dt of t_end).  On blow-up raises BlowUpError with
    the partial trajectory attached.

    A dict passed as `diagnostics` receives the resolved dt, the step
    count and the per-chunk maximum renormalization displacement.
    """
    if t_end < 0.0:
        raise ValueError("t_end must be nonnegative")
    if sample_every < 1:
        raise ValueError("sample_every must be a positive integer")
    dt = cfg.dt if cfg.dt is not None else suggest_dt(initial, params, cfg)
    dt_max = suggest_dt(initial, params, cfg)
    if dt > dt_max * (1.0 + 1e-9):
        raise CFLViolation(
            "dt = %.3e exceeds the CFL bound %.3e (N=%d, scheme=%s)"
            % (dt, dt_max, initial.n, cfg.scheme)
        )
    nsteps = 0 if t_end == 0.0 else max(1, math.ceil(t_end / dt - 1e-9))

    d = diff_matrix(initial.n, cfg.scheme)
    r = initial.radius
    samples = []
    renorm_disp = []

    def sample(time: float, u: np.ndarray):
        curve = DiscreteCurve(u.copy(), r)
        prev = samples[-1][1] if samples else None
        rep = make_report(curve, params, cfg.scheme, time, prev)
        samples.append((TrajectoryState(time, curve), rep))
        return rep

    u = initial.points.copy()
    rep = sample(0.0, u)
    done = 0
    while done < nsteps:
        chunk = min(sample_every, nsteps - done)
        if _kernels.HAVE_NUMBA:
            status, steps, disp = _kernels.evolve(
                u, d, params.a, params.b, r, dt, chunk,
                cfg.renormalize_each_step,
            )
            renorm_disp.append(disp)
            if status != _kernels.OK:
                raise BlowUpError((done + steps) * dt, float(np.abs(d @ u).max()),
                                  trajectory=samples)
        else:  # pragma: no cover - exercised only without numba
            state = TrajectoryState(done * dt, DiscreteCurve(u.copy(), r))
            step_cfg = replace(cfg, dt=dt)
            try:
                for _ in range(chunk):
                    state = step_rk4(state, params, step_cfg)
            except BlowUpError as err:
                err.trajectory = samples
                raise
            u = state.curve.points
        done += chunk
        rep = sample(done * dt, u)
        ux_abs_max = float(np.abs(d @ u).max())
        if not np.isfinite(rep.l2_ux_sq) or ux_abs_max > BLOWUP_UX_MAX:
            raise BlowUpError(done * dt, ux_abs_max, trajectory=samples)
    if diagnostics is not None:
        diagnostics["dt"] = dt
        diagnostics["nsteps"] = nsteps
        diagnostics["max_renorm_displacement"] = renorm_disp
    return samples
