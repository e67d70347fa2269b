"""Discrete parallel frame along a curve and the complex field it induces.

The frame {e, Je} satisfies D_x e = 0 in the continuum.  Discretely, e is
propagated from node to node by the exact rotation that parallel
transports along the geodesic joining consecutive points (axis u_j x
u_{j+1}, angle = their angular separation).  This keeps |e| = 1 exactly
and leaves an O(dx^2) transport defect against the underlying curve.

On the torus the frame is generally not periodic: going once around the
curve rotates e by the holonomy angle (minus the enclosed area, mod 2pi).
The complex coordinate q = g(u_x, e) + i g(u_x, Je) is therefore stored
on [0, 1) with the mismatch reported, and cross-solver comparisons must
use gauge-invariant data (|q|, the functionals) only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import complex_structure, metric, project_tangent
from .grid import DiscreteCurve, derivative


class ResolutionError(ValueError):
    """Consecutive curve points are (anti)parallel: the curve is too coarse
    for transport to be defined."""


@dataclass
class FrameData:
    """Unit tangent-plane field e with D_x e = 0 discretely, plus the
    signed angle by which transport around the closed curve rotates e."""

    e: np.ndarray
    holonomy_angle: float


def _rotate(v: np.ndarray, axis: np.ndarray, cos_t: float, sin_t: float) -> np.ndarray:
    # Rodrigues rotation about the unit axis
    return (v * cos_t + np.cross(axis, v) * sin_t
            + axis * np.dot(axis, v) * (1.0 - cos_t))


def transport_link(p: np.ndarray, p_next: np.ndarray, v: np.ndarray,
                   radius: float) -> np.ndarray:
    """Parallel transport of tangent vector v from p to p_next on the sphere."""
    axis = np.cross(p, p_next)
    s = np.linalg.norm(axis)
    c = float(np.dot(p, p_next))
    if s < 1e-14 * radius**2:
        if c < 0.0:
            raise ResolutionError(
                "consecutive curve points are antipodal; refine the grid"
            )
        return v.copy()
    return _rotate(v, axis / s, c / radius**2, s / radius**2)


def default_seed(curve: DiscreteCurve, scheme: str = "spectral") -> np.ndarray:
    """Normalized tangent part of u_x at node 0; deterministic fallback to a
    coordinate direction when the curve is stationary there."""
    ux0 = derivative(curve.points, scheme)[0]
    t = project_tangent(curve.points[0], ux0, curve.radius)
    nrm = np.linalg.norm(t)
    if nrm > 1e-13 * max(1.0, float(np.abs(ux0).max())):
        return t / nrm
    # pick the coordinate axis least aligned with the point
    p = curve.points[0]
    k = int(np.argmin(np.abs(p)))
    t = project_tangent(p, np.eye(3)[k], curve.radius)
    return t / np.linalg.norm(t)


def build_parallel_frame(curve: DiscreteCurve, seed: np.ndarray | None = None) -> FrameData:
    """Transport the seed vector around the curve link by link.

    seed must be a unit vector tangent at point 0 (defaults to the
    normalized tangent direction there).  The holonomy angle is the signed
    rotation, measured in the (e0, J e0) basis, picked up by transporting
    e once around the closed curve; it lies in (-pi, pi].
    """
    u = curve.points
    r = curve.radius
    if seed is None:
        seed = default_seed(curve)
    seed = np.asarray(seed, dtype=float)
    if abs(np.linalg.norm(seed) - 1.0) > 1e-8:
        raise ValueError("seed must be a unit vector")
    if abs(np.dot(seed, u[0])) > 1e-8 * r:
        raise ValueError("seed must be tangent at point 0")
    n = curve.n
    e = np.empty_like(u)
    e[0] = seed
    for j in range(n - 1):
        e[j + 1] = transport_link(u[j], u[j + 1], e[j], r)
    closed = transport_link(u[-1], u[0], e[-1], r)
    je0 = complex_structure(u[0], e[0], r)
    angle = float(np.arctan2(np.dot(closed, je0), np.dot(closed, e[0])))
    return FrameData(e=e, holonomy_angle=angle)


def extract_q(curve: DiscreteCurve, frame: FrameData,
              scheme: str = "spectral") -> np.ndarray:
    """Complex coordinate of u_x in the frame: q = g(u_x,e) + i g(u_x,Je)."""
    ux = derivative(curve.points, scheme)
    je = complex_structure(curve.points, frame.e, curve.radius)
    return metric(ux, frame.e) + 1j * metric(ux, je)
