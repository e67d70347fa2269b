"""Split-step solver for the reduced constant-coefficient equation.

In the parallel frame the curve flow becomes a scalar equation for
q(t, x) on the periodic domain:

    q_t = a q_xxx + i q_xx + (aK/2 + 2b)|q|^2 q_x
          - (aK/2 - b) q^2 conj(q)_x + (i/2) K |q|^2 q.

At b = aK/2 the q^2 conj(q)_x coefficient vanishes and the equation
degenerates to the completely integrable Hirota form.

The general five-parameter family

    q_t + A q_xxx - i B q_xx = -i alpha |q|^2 q + beta (|q|^2)_x q
                               + gamma |q|^2 q_x

carries two classical energy functionals and ||q||_2^2; param_map sends
(a, b, K) to the (A, B, alpha, beta, gamma) for which that family is the
reduced equation, and laurey1/3beta, -laurey2 reproduce test1, test2.

Time stepping is Strang splitting: the linear symbol -i(a xi^3 + xi^2) is
applied exactly in Fourier space for half a step around an RK4 substep
for the nonlinearity, so the linear part is exactly norm-preserving and
the overall scheme is second order in dt.  The odd part of every spectral
symbol is zeroed at the Nyquist frequency, matching the derivative matrix
of the grid module.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class NumericsError(RuntimeError):
    """A quantity that must be real carries an imaginary residue above
    tolerance, or the solver produced non-finite values."""


@dataclass(frozen=True)
class LaureyParams:
    """Coefficients of the general constant-coefficient third-order family."""

    A: float
    B: float
    alpha: float
    beta: float
    gamma: float

    def require_strict(self):
        """The classical global-existence regime needs A != 0 and beta != 0."""
        if self.A == 0.0 or self.beta == 0.0:
            raise ValueError("strict regime requires A != 0 and beta != 0")


def param_map(a: float, b: float, K: float) -> LaureyParams:
    """Map the geometric constants to the general family's coefficients."""
    return LaureyParams(A=-a, B=1.0, alpha=-K / 2.0, beta=b - a * K / 2.0,
                        gamma=b + a * K)


@lru_cache(maxsize=32)
def _wavenumbers(n: int) -> np.ndarray:
    """2*pi*k frequencies in FFT order with the Nyquist entry zeroed."""
    xi = 2.0 * np.pi * np.fft.fftfreq(n, d=1.0 / n)
    xi[n // 2] = 0.0
    xi.setflags(write=False)
    return xi


def spectral_derivative(q: np.ndarray, order: int = 1) -> np.ndarray:
    """(d/dx)^order of a periodic complex field, Nyquist mode zeroed."""
    xi = _wavenumbers(q.shape[0])
    return np.fft.ifft((1j * xi) ** order * np.fft.fft(q))


def rhs_nonlinear(q: np.ndarray, qx: np.ndarray, a: float, b: float,
                  K: float) -> np.ndarray:
    """Nonlinear part of the reduced equation, evaluated pointwise."""
    mod2 = np.abs(q) ** 2
    return ((a * K / 2.0 + 2.0 * b) * mod2 * qx
            - (a * K / 2.0 - b) * q * q * np.conj(qx)
            + 0.5j * K * mod2 * q)


def _linear_phase(n: int, a: float, dt: float) -> np.ndarray:
    # exact propagator of q_t = a q_xxx + i q_xx over dt; the odd symbol
    # xi^3 is Nyquist-zeroed, the even symbol xi^2 is kept in full
    xi = _wavenumbers(n)
    xi_full = 2.0 * np.pi * np.fft.fftfreq(n, d=1.0 / n)
    return np.exp(-1j * (a * xi**3 + xi_full**2) * dt)


def step_strang(q: np.ndarray, dt: float, a: float, b: float, K: float,
                _phase_half: np.ndarray | None = None) -> np.ndarray:
    """One Strang step: half linear, RK4 nonlinear substep, half linear."""
    n = q.shape[0]
    if _phase_half is None:
        _phase_half = _linear_phase(n, a, 0.5 * dt)
    q = np.fft.ifft(_phase_half * np.fft.fft(q))
    xi = _wavenumbers(n)

    def nl(f):
        fx = np.fft.ifft(1j * xi * np.fft.fft(f))
        return rhs_nonlinear(f, fx, a, b, K)

    k1 = nl(q)
    k2 = nl(q + 0.5 * dt * k1)
    k3 = nl(q + 0.5 * dt * k2)
    k4 = nl(q + dt * k3)
    q = q + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    q = np.fft.ifft(_phase_half * np.fft.fft(q))
    if not np.all(np.isfinite(q)):
        raise NumericsError("non-finite values in split-step update")
    return q


def run_complex(q0: np.ndarray, a: float, b: float, K: float, dt: float,
                t_end: float, sample_every: int = 100):
    """Integrate the reduced equation; returns [(t, q)] samples including
    the initial and final states."""
    if t_end < 0.0:
        raise ValueError("t_end must be nonnegative")
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    nsteps = 0 if t_end == 0.0 else max(1, int(np.ceil(t_end / dt - 1e-9)))
    phase = _linear_phase(q0.shape[0], a, 0.5 * dt)
    q = np.asarray(q0, dtype=complex).copy()
    samples = [(0.0, q.copy())]
    for s in range(1, nsteps + 1):
        q = step_strang(q, dt, a, b, K, _phase_half=phase)
        if s % sample_every == 0 or s == nsteps:
            samples.append((s * dt, q.copy()))
    return samples


# ---------------------------------------------------------------- functionals

def _dx(q: np.ndarray) -> float:
    return 1.0 / q.shape[0]


def l2norm_sq(q: np.ndarray) -> float:
    """int |q|^2 dx by the periodic rectangle rule."""
    return float(np.sum(np.abs(q) ** 2)) * _dx(q)


def _phase_integral(q: np.ndarray, qx: np.ndarray, rel_tol: float = 1e-10) -> float:
    """Real value of i*int q conj(q_x) dx, guarding the imaginary residue.

    On the periodic domain int q conj(q_x) is purely imaginary; a residue
    above tolerance indicates broken numerics upstream.
    """
    integral = np.sum(q * np.conj(qx)) * _dx(q)
    scale = max(1.0, float(np.sum(np.abs(q) * np.abs(qx))) * _dx(q))
    if abs(integral.real) > rel_tol * scale:
        raise NumericsError(
            "imaginary residue %.3e above tolerance in phase integral"
            % abs(integral.real)
        )
    return float((1j * integral).real)


def test1(q: np.ndarray, a: float, b: float) -> float:
    """a ||q_x||^2 - (b/2) int |q|^4 + i int q conj(q_x);  equals E1 of the
    curve whose frame coordinate is q, up to discretization order."""
    qx = spectral_derivative(q)
    return (a * l2norm_sq(qx)
            - 0.5 * b * float(np.sum(np.abs(q) ** 4)) * _dx(q)
            + _phase_integral(q, qx))


def test2(q: np.ndarray, a: float, b: float, K: float) -> float:
    """3a ||q_xx||^2 - (aK+10b) int |q|^2|q_x|^2 - (5b-aK) Re int q^2 conj(q_x)^2."""
    qx = spectral_derivative(q)
    qxx = spectral_derivative(qx)
    dx = _dx(q)
    i1 = float(np.sum(np.abs(q) ** 2 * np.abs(qx) ** 2)) * dx
    i2 = float(np.sum(q * q * np.conj(qx) ** 2).real) * dx
    return (3.0 * a * l2norm_sq(qxx)
            - (a * K + 10.0 * b) * i1
            - (5.0 * b - a * K) * i2)


def laurey1(q: np.ndarray, p: LaureyParams) -> complex:
    """-3 A beta ||q_x||^2 - beta(beta + gamma/2) int |q|^4
    + i (B(2 beta + gamma) - 3 A alpha) int q conj(q_x).

    The phase integral is purely imaginary on the torus, so the value is
    real up to rounding; the full complex number is returned so the
    residue stays visible to callers.
    """
    qx = spectral_derivative(q)
    dx = _dx(q)
    phase = np.sum(q * np.conj(qx)) * dx
    return complex(
        -3.0 * p.A * p.beta * l2norm_sq(qx)
        - p.beta * (p.beta + 0.5 * p.gamma) * float(np.sum(np.abs(q) ** 4)) * dx
        + 1j * (p.B * (2.0 * p.beta + p.gamma) - 3.0 * p.A * p.alpha) * phase
    )


def laurey2(q: np.ndarray, p: LaureyParams) -> float:
    """3 A ||q_xx||^2 + (6 beta + 4 gamma) int |q|^2|q_x|^2
    + (4 beta + gamma) Re int q^2 conj(q_x)^2."""
    qx = spectral_derivative(q)
    qxx = spectral_derivative(qx)
    dx = _dx(q)
    i1 = float(np.sum(np.abs(q) ** 2 * np.abs(qx) ** 2)) * dx
    i2 = float(np.sum(q * q * np.conj(qx) ** 2).real) * dx
    return (3.0 * p.A * l2norm_sq(qxx)
            + (6.0 * p.beta + 4.0 * p.gamma) * i1
            + (4.0 * p.beta + p.gamma) * i2)
