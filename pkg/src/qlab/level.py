"""One-level system as a classical-like oscillator.

The wave function maps to a phase-space point via
psi = (1/sqrt 2)(omega q + i p); the deformed dynamics turns the
Schroedinger equation into i psidot = (lam/sinh lam) cosh(lam |psi|^2) psi,
whose exact solution is a phase rotation at the amplitude-dependent
frequency shared with the classical module.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .classical import omega_q
from .errors import ParameterError


@dataclass(frozen=True)
class LevelState:
    psi: complex
    lam: float
    omega: float = 1.0


def psi_to_phase_space(psi: complex, omega: float = 1.0) -> tuple[float, float]:
    """(q, p) with q = sqrt(2) Re(psi)/omega, p = sqrt(2) Im(psi)."""
    if omega <= 0:
        raise ParameterError("omega must be positive")
    return math.sqrt(2.0) * psi.real / omega, math.sqrt(2.0) * psi.imag


def phase_space_to_psi(q: float, p: float, omega: float = 1.0) -> complex:
    if omega <= 0:
        raise ParameterError("omega must be positive")
    return complex(omega * q, p) / math.sqrt(2.0)


@dataclass(frozen=True)
class LevelEvolution:
    t: np.ndarray
    psi_exact: np.ndarray
    psi_rk4: np.ndarray
    frequency: float
    max_deviation: float
    norm_drift: float


def evolve_one_level(psi0: complex, lam: float, t_end: float,
                     dt: float = 1e-3) -> LevelEvolution:
    """Exact and RK4 evolution of i psidot = omega_q(|psi|^2) psi.

    The exact solution is psi0 e^{-i Omega t} with
    Omega = (lam/sinh lam) cosh(lam |psi0|^2); the RK4 track integrates the
    nonlinear right side blindly.  Reports their max deviation and the norm
    drift of the integrated track (|psi| is conserved by the flow).
    """
    if dt <= 0:
        raise ParameterError("dt must be positive")
    psi0 = complex(psi0)
    freq = omega_q(abs(psi0) ** 2, lam)
    n_steps = max(1, round(t_end / dt))
    dt = t_end / n_steps  # snap so the grid lands exactly on t_end
    t_arr = np.arange(n_steps + 1) * dt
    rk4 = np.empty(n_steps + 1, dtype=complex)
    rk4[0] = psi0
    psi = psi0

    def deriv(z: complex) -> complex:
        return -1j * omega_q(abs(z) ** 2, lam) * z

    for i in range(1, n_steps + 1):
        k1 = deriv(psi)
        k2 = deriv(psi + 0.5 * dt * k1)
        k3 = deriv(psi + 0.5 * dt * k2)
        k4 = deriv(psi + dt * k3)
        psi = psi + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        rk4[i] = psi

    exact = psi0 * np.exp(-1j * freq * t_arr)
    max_dev = float(np.max(np.abs(rk4 - exact)))
    norm_drift = float(np.max(np.abs(np.abs(rk4) - abs(psi0))))
    return LevelEvolution(t_arr, exact, rk4, freq, max_dev, norm_drift)
