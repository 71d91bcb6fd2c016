"""Closed-form dynamics of a dipolar spin dimer in the MQ NMR experiment.

All times are dimensionless, tau = D*t. The two-spin/two-quantum Hamiltonian
-(D/2)(I1+ I2+ + I1- I2-) couples only |00> and |11>, so every propagator
and intensity here has an exact trigonometric form. Thermal polarization
enters as tanh(beta/2) = Tr(rho(0) I_z).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .state import (
    CollectiveSpinZ,
    DensityMatrix,
    StateVector,
    coherence_decompose,
)

Source = Literal["analytic", "exact-circuit", "sampled"]

# exp(beta) overflows a double just above 709
BETA_SATURATION = 700.0


class ThermalSaturationWarning(RuntimeWarning):
    """beta is so large that the thermal state is the |00> projector to machine precision."""


@dataclass(frozen=True)
class IntensityRecord:
    tau: float
    j0: float
    j_plus2: float
    j_minus2: float
    source: Source = "analytic"

    @property
    def j2(self) -> float:
        """Common value of J+2 and J-2 (they agree for all noiseless sources)."""
        return 0.5 * (self.j_plus2 + self.j_minus2)

    @property
    def total(self) -> float:
        return self.j0 + self.j_plus2 + self.j_minus2


@dataclass(frozen=True)
class DipolarDimer:
    coupling: float = 1.0

    def __post_init__(self):
        if not (self.coupling > 0 and math.isfinite(self.coupling)):
            raise ValueError(f"dipolar coupling must be positive, got {self.coupling!r}")

    def tau(self, t: float) -> float:
        return self.coupling * t


def check_beta(beta: float) -> float:
    beta = float(beta)
    if not (beta > 0 and math.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta!r}")
    return beta


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not math.isfinite(tau):
        raise ValueError(f"tau must be finite, got {tau!r}")
    return tau


def polarization(beta: float) -> float:
    """tanh(beta/2): the I_z expectation of the two-spin thermal state."""
    return math.tanh(check_beta(beta) / 2)


def h12_matrix(coupling: float = 1.0) -> np.ndarray:
    """-(D/2)(I1+ I2+ + I1- I2-) in the basis |00>,|01>,|10>,|11>."""
    h = np.zeros((4, 4), dtype=complex)
    h[0, 3] = h[3, 0] = -coupling / 2
    return h


def propagator(tau: float) -> np.ndarray:
    """exp(-i H12 tau / D): a rotation in the {|00>, |11>} block, identity elsewhere."""
    tau = _check_tau(tau)
    c, s = math.cos(tau / 2), math.sin(tau / 2)
    u = np.eye(4, dtype=complex)
    u[0, 0] = u[3, 3] = c
    u[0, 3] = u[3, 0] = 1j * s
    return u


def pure_evolved_state(tau: float) -> StateVector:
    tau = _check_tau(tau)
    return StateVector(2, [math.cos(tau / 2), 0, 0, 1j * math.sin(tau / 2)])


def analytic_intensities_pure(tau: float) -> IntensityRecord:
    tau = _check_tau(tau)
    j2 = math.sin(tau) ** 2 / 2
    return IntensityRecord(tau, math.cos(tau) ** 2, j2, j2, "analytic")


def thermal_density(beta: float) -> DensityMatrix:
    """exp(beta I_z)/Z for the dimer.

    Evaluated as diag(1, e^-b, e^-b, e^-2b)/(1 + e^-b)^2, which is stable for
    every beta. Above beta = 700 the result is |00><00| to machine precision
    and a :class:`ThermalSaturationWarning` is issued.
    """
    beta = check_beta(beta)
    if beta > BETA_SATURATION:
        warnings.warn(
            f"beta={beta} saturates the thermal state to |00><00|",
            ThermalSaturationWarning,
            stacklevel=2,
        )
    q = math.exp(-beta)
    norm = (1 + q) ** 2
    return DensityMatrix(2, np.diag([1 / norm, q / norm, q / norm, q * q / norm]))


def single_spin_thermal(beta: float) -> np.ndarray:
    """exp(beta I_kz)/Z_k for one spin: diag(e^{b/2}, e^{-b/2}) / (2 cosh(b/2))."""
    beta = check_beta(beta)
    q = math.exp(-beta)
    return np.diag([1 / (1 + q), q / (1 + q)]).astype(complex)


def thermal_evolved_density(beta: float, tau: float) -> DensityMatrix:
    """U rho(0) U^dagger in closed form, U = exp(-i H12 tau / D)."""
    beta = check_beta(beta)
    tau = _check_tau(tau)
    if beta > BETA_SATURATION:
        thermal_density(beta)  # emits the saturation warning
    # divide numerator and Z = 2(1 + cosh b) through by e^b to avoid overflow
    q = math.exp(-beta)
    z = (1 + q) ** 2
    ch = (1 + q * q) / 2  # e^-b cosh b
    sh = (1 - q * q) / 2  # e^-b sinh b
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = (ch + math.cos(tau) * sh) / z
    rho[3, 3] = (ch - math.cos(tau) * sh) / z
    rho[1, 1] = rho[2, 2] = q / z
    rho[0, 3] = -1j * math.sin(tau) * sh / z
    rho[3, 0] = 1j * math.sin(tau) * sh / z
    return DensityMatrix(2, rho)


def analytic_intensities_thermal(beta: float, tau: float) -> IntensityRecord:
    p = polarization(beta)
    tau = _check_tau(tau)
    j2 = 0.5 * math.sin(tau) ** 2 * p
    return IntensityRecord(tau, math.cos(tau) ** 2 * p, j2, j2, "analytic")


def general_coherence_intensities(rho0: DensityMatrix, tau: float) -> IntensityRecord:
    """Intensities from the coherence blocks of an arbitrary initial dimer state.

    The observed signal is the longitudinal magnetization after a
    time-reversed mixing period, so order n contributes
    ``J_n = Tr(rho_n(tau) . D_{-n})`` with ``D = U I_z U^dagger``.
    """
    if rho0.n_qubits != 2:
        raise ValueError(f"expected a 2-qubit density matrix, got {rho0.n_qubits} qubits")
    u = propagator(tau)
    iz = CollectiveSpinZ(2)
    rho_t = u @ rho0.elements @ u.conj().T
    detect = u @ iz.matrix() @ u.conj().T
    rho_blocks = coherence_decompose(rho_t, iz)
    det_blocks = coherence_decompose(detect, iz)

    def weight(n):
        return float(np.real(np.trace(rho_blocks[n] @ det_blocks[-n])))

    return IntensityRecord(float(tau), weight(0), weight(2), weight(-2), "analytic")
