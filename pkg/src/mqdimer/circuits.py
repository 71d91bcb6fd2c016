"""Gate-level circuits for the pure and thermal dimer experiments.

Register layout of the thermal experiment: qubits 2 and 3 are the dimer,
qubit 1 purifies spin 2 and qubit 4 purifies spin 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gates import Circuit, cnot, run_circuit, rx, ry, rz
from .model import check_beta
from .state import StateVector

DEFAULT_BETA = 2.12
DIMER_QUBITS = (2, 3)
ANCILLA_QUBITS = (1, 4)


def theta_from_beta(beta: float) -> float:
    """Purification angle: cos(theta) = tanh(beta/2)."""
    return math.acos(math.tanh(check_beta(beta) / 2))


@dataclass(frozen=True)
class PureExperimentSpec:
    tau: float

    def __post_init__(self):
        if not math.isfinite(self.tau):
            raise ValueError(f"tau must be finite, got {self.tau!r}")

    def circuit(self) -> Circuit:
        return pure_ground_circuit(self.tau)


@dataclass(frozen=True)
class ThermalExperimentSpec:
    beta: float
    tau: float

    def __post_init__(self):
        check_beta(self.beta)
        if not math.isfinite(self.tau):
            raise ValueError(f"tau must be finite, got {self.tau!r}")

    @property
    def theta(self) -> float:
        return theta_from_beta(self.beta)

    def circuit(self) -> Circuit:
        return thermal_full_circuit(self.beta, self.tau)


def pure_ground_circuit(tau: float) -> Circuit:
    """|psi(tau)> = C12 Rx1(-tau) |00>."""
    return Circuit(2, (rx(1, -tau), cnot(1, 2)))


def purification_prep_circuit(beta: float) -> Circuit:
    """Two Bell-like pairs (1,2) and (3,4), each cos(t/2)|00> + sin(t/2)|11>."""
    theta = theta_from_beta(beta)
    return Circuit(4, (ry(1, theta), cnot(1, 2), ry(3, theta), cnot(3, 4)))


def dimer_propagator_circuit(tau: float, qubits=DIMER_QUBITS, n_qubits: int = 4) -> Circuit:
    """exp(-i H tau / D) on ``qubits`` from two CNOTs and six rotations.

    Operator product (rightmost acts first):
    Rx_a(pi/2) Rx_b(-pi/2) C_ab Rx_a(-tau/2) Rz_b(-tau/2) C_ab Rx_a(-pi/2) Rx_b(pi/2).
    Equal to the exact propagator up to a global phase.
    """
    a, b = qubits
    half = math.pi / 2
    operator_product = [
        rx(a, half), rx(b, -half), cnot(a, b),
        rx(a, -tau / 2), rz(b, -tau / 2),
        cnot(a, b), rx(a, -half), rx(b, half),
    ]
    return Circuit(n_qubits, tuple(reversed(operator_product)))


def thermal_full_circuit(beta: float, tau: float) -> Circuit:
    return purification_prep_circuit(beta) + dimer_propagator_circuit(tau)


def run_pure_experiment(tau: float) -> StateVector:
    return run_circuit(pure_ground_circuit(tau))


def run_thermal_experiment(beta: float, tau: float) -> StateVector:
    return run_circuit(thermal_full_circuit(beta, tau))


def paper_thermal_state(beta: float, tau: float) -> StateVector:
    """The six-term closed form of the evolved four-qubit purified state."""
    theta = theta_from_beta(beta)
    c2, s2 = math.cos(theta / 2) ** 2, math.sin(theta / 2) ** 2
    ct, st = math.cos(tau / 2), math.sin(tau / 2)
    amps = np.zeros(16, dtype=complex)
    amps[0b0000] = ct * c2
    amps[0b0011] = 0.5 * math.sin(theta)
    amps[0b0110] = 1j * st * c2
    amps[0b1001] = 1j * st * s2
    amps[0b1100] = 0.5 * math.sin(theta)
    amps[0b1111] = ct * s2
    return StateVector(4, amps)


def marginal_closed_forms(beta: float, tau: float) -> dict[str, float]:
    """p_nm for the dimer qubits as printed closed forms in theta and tau."""
    theta = theta_from_beta(beta)
    x = 4 * math.cos(tau) * math.cos(theta)
    base = 3 + math.cos(2 * theta)
    side = math.sin(theta) ** 2 / 4
    return {"00": (base + x) / 8, "01": side, "10": side, "11": (base - x) / 8}
