"""Computational-basis readout, NISQ-style noise, and intensity estimators.

Sampling draws ``shots`` uniforms from ``numpy.random.PCG64(seed)`` and maps
each through the inverse CDF of the marginal distribution, so a histogram is
a pure function of (state, subset, shots, seed).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .gates import Circuit, apply_gate_array
from .model import IntensityRecord, Source, polarization
from .state import (
    DensityMatrix,
    StateVector,
    check_capacity,
    check_qubits,
    reduce_matrix,
)
from .circuits import DIMER_QUBITS

FREQ_TOL = 1e-9


def bitstrings(width: int) -> list[str]:
    return [format(k, f"0{width}b") for k in range(2**width)]


@dataclass(frozen=True)
class ShotHistogram:
    """Counts over the bitstrings of ``subset`` (first character = first listed qubit)."""

    counts: dict
    shots: int
    seed: int | None
    subset: tuple = field(default=DIMER_QUBITS)

    def __post_init__(self):
        subset = tuple(int(q) for q in self.subset)
        object.__setattr__(self, "subset", subset)
        if not subset:
            raise ValueError("histogram subset is empty")
        width = len(subset)
        counts = {key: 0 for key in bitstrings(width)}
        for key, n in dict(self.counts).items():
            if key not in counts:
                raise ValueError(f"bitstring {key!r} does not match a {width}-qubit subset")
            if int(n) < 0 or int(n) != n:
                raise ValueError(f"count for {key!r} must be a nonnegative integer")
            counts[key] = int(n)
        if sum(counts.values()) != self.shots:
            raise ValueError(f"counts sum to {sum(counts.values())}, expected {self.shots}")
        object.__setattr__(self, "counts", counts)

    def frequencies(self) -> dict[str, float]:
        return {k: n / self.shots for k, n in self.counts.items()}

    def to_json(self) -> str:
        return json.dumps(
            {"shots": self.shots, "seed": self.seed, "subset": list(self.subset),
             "counts": self.counts},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "ShotHistogram":
        data = json.loads(text)
        try:
            return cls(
                counts=data["counts"],
                shots=int(data["shots"]),
                seed=data.get("seed"),
                subset=tuple(data["subset"]),
            )
        except KeyError as exc:
            raise ValueError(f"histogram JSON missing field {exc.args[0]!r}") from None

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "ShotHistogram":
        return cls.from_json(Path(path).read_text())


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing channel applied to the acted qubits after every gate."""

    p_depolarizing: float = 0.0

    def __post_init__(self):
        p = self.p_depolarizing
        if not (0.0 <= p <= 1.0):
            raise ValueError(f"depolarizing probability must lie in [0, 1], got {p!r}")


def marginal_probabilities(state, subset: Sequence[int]) -> np.ndarray:
    """Probabilities of the 2**k bitstrings of ``subset`` for a pure or mixed state."""
    if len(subset) == 0:
        raise ValueError("subset must name at least one qubit")
    n = state.n_qubits
    subset = check_qubits(subset, n)
    if isinstance(state, StateVector):
        probs = np.abs(state.amplitudes.reshape((2,) * n)) ** 2
    else:
        probs = np.real(np.diag(state.elements)).reshape((2,) * n)
    others = tuple(q - 1 for q in range(1, n + 1) if q not in subset)
    marg = probs.sum(axis=others) if others else probs
    # remaining axes are in ascending qubit order; reorder to match subset
    remaining = sorted(subset)
    marg = np.transpose(marg, [remaining.index(q) for q in subset])
    return np.clip(marg.reshape(-1), 0.0, None)


def sample(state, subset: Sequence[int], shots: int, seed: int | None = None) -> ShotHistogram:
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    probs = marginal_probabilities(state, subset)
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = np.searchsorted(cdf, rng.random(shots), side="right")
    draws = np.minimum(draws, probs.size - 1)
    tally = np.bincount(draws, minlength=probs.size)
    keys = bitstrings(len(subset))
    return ShotHistogram(
        {k: int(n) for k, n in zip(keys, tally)}, int(shots), seed, tuple(subset)
    )


def exact_frequencies(state, subset: Sequence[int]) -> dict[str, float]:
    probs = marginal_probabilities(state, subset)
    return dict(zip(bitstrings(len(subset)), probs.tolist()))


def estimate_pure_intensities(
    a1: float, a2: float, tau: float = math.nan, source: Source = "sampled"
) -> IntensityRecord:
    """J0 = (2 a1 - 1)^2 and J+-2 = 2 a1 a2 from the |00> and |11> frequencies."""
    if a1 < 0 or a2 < 0 or a1 + a2 > 1 + FREQ_TOL:
        raise ValueError(f"invalid frequencies a1={a1!r}, a2={a2!r}")
    j2 = 2 * a1 * a2
    return IntensityRecord(tau, (2 * a1 - 1) ** 2, j2, j2, source)


def estimate_pure_from_frequencies(
    freqs: Mapping[str, float], tau: float = math.nan, source: Source = "sampled"
) -> IntensityRecord:
    return estimate_pure_intensities(freqs["00"], freqs["11"], tau, source)


def estimate_thermal_from_frequencies(
    freqs: Mapping[str, float], tau: float, beta: float, source: Source = "sampled"
) -> IntensityRecord:
    """J0 = cos(tau)(p00 - p11); J+-2 from J0 + 2 J2 = tanh(beta/2)."""
    j0 = math.cos(tau) * (freqs["00"] - freqs["11"])
    j2 = 0.5 * (polarization(beta) - j0)
    return IntensityRecord(tau, j0, j2, j2, source)


def estimate_pure_from_histogram(hist: ShotHistogram, tau: float = math.nan) -> IntensityRecord:
    if len(hist.subset) != 2:
        raise ValueError(f"pure-state estimator needs a 2-qubit histogram, got {hist.subset}")
    return estimate_pure_from_frequencies(hist.frequencies(), tau, "sampled")


def estimate_thermal_intensities(hist: ShotHistogram, tau: float, beta: float) -> IntensityRecord:
    if hist.subset != DIMER_QUBITS:
        raise ValueError(
            f"thermal estimator needs a histogram over qubits {DIMER_QUBITS}, got {hist.subset}"
        )
    return estimate_thermal_from_frequencies(hist.frequencies(), tau, beta, "sampled")


def apply_depolarizing(rho: DensityMatrix, acted_qubits: Sequence[int], p: float) -> DensityMatrix:
    """(1 - p) rho + p * Tr_acted(rho) (x) I/d on the acted qubits."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"depolarizing probability must lie in [0, 1], got {p!r}")
    n = rho.n_qubits
    acted = check_qubits(acted_qubits, n)
    if not acted:
        raise ValueError("acted_qubits must name at least one qubit")
    if p == 0.0:
        return rho
    rest = [q for q in range(1, n + 1) if q not in acted]
    d_acted = 2 ** len(acted)
    if rest:
        reduced = reduce_matrix(rho.elements, n, rest)
        # operator on (acted..., rest...) order, then permute back to 1..n
        mixed = np.kron(np.eye(d_acted) / d_acted, reduced)
        order = list(acted) + rest
        k = len(order)
        tensor = mixed.reshape((2,) * (2 * k))
        perm = [order.index(q) for q in range(1, n + 1)]
        tensor = np.transpose(tensor, perm + [k + i for i in perm])
        mixed = tensor.reshape(2**n, 2**n)
    else:
        mixed = np.eye(d_acted) / d_acted
    return DensityMatrix(n, (1 - p) * rho.elements + p * mixed)


def run_noisy_circuit(circuit: Circuit, noise: NoiseModel | None = None) -> DensityMatrix:
    """Evolve |0..0><0..0| gate by gate, depolarizing the acted qubits after each gate."""
    n = circuit.n_qubits
    check_capacity(n)
    d = 2**n
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = 1.0
    p = noise.p_depolarizing if noise is not None else 0.0
    state = DensityMatrix(n, rho)
    for g in circuit.gates:
        left = apply_gate_array(state.elements, g, n)
        # U rho U^dagger = (U (U rho)^dagger)^dagger
        both = apply_gate_array(left.conj().T, g, n).conj().T
        state = DensityMatrix(n, 0.5 * (both + both.conj().T))
        if p > 0:
            state = apply_depolarizing(state, g.qubits, p)
    return state
