"""Dense pure states and density matrices of small qubit registers.

Qubits are labelled 1..n. Qubit 1 is the most significant bit of the basis
index, so the basis state ``|q1 q2 ... qn>`` has index ``int("q1q2...qn", 2)``.
``|0>`` is spin up and carries I_z = +1/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MAX_QUBITS = 12

NORM_TOL = 1e-12
PSD_TOL = 1e-10


class CapacityError(ValueError):
    """Register is larger than the dense representation allows."""


def check_capacity(n_qubits: int) -> None:
    if not isinstance(n_qubits, (int, np.integer)) or isinstance(n_qubits, bool):
        raise TypeError(f"n_qubits must be an integer, got {n_qubits!r}")
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"n_qubits must lie in [1, {MAX_QUBITS}], got {n_qubits}")


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=complex, copy=True)
    out.flags.writeable = False
    return out


def check_qubits(qubits: Sequence[int], n_qubits: int) -> tuple[int, ...]:
    """Validate 1-based qubit labels: in range and pairwise distinct."""
    qubits = tuple(int(q) for q in qubits)
    for q in qubits:
        if not 1 <= q <= n_qubits:
            raise IndexError(f"qubit {q} outside register 1..{n_qubits}")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubit indices in {qubits}")
    return qubits


@dataclass(frozen=True)
class StateVector:
    """Normalized amplitudes over the 2**n computational basis."""

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_capacity(self.n_qubits)
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes, got {amps.shape[0]}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        n = int(round(np.log2(amps.size))) if amps.size else 0
        if amps.size == 0 or 2**n != amps.size:
            raise ValueError(f"amplitude count {amps.size} is not a power of two")
        return cls(n, amps)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __len__(self):
        return self.dim


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace matrix over the 2**n computational basis.

    Construction checks shape, hermiticity and trace. Positivity costs an
    eigendecomposition and is checked on demand by :meth:`validate`.
    """

    n_qubits: int
    elements: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_capacity(self.n_qubits)
        rho = _frozen(self.elements)
        d = 2**self.n_qubits
        if rho.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) >= NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho)
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        object.__setattr__(self, "elements", rho)

    @classmethod
    def from_matrix(cls, matrix) -> "DensityMatrix":
        m = np.asarray(matrix, dtype=complex)
        n = int(round(np.log2(m.shape[0])))
        return cls(n, m)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.elements)

    def validate(self) -> "DensityMatrix":
        """Raise if any eigenvalue falls below -1e-10; return self otherwise."""
        lowest = float(self.eigenvalues()[0])
        if lowest < -PSD_TOL:
            raise ValueError(f"density matrix is not PSD (min eigenvalue {lowest})")
        return self

    def diagonal(self) -> np.ndarray:
        return np.diag(self.elements).real.copy()

    def purity(self) -> float:
        return float(np.real(np.trace(self.elements @ self.elements)))


@dataclass(frozen=True)
class CollectiveSpinZ:
    """Diagonal of I_z = sum_j I_jz; basis state k has weight (n - 2*popcount(k))/2."""

    n_qubits: int

    def __post_init__(self):
        check_capacity(self.n_qubits)

    @property
    def weights(self) -> np.ndarray:
        k = np.arange(2**self.n_qubits)
        ones = np.array([bin(i).count("1") for i in k])
        return (self.n_qubits - 2 * ones) / 2.0

    def matrix(self) -> np.ndarray:
        return np.diag(self.weights).astype(complex)


def collective_iz(n_qubits: int) -> CollectiveSpinZ:
    return CollectiveSpinZ(n_qubits)


@dataclass(frozen=True)
class CoherenceDecomposition:
    """Blocks of a matrix keyed by coherence order m_row - m_col."""

    blocks: dict

    def __getitem__(self, order: int) -> np.ndarray:
        return self.blocks[order]

    @property
    def orders(self) -> list[int]:
        return sorted(self.blocks)

    def reconstruct(self) -> np.ndarray:
        return sum(self.blocks[n] for n in self.orders)

    def nonzero_orders(self, atol: float = 0.0) -> list[int]:
        return [n for n in self.orders if np.max(np.abs(self.blocks[n])) > atol]


def ground_state(n_qubits: int) -> StateVector:
    check_capacity(n_qubits)
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def basis_state(bits: str) -> StateVector:
    """Computational basis state from a ket label such as ``"0110"``."""
    n = len(bits)
    check_capacity(n)
    amps = np.zeros(2**n, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return StateVector(n, amps)


def density_from_pure(psi: StateVector) -> DensityMatrix:
    a = psi.amplitudes
    return DensityMatrix(psi.n_qubits, np.outer(a, a.conj()))


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    check_capacity(n_qubits)
    d = 2**n_qubits
    return DensityMatrix(n_qubits, np.eye(d) / d)


def _letters(count: int) -> str:
    alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    return alphabet[:count]


def reduce_matrix(matrix: np.ndarray, n_qubits: int, keep: Sequence[int]) -> np.ndarray:
    """Partial trace of a raw 2**n square array onto ``keep`` (1-based, ordered)."""
    keep = check_qubits(keep, n_qubits)
    letters = _letters(2 * n_qubits)
    rows, cols = list(letters[:n_qubits]), list(letters[n_qubits:])
    for q in range(1, n_qubits + 1):
        if q not in keep:
            cols[q - 1] = rows[q - 1]
    out_rows = "".join(rows[q - 1] for q in keep)
    out_cols = "".join(cols[q - 1] for q in keep)
    spec = f"{''.join(rows)}{''.join(cols)}->{out_rows}{out_cols}"
    tensor = np.asarray(matrix).reshape([2] * (2 * n_qubits))
    d = 2 ** len(keep)
    return np.einsum(spec, tensor).reshape(d, d)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix over ``keep``, in the order given."""
    if len(keep) == 0:
        raise ValueError("keep must name at least one qubit")
    reduced = reduce_matrix(rho.elements, rho.n_qubits, keep)
    return DensityMatrix(len(keep), reduced)


def coherence_decompose(rho, iz: CollectiveSpinZ | None = None) -> CoherenceDecomposition:
    """Split ``rho`` into blocks of fixed coherence order.

    Element (r, c) lands in order ``m_r - m_c`` where m is the I_z weight.
    Accepts a :class:`DensityMatrix` or any square array (e.g. an observable).
    """
    matrix = rho.elements if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if iz is None:
        iz = CollectiveSpinZ(int(round(np.log2(matrix.shape[0]))))
    d = 2**iz.n_qubits
    if matrix.shape != (d, d):
        raise ValueError(
            f"matrix shape {matrix.shape} does not match a {iz.n_qubits}-qubit I_z"
        )
    m = iz.weights
    order = np.rint(m[:, None] - m[None, :]).astype(int)
    blocks = {}
    for n in range(-iz.n_qubits, iz.n_qubits + 1):
        blocks[n] = np.where(order == n, matrix, 0)
    return CoherenceDecomposition(blocks)


def align_global_phase(array: np.ndarray) -> np.ndarray:
    """Rotate ``array`` so its largest-magnitude entry is real and positive."""
    a = np.asarray(array, dtype=complex)
    flat = a.ravel()
    k = int(np.argmax(np.abs(flat)))
    if flat[k] == 0:
        return a.copy()
    return a * (abs(flat[k]) / flat[k])


def distance_up_to_phase(a, b, ord=None) -> float:
    """Norm of ``a*e^{i phi} - b`` with phi taken from the overlap <a, b>.

    For matrices ``ord=2`` gives the operator norm; vectors default to 2-norm.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    inner = np.vdot(a.ravel(), b.ravel())
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.linalg.norm(a * phase - b, ord=ord))
