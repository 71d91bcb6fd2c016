"""One-qubit rotations, CNOT, circuits, and their action on registers.

Rotations follow R_a(theta) = exp(-i theta sigma_a / 2). Circuits hold gates
in application order (first element acts first) and use 1-based qubit labels.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .state import MAX_QUBITS, CapacityError, StateVector, check_capacity, check_qubits


class GateKind(str, enum.Enum):
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CNOT = "cx"

    @property
    def is_rotation(self) -> bool:
        return self is not GateKind.CNOT


def rotation_matrix(kind, theta: float) -> np.ndarray:
    kind = GateKind(kind)
    if not kind.is_rotation:
        raise ValueError("rotation_matrix needs rx, ry or rz")
    if not math.isfinite(theta):
        raise ValueError(f"rotation angle must be finite, got {theta!r}")
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.array([[complex(c, -s), 0], [0, complex(c, s)]], dtype=complex)


_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CNOT.flags.writeable = False


def cnot_matrix() -> np.ndarray:
    """CNOT in the basis |00>,|01>,|10>,|11> with the first qubit as control."""
    return _CNOT.copy()


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple
    angle: float | None = None

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if kind.is_rotation:
            if len(qubits) != 1:
                raise ValueError(f"{kind.value} acts on exactly one qubit")
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{kind.value} needs a finite angle, got {self.angle!r}")
            object.__setattr__(self, "angle", float(self.angle))
        else:
            if len(qubits) != 2:
                raise ValueError("cx needs (control, target)")
            if qubits[0] == qubits[1]:
                raise ValueError("cx control and target must differ")
            if self.angle is not None:
                raise ValueError("cx takes no angle")
        if min(qubits) < 1:
            raise IndexError(f"qubit labels are 1-based, got {qubits}")

    def matrix(self) -> np.ndarray:
        if self.kind.is_rotation:
            return rotation_matrix(self.kind, self.angle)
        return cnot_matrix()

    def inverse(self) -> "Gate":
        if self.kind.is_rotation:
            return Gate(self.kind, self.qubits, -self.angle)
        return self


def rx(qubit: int, theta: float) -> Gate:
    return Gate(GateKind.RX, (qubit,), theta)


def ry(qubit: int, theta: float) -> Gate:
    return Gate(GateKind.RY, (qubit,), theta)


def rz(qubit: int, theta: float) -> Gate:
    return Gate(GateKind.RZ, (qubit,), theta)


def cnot(control: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, (control, target))


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        gates = tuple(self.gates)
        for g in gates:
            if max(g.qubits) > self.n_qubits:
                raise IndexError(
                    f"{g.kind.value} on {g.qubits} outside register 1..{self.n_qubits}"
                )
        object.__setattr__(self, "gates", gates)

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if not isinstance(other, Circuit):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot concatenate circuits on different registers")
        return Circuit(self.n_qubits, self.gates + other.gates)

    def inverse(self) -> "Circuit":
        return Circuit(self.n_qubits, tuple(g.inverse() for g in reversed(self.gates)))


def _apply_to_axes(tensor: np.ndarray, gate: Gate) -> np.ndarray:
    # tensor axes 0..n-1 are qubits 1..n; trailing axes are carried along
    if gate.kind.is_rotation:
        axis = gate.qubits[0] - 1
        out = np.tensordot(gate.matrix(), tensor, axes=([1], [axis]))
        return np.moveaxis(out, 0, axis)
    control, target = gate.qubits[0] - 1, gate.qubits[1] - 1
    out = tensor.copy()
    lo = [slice(None)] * tensor.ndim
    hi = [slice(None)] * tensor.ndim
    lo[control] = hi[control] = 1
    lo[target], hi[target] = 0, 1
    out[tuple(lo)] = tensor[tuple(hi)]
    out[tuple(hi)] = tensor[tuple(lo)]
    return out


def apply_gate_array(amplitudes: np.ndarray, gate: Gate, n_qubits: int) -> np.ndarray:
    """Apply ``gate`` to the leading 2**n axis of a raw array (vector or matrix)."""
    check_qubits(gate.qubits, n_qubits)
    a = np.asarray(amplitudes, dtype=complex)
    rest = a.shape[1:]
    tensor = a.reshape((2,) * n_qubits + rest)
    return _apply_to_axes(tensor, gate).reshape(a.shape)


def apply_gate(psi: StateVector, gate: Gate) -> StateVector:
    return StateVector(psi.n_qubits, apply_gate_array(psi.amplitudes, gate, psi.n_qubits))


def run_circuit(circuit: Circuit, psi: StateVector | None = None) -> StateVector:
    """Final state of ``circuit`` acting on ``psi`` (default |0...0>)."""
    check_capacity(circuit.n_qubits)
    if psi is None:
        amps = np.zeros(2**circuit.n_qubits, dtype=complex)
        amps[0] = 1.0
    else:
        if psi.n_qubits != circuit.n_qubits:
            raise ValueError("state and circuit registers differ")
        amps = psi.amplitudes
    for g in circuit.gates:
        amps = apply_gate_array(amps, g, circuit.n_qubits)
    return StateVector(circuit.n_qubits, amps)


_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _kron_chain(factors: Iterable[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def embed_gate(gate: Gate, n_qubits: int) -> np.ndarray:
    """Full 2**n matrix of ``gate`` built from Kronecker products."""
    check_qubits(gate.qubits, n_qubits)
    eye = np.eye(2, dtype=complex)
    if gate.kind.is_rotation:
        u = gate.matrix()
        return _kron_chain(u if q == gate.qubits[0] else eye for q in range(1, n_qubits + 1))
    control, target = gate.qubits
    off = _kron_chain(_P0 if q == control else eye for q in range(1, n_qubits + 1))
    on = _kron_chain(
        _P1 if q == control else _X if q == target else eye
        for q in range(1, n_qubits + 1)
    )
    return off + on


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Product of embedded gate matrices; the first gate is the rightmost factor."""
    if circuit.n_qubits > MAX_QUBITS:
        raise CapacityError(f"circuit_unitary supports at most {MAX_QUBITS} qubits")
    d = 2**circuit.n_qubits
    u = np.eye(d, dtype=complex)
    for g in circuit.gates:
        u = embed_gate(g, circuit.n_qubits) @ u
    return u


# --- assembly text -------------------------------------------------------

QASM_HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def format_angle(theta: float) -> str:
    """Shortest decimal that round-trips to the same double (17 digits at most)."""
    return repr(float(theta))


def to_qasm(circuit: Circuit) -> str:
    """Serialize to OpenQASM 2.0. Label q_k maps to register slot q[k-1]."""
    lines = [QASM_HEADER.rstrip("\n"), f"qreg q[{circuit.n_qubits}];"]
    for g in circuit.gates:
        if g.kind.is_rotation:
            lines.append(f"{g.kind.value}({format_angle(g.angle)}) q[{g.qubits[0] - 1}];")
        else:
            c, t = g.qubits
            lines.append(f"cx q[{c - 1}],q[{t - 1}];")
    return "\n".join(lines) + "\n"


_ROT_LINE = re.compile(r"^(rx|ry|rz)\(([^)]+)\)\s+q\[(\d+)\];$")
_CX_LINE = re.compile(r"^cx\s+q\[(\d+)\]\s*,\s*q\[(\d+)\];$")
_QREG_LINE = re.compile(r"^qreg\s+q\[(\d+)\];$")


def from_qasm(text: str) -> Circuit:
    """Parse the subset of OpenQASM 2.0 that :func:`to_qasm` writes."""
    n_qubits = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].strip()
        if not line or line.startswith(("OPENQASM", "include")):
            continue
        if m := _QREG_LINE.match(line):
            n_qubits = int(m.group(1))
        elif m := _ROT_LINE.match(line):
            gates.append(Gate(GateKind(m.group(1)), (int(m.group(3)) + 1,), float(m.group(2))))
        elif m := _CX_LINE.match(line):
            gates.append(cnot(int(m.group(1)) + 1, int(m.group(2)) + 1))
        else:
            raise ValueError(f"line {lineno}: unsupported statement {raw!r}")
    if n_qubits is None:
        raise ValueError("missing qreg declaration")
    return Circuit(n_qubits, tuple(gates))
