"""Dense statevector / unitary simulator used to check pass correctness."""
from __future__ import annotations

import numpy as np

from .circuit import Circuit, gate_matrix

MAX_STATE_QUBITS = 14
MAX_UNITARY_QUBITS = 10


class SimulationError(ValueError):
    pass


def _apply(state: np.ndarray, c: Circuit) -> np.ndarray:
    # state has shape (2,)*n + (batch,); qubit q lives on axis n-1-q
    n = c.num_qubits
    for g in c.gates:
        m = gate_matrix(g)
        if g.arity == 1:
            ax = n - 1 - g.qubits[0]
            state = np.moveaxis(np.tensordot(m, state, axes=([1], [ax])), 0, ax)
        else:
            q0, q1 = g.qubits
            a0, a1 = n - 1 - q0, n - 1 - q1
            m4 = m.reshape(2, 2, 2, 2)  # (out1, out0, in1, in0)
            state = np.moveaxis(np.tensordot(m4, state, axes=([2, 3], [a1, a0])), [0, 1], [a1, a0])
    return state


def simulate(c: Circuit, initial=None) -> np.ndarray:
    """Apply ``c`` to ``initial`` (default |0...0>), little-endian amplitudes."""
    n = c.num_qubits
    if n > MAX_STATE_QUBITS:
        raise SimulationError(f"{n} qubits exceeds the statevector limit of {MAX_STATE_QUBITS}")
    if initial is None:
        initial = np.zeros(2 ** n, dtype=complex)
        initial[0] = 1
    initial = np.asarray(initial, dtype=complex)
    if initial.shape != (2 ** n,):
        raise SimulationError(f"initial state has shape {initial.shape}, expected ({2 ** n},)")
    out = _apply(initial.reshape((2,) * n + (1,)), c)
    return out.reshape(2 ** n)


def full_unitary(c: Circuit) -> np.ndarray:
    n = c.num_qubits
    if n > MAX_UNITARY_QUBITS:
        raise SimulationError(f"{n} qubits exceeds the unitary limit of {MAX_UNITARY_QUBITS}")
    dim = 2 ** n
    # columns are the images of the basis states
    out = _apply(np.eye(dim, dtype=complex).reshape((2,) * n + (dim,)), c)
    return out.reshape(dim, dim)


def phase_deviation(a: np.ndarray, b: np.ndarray) -> float:
    """max |a - e^{i phi} b| with the phase fixed at b's largest entry."""
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    ratio = a[idx] / b[idx]
    phase = ratio / abs(ratio) if abs(ratio) > 0 else 1.0
    return float(np.max(np.abs(a - phase * b)))


def unitary_deviation(a: Circuit, b: Circuit) -> float:
    if a.num_qubits != b.num_qubits:
        raise SimulationError(f"qubit count mismatch: {a.num_qubits} vs {b.num_qubits}")
    return phase_deviation(full_unitary(a), full_unitary(b))


def equivalent_up_to_phase(a: Circuit, b: Circuit, tol: float = 1e-9) -> bool:
    return unitary_deviation(a, b) < tol
