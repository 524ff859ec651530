"""Single-qubit run fusion and ZYZ resynthesis."""
from __future__ import annotations

from math import atan2, pi, remainder, tau

import numpy as np

from ..circuit import Circuit, Gate, GateKind, gate_matrix, is_identity_up_to_phase

ANGLE_TOL = 1e-10
RUN_IDENTITY_TOL = 1e-10


def wrap_angle(a: float) -> float:
    """Map an angle onto [-pi, pi]."""
    return remainder(a, tau)


def zyz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """(theta, phi, lam) with u = e^{ia} u3(theta, phi, lam)."""
    v = u / np.sqrt(np.linalg.det(u))
    theta = 2 * atan2(abs(v[1, 0]), abs(v[0, 0]))
    # angle(v11) = (phi+lam)/2 and angle(v10) = (phi-lam)/2 for the SU(2) form
    plus = np.angle(v[1, 1])
    minus = np.angle(v[1, 0])
    return theta, wrap_angle(plus + minus), wrap_angle(plus - minus)


def resynthesize_1q(u: np.ndarray, qubit: int) -> list[Gate]:
    """Canonical u1/u2/u3 replacement for a one-qubit unitary, or nothing."""
    if is_identity_up_to_phase(u, RUN_IDENTITY_TOL):
        return []
    theta, phi, lam = zyz_angles(u)
    if theta < ANGLE_TOL:
        return [Gate(GateKind.U1, (qubit,), (wrap_angle(phi + lam),))]
    if abs(theta - pi / 2) < ANGLE_TOL:
        return [Gate(GateKind.U2, (qubit,), (phi, lam))]
    return [Gate(GateKind.U3, (qubit,), (theta, phi, lam))]


def optimize_1q_gates(c: Circuit) -> Circuit:
    """Collapse every maximal one-qubit run into a single canonical gate."""
    runs: dict[int, list[int]] = {}   # qubit -> indices of the open run
    replace: dict[int, list[Gate]] = {}
    drop = set()

    def close(q):
        idx = runs.pop(q, None)
        if not idx:
            return
        u = gate_matrix(c.gates[idx[0]])
        for i in idx[1:]:
            u = gate_matrix(c.gates[i]) @ u
        replace[idx[-1]] = resynthesize_1q(u, q)
        drop.update(idx[:-1])

    for i, g in enumerate(c.gates):
        if g.arity == 1:
            runs.setdefault(g.qubits[0], []).append(i)
        else:
            for q in g.qubits:
                close(q)
    for q in list(runs):
        close(q)

    out = []
    for i, g in enumerate(c.gates):
        if i in drop:
            continue
        out.extend(replace.get(i, (g,)))
    return c.with_gates(out)
