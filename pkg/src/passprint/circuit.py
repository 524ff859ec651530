"""
Circuit IR: gate vocabulary, gates, circuits and gate matrices.

Qubit convention is little-endian everywhere: for a two-qubit gate on
``(q0, q1)`` the first listed qubit is the least significant tensor factor,
so the 4x4 matrix is indexed by ``b(q0) + 2 * b(q1)``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from math import cos, pi, sin, sqrt

import numpy as np


class GateKind(str, Enum):
    U1 = "u1"
    U2 = "u2"
    U3 = "u3"
    RZ = "rz"
    RX = "rx"
    RY = "ry"
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    CX = "cx"
    CY = "cy"
    CZ = "cz"
    SWAP = "swap"
    RZZ = "rzz"
    UNITARY1 = "unitary1"
    UNITARY2 = "unitary2"

    @property
    def arity(self) -> int:
        return 2 if self in _TWO_QUBIT else 1

    @property
    def num_params(self) -> int:
        return _NUM_PARAMS.get(self, 0)

    @property
    def is_opaque(self) -> bool:
        return self in (GateKind.UNITARY1, GateKind.UNITARY2)


_TWO_QUBIT = frozenset({GateKind.CX, GateKind.CY, GateKind.CZ, GateKind.SWAP,
                        GateKind.RZZ, GateKind.UNITARY2})
_NUM_PARAMS = {GateKind.U1: 1, GateKind.U2: 2, GateKind.U3: 3, GateKind.RZ: 1,
               GateKind.RX: 1, GateKind.RY: 1, GateKind.RZZ: 1}

NAMED_KINDS = tuple(k for k in GateKind if not k.is_opaque)

# Histogram order used by the feature extractor.
HISTOGRAM_KINDS = (GateKind.U1, GateKind.U2, GateKind.U3, GateKind.RZ, GateKind.X,
                   GateKind.H, GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG,
                   GateKind.CX, GateKind.CZ, GateKind.SWAP, GateKind.RZZ)


class CircuitError(ValueError):
    """Raised when a gate or circuit violates the IR invariants."""


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    # Only set for opaque kinds; excluded from the generated __eq__.
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(self.qubits) != kind.arity:
            raise CircuitError(f"{kind.value} acts on {kind.arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{kind.value} has repeated qubits {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"negative qubit index in {self.qubits}")
        if len(self.params) != kind.num_params:
            raise CircuitError(f"{kind.value} takes {kind.num_params} parameter(s), "
                               f"got {len(self.params)}")
        if kind.is_opaque:
            if self.matrix is None:
                raise CircuitError(f"{kind.value} requires a matrix")
            m = np.array(self.matrix, dtype=complex)
            dim = 2 ** kind.arity
            if m.shape != (dim, dim):
                raise CircuitError(f"{kind.value} matrix must be {dim}x{dim}, got {m.shape}")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
        elif self.matrix is not None:
            raise CircuitError(f"named gate {kind.value} cannot carry a matrix")

    @property
    def arity(self) -> int:
        return self.kind.arity

    def __str__(self):
        p = "(" + ",".join(f"{x:.6g}" for x in self.params) + ")" if self.params else ""
        return f"{self.kind.value}{p}{list(self.qubits)}"


def unitary_gate(matrix, *qubits: int) -> Gate:
    """Opaque gate from an explicit (little-endian) matrix."""
    kind = GateKind.UNITARY2 if len(qubits) == 2 else GateKind.UNITARY1
    return Gate(kind, qubits, (), np.asarray(matrix, dtype=complex))


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    name: str | None = None

    def __post_init__(self):
        if int(self.num_qubits) < 1:
            raise CircuitError("a circuit needs at least one qubit")
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        n = self.num_qubits
        for g in gates:
            if max(g.qubits) >= n:
                raise CircuitError(f"gate {g} is outside a {n}-qubit register")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def with_gates(self, gates) -> Circuit:
        return Circuit(self.num_qubits, tuple(gates), self.name)

    def __add__(self, other: Circuit) -> Circuit:
        if other.num_qubits != self.num_qubits:
            raise CircuitError("cannot concatenate circuits of different width")
        return self.with_gates(self.gates + other.gates)


# --- gate matrices -------------------------------------------------------

_S2 = 1 / sqrt(2)
_FIXED = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * pi / 4)]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, np.exp(-1j * pi / 4)]], dtype=complex),
    # little-endian: index = b(first qubit) + 2*b(second qubit)
    GateKind.CX: np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex),
    GateKind.CY: np.array([[1, 0, 0, 0], [0, 0, 0, -1j], [0, 0, 1, 0], [0, 1j, 0, 0]], dtype=complex),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.SWAP: np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}
for _m in _FIXED.values():
    _m.setflags(write=False)


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array([[c, -np.exp(1j * lam) * s],
                     [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]], dtype=complex)


def _rz(t):
    return np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]], dtype=complex)


def _rx(t):
    c, s = cos(t / 2), sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(t):
    c, s = cos(t / 2), sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rzz(t):
    a, b = np.exp(-0.5j * t), np.exp(0.5j * t)
    return np.diag([a, b, b, a])


_PARAMETRIC = {
    GateKind.U1: lambda p: np.array([[1, 0], [0, np.exp(1j * p[0])]], dtype=complex),
    GateKind.U2: lambda p: u3_matrix(pi / 2, p[0], p[1]),
    GateKind.U3: lambda p: u3_matrix(*p),
    GateKind.RZ: lambda p: _rz(p[0]),
    GateKind.RX: lambda p: _rx(p[0]),
    GateKind.RY: lambda p: _ry(p[0]),
    GateKind.RZZ: lambda p: _rzz(p[0]),
}


def gate_matrix(g: Gate) -> np.ndarray:
    """2x2 or 4x4 unitary of ``g`` (little-endian for two-qubit gates)."""
    if g.matrix is not None:
        return g.matrix
    m = _FIXED.get(g.kind)
    if m is not None:
        return m
    return _PARAMETRIC[g.kind](g.params)


# --- structural queries --------------------------------------------------

def depth(c: Circuit) -> int:
    level = [0] * c.num_qubits
    best = 0
    for g in c.gates:
        d = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = d
        if d > best:
            best = d
    return best


@dataclass(frozen=True)
class GateCounts:
    by_kind: dict
    total: int
    one_qubit: int
    two_qubit: int

    def __getitem__(self, kind) -> int:
        return self.by_kind.get(GateKind(kind), 0)


def gate_counts(c: Circuit) -> GateCounts:
    """Named-gate histogram plus totals; opaque gates only reach the totals."""
    counts = Counter(g.kind for g in c.gates)
    one = sum(n for k, n in counts.items() if k.arity == 1)
    two = sum(n for k, n in counts.items() if k.arity == 2)
    named = {k: n for k, n in counts.items() if not k.is_opaque}
    return GateCounts(named, len(c.gates), one, two)


def qubits_overlap(a: Gate, b: Gate) -> bool:
    return not set(a.qubits).isdisjoint(b.qubits)


def is_identity_up_to_phase(u: np.ndarray, tol: float = 1e-10) -> bool:
    """True when ``max |U - e^{ia} I| < tol`` with the phase ``a`` read off ``Tr U``.

    A bare ``|Tr U|`` threshold is only quadratic in the distance from the
    identity, so it would accept gates that are off by ~sqrt(tol).
    """
    tr = np.trace(u)
    if abs(tr) < 0.5 * u.shape[0]:
        return False
    return float(np.max(np.abs(u - tr / abs(tr) * np.eye(u.shape[0])))) < tol
