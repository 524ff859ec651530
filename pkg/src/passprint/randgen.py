"""
Seeded layered random circuits.

Every layer walks the qubit line from 0 upward and, at each position, opens
either a two-qubit slot on ``(q, q+1)`` (probability ``pair_prob``, when a
neighbour is left) or a one-qubit slot on ``q``.  Each slot gets a gate of
matching arity drawn uniformly from the palette; two-qubit gates get a random
orientation, and every angle is uniform on [0, 2pi).

Randomness comes from numpy's PCG64 seeded with ``SeedSequence([seed, index])``
so that sample ``index`` of a dataset owns an independent, reproducible stream.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import tau

import numpy as np

from .circuit import Circuit, Gate, GateKind

DEFAULT_1Q = (GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S, GateKind.SDG,
              GateKind.T, GateKind.TDG, GateKind.RX, GateKind.RY, GateKind.RZ,
              GateKind.U1, GateKind.U2, GateKind.U3)
DEFAULT_2Q = (GateKind.CX, GateKind.CZ, GateKind.SWAP, GateKind.RZZ)
DEFAULT_PALETTE = DEFAULT_1Q + DEFAULT_2Q


class GenSpecError(ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    num_qubits: int
    depth: int
    seed: int = 0
    palette: tuple[GateKind, ...] = DEFAULT_PALETTE
    pair_prob: float = 0.5

    def __post_init__(self):
        palette = tuple(dict.fromkeys(GateKind(k) for k in self.palette))
        object.__setattr__(self, "palette", palette)
        if self.depth < 1:
            raise GenSpecError("depth must be at least 1")
        if self.num_qubits < 1:
            raise GenSpecError("num_qubits must be at least 1")
        if any(k.is_opaque for k in palette):
            raise GenSpecError("opaque gates cannot be drawn at random")
        one = [k for k in palette if k.arity == 1]
        two = [k for k in palette if k.arity == 2]
        if two and self.num_qubits < 2:
            raise GenSpecError("two-qubit palette needs at least 2 qubits")
        if not one and not two:
            raise GenSpecError("empty palette")
        if not one and self.num_qubits % 2:
            # a one-qubit-free palette cannot tile an odd line
            raise GenSpecError("palette without one-qubit gates needs an even qubit count")
        if not 0 <= self.pair_prob <= 1:
            raise GenSpecError("pair_prob must lie in [0, 1]")


def make_rng(seed: int, index: int | None = None) -> np.random.Generator:
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    if index is not None:
        entropy.append(int(index))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def random_circuit(spec: GenSpec, rng: np.random.Generator | None = None) -> Circuit:
    if rng is None:
        rng = make_rng(spec.seed)
    one = [k for k in spec.palette if k.arity == 1]
    two = [k for k in spec.palette if k.arity == 2]
    n = spec.num_qubits
    if not one:
        pair_prob = 1.0
    elif not two:
        pair_prob = 0.0
    else:
        pair_prob = spec.pair_prob
    gates = []
    for _ in range(spec.depth):
        q = 0
        while q < n:
            if q + 1 < n and rng.random() < pair_prob:
                kind = two[rng.integers(len(two))]
                pair = (q, q + 1) if rng.random() < 0.5 else (q + 1, q)
                params = tuple(rng.uniform(0, tau, kind.num_params))
                gates.append(Gate(kind, pair, params))
                q += 2
            else:
                kind = one[rng.integers(len(one))]
                params = tuple(rng.uniform(0, tau, kind.num_params))
                gates.append(Gate(kind, (q,), params))
                q += 1
    return Circuit(n, tuple(gates))
