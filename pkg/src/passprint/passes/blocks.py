"""Two-qubit block consolidation and product-gate splitting."""
from __future__ import annotations

import numpy as np

from ..circuit import Circuit, Gate, GateKind, gate_matrix, unitary_gate
from .single_qubit import resynthesize_1q

SCHMIDT_TOL = 1e-9


def embed(g: Gate, pair: tuple[int, int]) -> np.ndarray:
    """4x4 matrix of ``g`` on the little-endian qubit pair ``pair``."""
    m = gate_matrix(g)
    lo, hi = pair
    if g.arity == 1:
        return np.kron(np.eye(2), m) if g.qubits[0] == lo else np.kron(m, np.eye(2))
    if g.qubits == (lo, hi):
        return m
    # reversed orientation: conjugate by swap
    return m.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)


def collect_list_blocks(c: Circuit) -> list[list[int]]:
    """Maximal runs of consecutive gates whose joint support is <= 2 qubits."""
    blocks: list[list[int]] = []
    support: set[int] = set()
    for i, g in enumerate(c.gates):
        joined = support.union(g.qubits)
        if blocks and len(joined) <= 2:
            blocks[-1].append(i)
            support = joined
        else:
            blocks.append([i])
            support = set(g.qubits)
    return blocks


def collect_wire_blocks(c: Circuit) -> list[list[int]]:
    """Greedy wire-contiguous blocks on at most two qubits.

    A block opens at a two-qubit gate, absorbing the one-qubit gates waiting
    on its wires, keeps absorbing gates on its pair and closes as soon as any
    other two-qubit gate touches one of its wires.  Nothing outside a block
    touches its wires between the block's first and last gate, so the whole
    block may be emitted at the position of its last gate.
    """
    blocks: list[list[int]] = []
    open_block: list[int | None] = [None] * c.num_qubits  # block index per wire
    pending: list[list[int]] = [[] for _ in range(c.num_qubits)]

    def close(b):
        for q in range(c.num_qubits):
            if open_block[q] == b:
                open_block[q] = None

    for i, g in enumerate(c.gates):
        if g.arity == 1:
            q = g.qubits[0]
            if open_block[q] is not None:
                blocks[open_block[q]].append(i)
            else:
                pending[q].append(i)
            continue
        a, b = g.qubits
        if open_block[a] is not None and open_block[a] == open_block[b]:
            blocks[open_block[a]].append(i)
            continue
        for q in (a, b):
            if open_block[q] is not None:
                close(open_block[q])
        members = sorted(pending[a] + pending[b]) + [i]
        pending[a], pending[b] = [], []
        blocks.append(members)
        open_block[a] = open_block[b] = len(blocks) - 1
    return blocks


def block_matrix(c: Circuit, members: list[int], pair: tuple[int, int]) -> np.ndarray:
    u = np.eye(4, dtype=complex)
    for i in members:
        u = embed(c.gates[i], pair) @ u
    return u


def consolidate_blocks(c: Circuit, wire_blocks: bool = False) -> Circuit:
    """Replace every multi-gate block holding a two-qubit gate by one opaque unitary.

    Blocks are runs of consecutive gates in program order by default; with
    ``wire_blocks`` they are collected along the wires instead, which
    consolidates far more aggressively on wide circuits.
    """
    collect = collect_wire_blocks if wire_blocks else collect_list_blocks
    replace: dict[int, Gate] = {}
    drop = set()
    for members in collect(c):
        if len(members) < 2:
            continue
        two = next((c.gates[i] for i in members if c.gates[i].arity == 2), None)
        if two is None:
            continue
        pair = tuple(sorted(two.qubits))
        replace[members[-1]] = unitary_gate(block_matrix(c, members, pair), *pair)
        drop.update(members[:-1])
    if not replace:
        return c
    out = []
    for i, g in enumerate(c.gates):
        if i in drop:
            continue
        out.append(replace.get(i, g))
    return c.with_gates(out)


def operator_schmidt(u: np.ndarray):
    """SVD of the 4x4 matrix re-indexed as (row i1 j1, col i0 j0).

    With ``u = kron(A, B)`` (A on the second qubit, B on the first) the
    re-indexed matrix is ``vec(A) vec(B)^T``.
    """
    r = u.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    return np.linalg.svd(r)


def split_product(u: np.ndarray):
    """(B, A) with u = kron(A, B) if u has operator-Schmidt rank 1, else None."""
    left, s, right = operator_schmidt(u)
    if np.sum(s > SCHMIDT_TOL) != 1:
        return None
    a = np.sqrt(s[0]) * left[:, 0].reshape(2, 2)
    b = np.sqrt(s[0]) * right[0, :].reshape(2, 2)
    return b, a


def split_2q_unitaries(c: Circuit) -> Circuit:
    out = []
    changed = False
    for g in c.gates:
        if g.arity == 2:
            parts = split_product(gate_matrix(g))
            if parts is not None:
                b, a = parts
                q0, q1 = g.qubits
                out.extend(resynthesize_1q(b, q0))
                out.extend(resynthesize_1q(a, q1))
                changed = True
                continue
        out.append(g)
    return c.with_gates(out) if changed else c
