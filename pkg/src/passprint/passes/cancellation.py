"""Inverse-pair cancellation, commutation-aware cancellation, identity removal."""
from __future__ import annotations

from math import pi

from ..circuit import Circuit, Gate, GateKind, gate_matrix, is_identity_up_to_phase
from .single_qubit import wrap_angle

K = GateKind
SELF_INVERSE = frozenset({K.H, K.X, K.Y, K.Z, K.CX, K.CY, K.CZ, K.SWAP})
INVERSE_OF = {K.S: K.SDG, K.SDG: K.S, K.T: K.TDG, K.TDG: K.T}


def cancels(a: Gate, b: Gate) -> bool:
    if a.qubits != b.qubits:
        return False
    if a.kind in SELF_INVERSE:
        return b.kind == a.kind
    return INVERSE_OF.get(a.kind) == b.kind


def inverse_cancellation(c: Circuit) -> Circuit:
    """Remove wire-adjacent inverse pairs until none remain.

    A per-wire stack of surviving gates makes a single sweep reach the
    fixpoint: after a pair is removed the next gate is compared against the
    newly exposed predecessor.
    """
    gates = c.gates
    alive = [True] * len(gates)
    stacks: list[list[int]] = [[] for _ in range(c.num_qubits)]
    for i, g in enumerate(gates):
        tops = {stacks[q][-1] if stacks[q] else -1 for q in g.qubits}
        if len(tops) == 1:
            j = tops.pop()
            if j >= 0 and cancels(gates[j], g):
                alive[j] = alive[i] = False
                for q in g.qubits:
                    stacks[q].pop()
                continue
        for q in g.qubits:
            stacks[q].append(i)
    return c.with_gates(g for g, a in zip(gates, alive) if a)


def remove_identity_equivalent(c: Circuit) -> Circuit:
    return c.with_gates(g for g in c.gates if not is_identity_up_to_phase(gate_matrix(g)))


# --- commutative cancellation -------------------------------------------

# rz-equivalent angle of each diagonal one-qubit gate (equal up to phase)
Z_ANGLE = {K.Z: lambda p: pi, K.S: lambda p: pi / 2, K.SDG: lambda p: -pi / 2,
           K.T: lambda p: pi / 4, K.TDG: lambda p: -pi / 4,
           K.RZ: lambda p: p[0], K.U1: lambda p: p[0]}
X_1Q = frozenset({K.X, K.RX})


def wire_role(g: Gate, q: int) -> str | None:
    """Commutation family of ``g`` on wire ``q``: 'z', 'x' or None."""
    k = g.kind
    if k in Z_ANGLE or k in (K.CZ, K.RZZ):
        return "z"
    if k in X_1Q:
        return "x"
    if k is K.CX:
        return "z" if q == g.qubits[0] else "x"
    return None


def _commutative_round(c: Circuit) -> tuple[list[Gate], bool]:
    gates = c.gates
    # group id of every (gate, wire) incidence; None-role gates get private ids
    group: dict[tuple[int, int], int] = {}
    members: dict[int, list[int]] = {}
    roles: dict[int, str] = {}
    next_id = 0
    current = [None] * c.num_qubits  # (role, gid) of the open group per wire
    for i, g in enumerate(gates):
        for q in g.qubits:
            r = wire_role(g, q)
            cur = current[q]
            if r is not None and cur is not None and cur[0] == r:
                gid = cur[1]
            else:
                gid = next_id
                next_id += 1
                current[q] = (r, gid) if r is not None else None
                roles[gid] = r
            group[i, q] = gid
            members.setdefault(gid, []).append(i)

    replace: dict[int, Gate | None] = {}
    for gid, idx in members.items():
        role = roles[gid]
        if role == "z":
            diag = [i for i in idx if gates[i].kind in Z_ANGLE]
            if len(diag) >= 2:
                q = gates[diag[0]].qubits[0]
                angle = wrap_angle(sum(Z_ANGLE[gates[i].kind](gates[i].params) for i in diag))
                rz = Gate(K.RZ, (q,), (angle,))
                keep = not is_identity_up_to_phase(gate_matrix(rz))
                replace[diag[0]] = rz if keep else None
                for i in diag[1:]:
                    replace[i] = None
        elif role == "x":
            xs = [i for i in idx if gates[i].kind is K.X]
            for i in xs[len(xs) % 2:]:
                replace[i] = None

    # two-qubit self-inverse gates sharing a commuting group on both wires
    buckets: dict[tuple, list[int]] = {}
    for i, g in enumerate(gates):
        if g.arity == 2 and g.kind in (K.CX, K.CZ):
            key = (g.kind, g.qubits, group[i, g.qubits[0]], group[i, g.qubits[1]])
            buckets.setdefault(key, []).append(i)
    for idx in buckets.values():
        for i in idx[len(idx) % 2:]:
            replace[i] = None

    if not replace:
        return list(gates), False
    out = []
    for i, g in enumerate(gates):
        if i in replace:
            if replace[i] is not None:
                out.append(replace[i])
        else:
            out.append(g)
    return out, True


def commutative_cancellation(c: Circuit) -> Circuit:
    """Cancel and merge gates across commuting neighbours, to a fixpoint.

    Per wire, consecutive gates of the same family form a commuting group:
    the z family holds diagonal gates plus the control side of cx, the x
    family holds x/rx plus the target side of cx.  Inside a group, diagonal
    one-qubit gates merge into one rz, x pairs cancel, and cx/cz pairs on the
    same qubit tuple that share a group on both wires cancel.
    """
    changed = True
    while changed:
        gates, changed = _commutative_round(c)
        c = c.with_gates(gates)
    return c
