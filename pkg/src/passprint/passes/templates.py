"""
Peephole template rewriting.

Templates, matched with wire adjacency (no other gate on the involved wires
in between):

    cx(a,b) rz(t)@b cx(a,b)          -> rzz(t)(a,b)
    h(a) h(b) cx(a,b) h(a) h(b)      -> cx(b,a)
    t t -> s,  s s -> z
    h x h -> z,  h z h -> x
    rzz(t1) rzz(t2) on one pair      -> rzz(t1 + t2), dropped when trivial
"""
from __future__ import annotations

from ..circuit import Circuit, Gate, GateKind, gate_matrix, is_identity_up_to_phase
from .single_qubit import wrap_angle

K = GateKind
_PAIR = {K.T: K.S, K.S: K.Z}
_SANDWICH = {K.X: K.Z, K.Z: K.X}


def _neighbours(gates, n):
    """nxt[i][q] / prv[i][q]: wire-adjacent gate index on q, or -1."""
    nxt = [dict() for _ in gates]
    prv = [dict() for _ in gates]
    last = [-1] * n
    for i, g in enumerate(gates):
        for q in g.qubits:
            j = last[q]
            prv[i][q] = j
            if j >= 0:
                nxt[j][q] = i
            last[q] = i
    return nxt, prv


def _is(gates, i, kind, qubits):
    return i >= 0 and gates[i].kind is kind and gates[i].qubits == qubits


def _match(gates, i, nxt, prv):
    """(indices consumed, replacement gate) for a template anchored at i."""
    g = gates[i]
    k = g.kind
    if g.arity == 1:
        q = g.qubits[0]
        j = nxt[i].get(q, -1)
        if k in _PAIR and _is(gates, j, k, g.qubits):
            return [i, j], Gate(_PAIR[k], (q,))
        if k is K.H and j >= 0 and gates[j].kind in _SANDWICH and gates[j].qubits == g.qubits:
            m = nxt[j].get(q, -1)
            if _is(gates, m, K.H, g.qubits):
                return [i, j, m], Gate(_SANDWICH[gates[j].kind], (q,))
        return None
    a, b = g.qubits
    if k is K.RZZ:
        j = nxt[i].get(a, -1)
        if (j >= 0 and gates[j].kind is K.RZZ and set(gates[j].qubits) == {a, b}
                and nxt[i].get(b, -1) == j):
            merged = Gate(K.RZZ, (a, b), (wrap_angle(g.params[0] + gates[j].params[0]),))
            return [i, j], None if is_identity_up_to_phase(gate_matrix(merged)) else merged
        return None
    if k is not K.CX:
        return None
    # cx rz cx on the target
    j = nxt[i].get(b, -1)
    if _is(gates, j, K.RZ, (b,)):
        m = nxt[j].get(b, -1)
        if _is(gates, m, K.CX, (a, b)) and nxt[i].get(a, -1) == m:
            return [i, j, m], Gate(K.RZZ, (a, b), gates[j].params)
    # hadamard-conjugated cx
    ha, hb = prv[i].get(a, -1), prv[i].get(b, -1)
    na, nb = nxt[i].get(a, -1), nxt[i].get(b, -1)
    if (_is(gates, ha, K.H, (a,)) and _is(gates, hb, K.H, (b,))
            and _is(gates, na, K.H, (a,)) and _is(gates, nb, K.H, (b,))):
        return [ha, hb, i, na, nb], Gate(K.CX, (b, a))
    return None


def _sweep(c: Circuit) -> tuple[list[Gate], bool]:
    gates = c.gates
    nxt, prv = _neighbours(gates, c.num_qubits)
    used = set()
    replace = {}
    for i in range(len(gates)):
        if i in used:
            continue
        hit = _match(gates, i, nxt, prv)
        if hit is None:
            continue
        idx, new = hit
        if used.intersection(idx):
            continue
        used.update(idx)
        # anchor the replacement on the two-qubit gate, or the first gate
        anchor = i if gates[i].arity == 2 else idx[0]
        if new is not None:
            replace[anchor] = new
    if not used:
        return list(gates), False
    out = []
    for i, g in enumerate(gates):
        if i in replace:
            out.append(replace[i])
        elif i not in used:
            out.append(g)
    return out, True


def template_optimization(c: Circuit) -> Circuit:
    changed = True
    while changed:
        gates, changed = _sweep(c)
        c = c.with_gates(gates)
    return c
