"""Stabilizer tableaux and Clifford segment resynthesis into {h, s, cx}."""
from __future__ import annotations

import numpy as np

from ..circuit import Circuit, Gate, GateKind

K = GateKind
CLIFFORD_KINDS = frozenset({K.H, K.S, K.SDG, K.X, K.Y, K.Z, K.CX, K.CY, K.CZ, K.SWAP})


class Tableau:
    """Images of X_i (rows 0..n-1) and Z_i (rows n..2n-1) under conjugation.

    Row bits are stored as boolean arrays ``x``, ``z`` of shape (2n, n) and a
    sign vector ``r``.  Applying a gate G maps every row P to G P G^dagger.
    """

    def __init__(self, n: int):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=bool)
        self.z = np.zeros((2 * n, n), dtype=bool)
        self.r = np.zeros(2 * n, dtype=bool)
        self.x[np.arange(n), np.arange(n)] = True
        self.z[np.arange(n, 2 * n), np.arange(n)] = True

    def copy(self) -> Tableau:
        t = Tableau.__new__(Tableau)
        t.n, t.x, t.z, t.r = self.n, self.x.copy(), self.z.copy(), self.r.copy()
        return t

    def is_identity(self) -> bool:
        eye = np.eye(self.n, dtype=bool)
        zero = np.zeros_like(eye)
        return (np.array_equal(self.x[:self.n], eye) and np.array_equal(self.z[:self.n], zero)
                and np.array_equal(self.x[self.n:], zero) and np.array_equal(self.z[self.n:], eye))

    def h(self, a):
        x, z = self.x[:, a].copy(), self.z[:, a].copy()
        self.r ^= x & z
        self.x[:, a], self.z[:, a] = z, x

    def s(self, a):
        self.r ^= self.x[:, a] & self.z[:, a]
        self.z[:, a] ^= self.x[:, a]

    def sdg(self, a):
        self.r ^= self.x[:, a] & ~self.z[:, a]
        self.z[:, a] ^= self.x[:, a]

    def pauli_x(self, a):
        self.r ^= self.z[:, a]

    def pauli_z(self, a):
        self.r ^= self.x[:, a]

    def pauli_y(self, a):
        self.r ^= self.x[:, a] ^ self.z[:, a]

    def cx(self, c, t):
        xc, zc, xt, zt = self.x[:, c], self.z[:, c], self.x[:, t], self.z[:, t]
        self.r ^= xc & zt & ~(xt ^ zc)
        self.x[:, t] ^= xc
        self.z[:, c] ^= zt

    def cz(self, a, b):
        self.h(b)
        self.cx(a, b)
        self.h(b)

    def cy(self, c, t):
        self.sdg(t)
        self.cx(c, t)
        self.s(t)

    def swap(self, a, b):
        self.x[:, [a, b]] = self.x[:, [b, a]]
        self.z[:, [a, b]] = self.z[:, [b, a]]

    def apply(self, kind: GateKind, qubits):
        _APPLY[kind](self, *qubits)


_APPLY = {K.H: Tableau.h, K.S: Tableau.s, K.SDG: Tableau.sdg, K.X: Tableau.pauli_x,
          K.Y: Tableau.pauli_y, K.Z: Tableau.pauli_z, K.CX: Tableau.cx,
          K.CY: Tableau.cy, K.CZ: Tableau.cz, K.SWAP: Tableau.swap}


def tableau_of(gates, qubit_map: dict[int, int]) -> Tableau:
    t = Tableau(len(qubit_map))
    for g in gates:
        t.apply(g.kind, [qubit_map[q] for q in g.qubits])
    return t


def synthesize(tab: Tableau) -> list[tuple[str, tuple[int, ...]]]:
    """Gate list over {h, s, cx} (in time order, local qubits) for ``tab``.

    Reduces the tableau column by column to a signed identity using h, sdg and
    cx, then returns the inverse of the reduction preceded by the Pauli that
    fixes the signs (z = s s, x = h s s h).
    """
    t = tab.copy()
    n = t.n
    steps: list[tuple[str, tuple[int, ...]]] = []

    def do(name, *qs):
        getattr(t, name)(*qs)
        steps.append((name, qs))

    for i in range(n):
        d, s = i, n + i
        # destabilizer i -> X_i
        if not t.x[d, i]:
            js = [j for j in range(i + 1, n) if t.x[d, j]]
            if js:
                do("cx", js[0], i)
            else:
                js = [j for j in range(i, n) if t.z[d, j]]
                if js[0] != i and not t.x[d, i]:
                    do("h", js[0])
                    do("cx", js[0], i)
                else:
                    do("h", i)
        for j in range(i + 1, n):
            if t.x[d, j]:
                do("cx", i, j)
        if any(t.z[d, j] for j in range(i + 1, n)):
            if not t.z[d, i]:
                do("sdg", i)
            for j in range(i + 1, n):
                if t.z[d, j]:
                    do("cx", j, i)
        if t.z[d, i]:
            do("sdg", i)
        # stabilizer i -> Z_i, keeping X_i fixed
        for j in range(i + 1, n):
            if t.x[s, j] and t.z[s, j]:
                do("sdg", j)
            if t.x[s, j]:
                do("h", j)
            if t.z[s, j]:
                do("cx", j, i)
        if t.x[s, i]:
            do("h", i)
            do("sdg", i)
            do("h", i)

    out: list[tuple[str, tuple[int, ...]]] = []
    for i in range(n):
        if t.r[n + i]:          # Z_i -> -Z_i needs an X_i
            out += [("h", (i,)), ("s", (i,)), ("s", (i,)), ("h", (i,))]
        if t.r[i]:              # X_i -> -X_i needs a Z_i
            out += [("s", (i,)), ("s", (i,))]
    for name, qs in reversed(steps):
        out.append(("s" if name == "sdg" else name, qs))
    return out


def optimize_cliffords(c: Circuit) -> Circuit:
    """Resynthesize each maximal run of consecutive Clifford gates if shorter."""
    out: list[Gate] = []
    segment: list[Gate] = []

    def flush():
        if not segment:
            return
        support = sorted({q for g in segment for q in g.qubits})
        local = {q: k for k, q in enumerate(support)}
        tab = tableau_of(segment, local)
        new = synthesize(tab)
        if len(new) < len(segment):
            out.extend(Gate(K(name), tuple(support[k] for k in qs)) for name, qs in new)
        else:
            out.extend(segment)
        segment.clear()

    for g in c.gates:
        if g.kind in CLIFFORD_KINDS:
            segment.append(g)
        else:
            flush()
            out.append(g)
    flush()
    return c.with_gates(out)
