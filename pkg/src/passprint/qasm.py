"""
Strict OpenQASM 2.0 subset reader and writer.

Accepted documents hold the version header, an optional standard include
line (ignored), exactly one ``qreg`` and a list of gate applications drawn
from the circuit vocabulary.  Opaque unitaries have no QASM spelling; they
are written as a placeholder comment plus an entry in a JSON sidecar.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circuit import Circuit, CircuitError, Gate, GateKind


class QasmError(ValueError):
    """Base class of every structured parse/emit failure."""

    category = "qasm"

    def __init__(self, message, line=None, col=None):
        self.line, self.col = line, col
        where = f"line {line}, col {col}: " if line is not None else ""
        super().__init__(where + message)


class QasmSyntaxError(QasmError):
    category = "syntax"


class UnknownGateError(QasmError):
    category = "unknown-gate"


class QubitRangeError(QasmError):
    category = "out-of-range"


class ArityError(QasmError):
    category = "arity"


class UnsupportedGateError(QasmError):
    category = "unsupported"


# --- lexer ---------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|//[^\n]*)
  | (?P<nl>\n)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<str>"[^"\n]*")
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>->|[;,()\[\]+\-*/])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # num, str, id, sym, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise QasmSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            out.append(Token(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


# --- parser --------------------------------------------------------------

class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg, tok=None, cls=QasmSyntaxError):
        tok = tok or self.tok
        raise cls(msg, tok.line, tok.col)

    def take(self, kind, text=None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = repr(text) if text is not None else kind
            got = repr(t.text) if t.kind != "eof" else "end of input"
            self.fail(f"expected {want}, found {got}")
        self.i += 1
        return t

    def accept(self, text) -> bool:
        if self.tok.kind == "sym" and self.tok.text == text:
            self.i += 1
            return True
        return False

    # expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)*
    def expr(self) -> float:
        v = self.term()
        while self.tok.kind == "sym" and self.tok.text in "+-":
            op = self.take("sym").text
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self) -> float:
        v = self.unary()
        while self.tok.kind == "sym" and self.tok.text in "*/":
            op = self.take("sym")
            rhs = self.unary()
            if op.text == "*":
                v *= rhs
            elif rhs == 0:
                self.fail("division by zero", op)
            else:
                v /= rhs
        return v

    def unary(self) -> float:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return float(t.text)
        if t.kind == "id" and t.text == "pi":
            self.i += 1
            return math.pi
        if self.accept("("):
            v = self.expr()
            self.take("sym", ")")
            return v
        self.fail(f"expected an angle expression, found {t.text or 'end of input'!r}")

    def index(self) -> int:
        t = self.take("num")
        if not t.text.isdigit():
            self.fail(f"register index must be a non-negative integer, got {t.text!r}", t)
        return int(t.text)

    def parse(self) -> tuple[int, list]:
        self.take("id", "OPENQASM")
        ver = self.take("num")
        if ver.text not in ("2.0", "2"):
            self.fail(f"unsupported OpenQASM version {ver.text}", ver)
        self.take("sym", ";")
        if self.tok.kind == "id" and self.tok.text == "include":
            self.i += 1
            inc = self.take("str")
            if inc.text != '"qelib1.inc"':
                self.fail(f"only the standard header include is accepted, got {inc.text}", inc)
            self.take("sym", ";")
        self.take("id", "qreg")
        reg = self.take("id").text
        self.take("sym", "[")
        size_tok = self.tok
        size = self.index()
        if size == 0:
            self.fail("register size must be positive", size_tok)
        self.take("sym", "]")
        self.take("sym", ";")
        stmts = []
        while self.tok.kind != "eof":
            stmts.append(self.statement(reg, size))
        return size, stmts

    def statement(self, reg, size):
        name_tok = self.take("id")
        name = name_tok.text
        if name in ("qreg", "creg", "measure", "barrier", "gate", "opaque", "reset", "if", "include"):
            self.fail(f"{name!r} is outside the supported subset", name_tok)
        try:
            kind = GateKind(name)
        except ValueError:
            kind = None
        if kind is None or kind.is_opaque:
            self.fail(f"unknown gate {name!r}", name_tok, UnknownGateError)
        params = []
        if self.accept("("):
            if not self.accept(")"):
                params.append(self.expr())
                while self.accept(","):
                    params.append(self.expr())
                self.take("sym", ")")
        qubits = [self.qubit(reg, size)]
        while self.accept(","):
            qubits.append(self.qubit(reg, size))
        self.take("sym", ";")
        if len(params) != kind.num_params:
            self.fail(f"{name} takes {kind.num_params} parameter(s), got {len(params)}", name_tok, ArityError)
        if len(qubits) != kind.arity:
            self.fail(f"{name} acts on {kind.arity} qubit(s), got {len(qubits)}", name_tok, ArityError)
        if len(set(qubits)) != len(qubits):
            self.fail(f"{name} repeats a qubit", name_tok, ArityError)
        return kind, tuple(qubits), tuple(params)

    def qubit(self, reg, size) -> int:
        t = self.take("id")
        if t.text != reg:
            self.fail(f"unknown register {t.text!r}", t)
        self.take("sym", "[")
        idx_tok = self.tok
        q = self.index()
        self.take("sym", "]")
        if q >= size:
            self.fail(f"qubit {q} out of range for {reg}[{size}]", idx_tok, QubitRangeError)
        return q


def parse_qasm(text: str, name: str | None = None) -> Circuit:
    if not isinstance(text, str):
        raise QasmSyntaxError("QASM input must be text")
    size, stmts = _Parser(text).parse()
    try:
        gates = tuple(Gate(k, q, p) for k, q, p in stmts)
        return Circuit(size, gates, name)
    except CircuitError as exc:  # defensive; the parser checks the same invariants
        raise QasmError(str(exc)) from None


# --- emitter -------------------------------------------------------------

OPAQUE_MARK = "// opaque"


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_qasm(c: Circuit, sidecar: dict | None = None) -> str:
    """Serialize ``c``.  Opaque gates need a ``sidecar`` dict to receive their matrices."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.num_qubits}];"]
    for i, g in enumerate(c.gates):
        qs = ",".join(f"q[{q}]" for q in g.qubits)
        if g.kind.is_opaque:
            if sidecar is None:
                raise UnsupportedGateError(f"gate {i} ({g.kind.value}) needs sidecar emission")
            sidecar[str(i)] = {"kind": g.kind.value, "qubits": list(g.qubits),
                               "matrix": [[[z.real, z.imag] for z in row] for row in g.matrix.tolist()]}
            lines.append(f"{OPAQUE_MARK} {i} {g.kind.value} {qs};")
            continue
        ps = f"({','.join(_fmt(p) for p in g.params)})" if g.params else ""
        lines.append(f"{g.kind.value}{ps} {qs};")
    return "\n".join(lines) + "\n"


def sidecar_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".unitaries.json")


def _opaque_from_sidecar(text, side) -> Circuit:
    base = parse_qasm(text)
    gates = list(base.gates)
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith(OPAQUE_MARK):
            parts = s[len(OPAQUE_MARK):].split()
            if not parts or str(parts[0]) not in side:
                raise QasmSyntaxError("opaque placeholder without sidecar entry", lineno, 1)
            entries.append(side[parts[0]])
    if len(entries) != len(side):
        raise QasmError(f"sidecar has {len(side)} entries for {len(entries)} placeholders")
    # placeholders are comments, so rebuild positions from the sidecar indices
    total = len(gates) + len(entries)
    result = []
    named = iter(gates)
    for i in range(total):
        e = side.get(str(i))
        if e is None:
            result.append(next(named))
            continue
        try:
            m = np.array([[complex(re_, im) for re_, im in row] for row in e["matrix"]])
            kind = GateKind(e["kind"])
            result.append(Gate(kind, tuple(e["qubits"]), (), m))
        except (KeyError, TypeError, ValueError) as exc:
            raise QasmError(f"bad sidecar entry {i}: {exc}") from None
    return Circuit(base.num_qubits, tuple(result))


def read_qasm_file(path) -> Circuit:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    side_file = sidecar_path(path)
    if side_file.exists():
        try:
            side = json.loads(side_file.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise QasmError(f"corrupt sidecar {side_file}: {exc}") from None
        return _opaque_from_sidecar(text, side)
    if OPAQUE_MARK in text:
        raise QasmError(f"opaque placeholder present but {side_file.name} is missing")
    return parse_qasm(text, path.stem)


def write_qasm_file(c: Circuit, path) -> None:
    path = Path(path)
    side: dict = {}
    path.write_text(emit_qasm(c, side), encoding="utf-8")
    side_file = sidecar_path(path)
    if side:
        side_file.write_text(json.dumps(side, indent=1), encoding="utf-8")
    elif side_file.exists():
        side_file.unlink()
