import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from passprint.circuit import Circuit, Gate, GateKind, unitary_gate
from passprint.qasm import (ArityError, QasmError, QasmSyntaxError, QubitRangeError,
                            UnknownGateError, UnsupportedGateError, emit_qasm, parse_qasm,
                            read_qasm_file, sidecar_path, tokenize, write_qasm_file)
from passprint.randgen import GenSpec, random_circuit

HEAD = "OPENQASM 2.0; qreg q[2];"


def test_basic_parse():
    c = parse_qasm("OPENQASM 2.0; qreg q[2]; h q[0]; cx q[0],q[1];")
    assert c.num_qubits == 2
    assert c.gates == (Gate(GateKind.H, (0,)), Gate(GateKind.CX, (0, 1)))


def test_pi_expression():
    c = parse_qasm('OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[1];\nrz(pi/2) q[0];')
    assert c.gates[0].params == (np.pi / 2,)


def test_expression_precedence():
    c = parse_qasm("OPENQASM 2.0; qreg q[1]; u3(-pi/2*2+1, 2*(1+1), -(-3)/4) q[0];")
    assert c.gates[0].params == (-np.pi + 1, 4.0, 0.75)


@pytest.mark.parametrize("text, err", [
    (HEAD + " h q[3];", QubitRangeError),
    (HEAD + " foo q[0];", UnknownGateError),
    (HEAD + " cx q[0];", ArityError),
    (HEAD + " rz q[0];", ArityError),
    (HEAD + " h(0.1) q[0];", ArityError),
    (HEAD + " cx q[1],q[1];", ArityError),
    (HEAD + " h q[0]", QasmSyntaxError),
    (HEAD + " measure q[0];", QasmSyntaxError),
    ("OPENQASM 3.0; qreg q[2];", QasmSyntaxError),
    ("qreg q[2];", QasmSyntaxError),
    (HEAD + " qreg r[2];", QasmSyntaxError),
    (HEAD + " h r[0];", QasmSyntaxError),
    (HEAD + " rz(1/0) q[0];", QasmSyntaxError),
    (HEAD + " h q[0]; $", QasmSyntaxError),
    ('OPENQASM 2.0; include "other.inc"; qreg q[1];', QasmSyntaxError),
])
def test_error_categories(text, err):
    with pytest.raises(err) as info:
        parse_qasm(text)
    assert isinstance(info.value, QasmError)


def test_syntax_error_position():
    with pytest.raises(QasmSyntaxError) as info:
        parse_qasm("OPENQASM 2.0;\nqreg q[2];\nh q[0]\ncx q[0],q[1];")
    assert (info.value.line, info.value.col) == (4, 1)


def test_roundtrip_examples():
    c = Circuit(2, (Gate(GateKind.H, (0,)), Gate(GateKind.CX, (0, 1))))
    assert parse_qasm(emit_qasm(c)) == c
    u = Circuit(1, (Gate(GateKind.U3, (0,), (0.1, 0.2, 0.3)),))
    back = parse_qasm(emit_qasm(u))
    assert np.max(np.abs(np.subtract(back.gates[0].params, (0.1, 0.2, 0.3)))) <= 1e-15


def test_opaque_requires_sidecar():
    c = Circuit(2, (unitary_gate(np.eye(4), 0, 1),))
    with pytest.raises(UnsupportedGateError):
        emit_qasm(c)


def test_sidecar_file_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    c = Circuit(3, (Gate(GateKind.H, (0,)), unitary_gate(q, 2, 1), Gate(GateKind.CX, (0, 2))))
    path = tmp_path / "pair.qasm"
    write_qasm_file(c, path)
    side = json.loads(sidecar_path(path).read_text())
    assert list(side) == ["1"]
    back = read_qasm_file(path)
    assert back.gates == c.gates and np.array_equal(back.gates[1].matrix, q)


def test_missing_sidecar_is_an_error(tmp_path):
    c = Circuit(2, (unitary_gate(np.eye(4), 0, 1),))
    path = tmp_path / "a.qasm"
    write_qasm_file(c, path)
    sidecar_path(path).unlink()
    with pytest.raises(QasmError):
        read_qasm_file(path)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 8), st.integers(1, 12), st.integers(0, 2 ** 32))
def test_roundtrip_property(n, d, seed):
    c = random_circuit(GenSpec(n, d, seed))
    assert parse_qasm(emit_qasm(c)) == c


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=80))
def test_arbitrary_text_never_crashes(text):
    try:
        parse_qasm(HEAD + text)
    except QasmError:
        pass


def test_token_mutations_give_structured_errors():
    base = emit_qasm(random_circuit(GenSpec(3, 6, seed=1)))
    toks = [t.text for t in tokenize(base) if t.kind != "eof"]
    rng = random.Random(0)
    for _ in range(500):
        t = list(toks)
        j = rng.randrange(len(t))
        if rng.random() < 0.5:
            del t[j]
        else:
            t[j] = rng.choice(toks + ["@", "]]", "qq", "-", "*", "1.5.2"])
        try:
            parse_qasm(" ".join(t))
        except QasmError:
            pass
