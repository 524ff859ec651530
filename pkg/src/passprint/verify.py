"""Oracle harness: check that passes preserve the circuit unitary up to global phase."""
from __future__ import annotations

from dataclasses import dataclass

from .passes import ALL_PASSES, PASS_FUNCTIONS, PassId
from .randgen import GenSpec, make_rng, random_circuit
from .sim import unitary_deviation

DEFAULT_TOL = 1e-9
# tableau resynthesis goes through many more floating-point products
CLIFFORD_TOL = 1e-6


def tolerance_for(pid: PassId) -> float:
    return CLIFFORD_TOL if pid is PassId.OPTIMIZE_CLIFFORDS else DEFAULT_TOL


@dataclass
class VerifyResult:
    pass_id: PassId
    trials: int
    failures: int
    max_deviation: float
    tolerance: float
    fired: int  # trials where the pass changed the circuit
    failed_seeds: list

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {"pass": self.pass_id.cli_name, "trials": self.trials, "failures": self.failures,
                "max_deviation": self.max_deviation, "tolerance": self.tolerance,
                "fired": self.fired, "failed_seeds": self.failed_seeds}


def trial_circuits(trials, q_min, q_max, depth, seed):
    """Deterministic trial circuits; trial ``i`` depends only on (seed, i)."""
    for i in range(trials):
        rng = make_rng(seed, i)
        nq = int(rng.integers(q_min, q_max + 1))
        yield random_circuit(GenSpec(nq, depth, int(rng.integers(0, 2 ** 63))))


def verify_pass(pid: PassId, trials=200, q_min=4, q_max=6, depth=20, seed=0,
                circuits=None) -> VerifyResult:
    fn = PASS_FUNCTIONS[pid]
    tol = tolerance_for(pid)
    circuits = circuits if circuits is not None else trial_circuits(trials, q_min, q_max, depth, seed)
    worst, failures, fired, bad = 0.0, 0, 0, []
    n = 0
    for i, c in enumerate(circuits):
        out = fn(c)
        fired += out.gates != c.gates
        dev = unitary_deviation(c, out)
        worst = max(worst, dev)
        if not dev < tol:
            failures += 1
            bad.append(i)
        n += 1
    return VerifyResult(pid, n, failures, worst, tol, fired, bad)


def verify_all(trials=200, q_min=4, q_max=6, depth=20, seed=0, passes=ALL_PASSES):
    circuits = list(trial_circuits(trials, q_min, q_max, depth, seed))
    return [verify_pass(p, circuits=circuits) for p in passes]
