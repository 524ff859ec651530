"""Optimization passes and the pass manager that applies a selection of them."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..circuit import Circuit
from .blocks import consolidate_blocks, split_2q_unitaries
from .cancellation import commutative_cancellation, inverse_cancellation, remove_identity_equivalent
from .cliffords import optimize_cliffords
from .single_qubit import optimize_1q_gates
from .templates import template_optimization


class PassId(Enum):
    # declaration order is the canonical application order
    OPTIMIZE_1Q_GATES = "opt1q"
    INVERSE_CANCELLATION = "inverse"
    COMMUTATIVE_CANCELLATION = "commutative"
    REMOVE_IDENTITY_EQUIVALENT = "remove-id"
    CONSOLIDATE_BLOCKS = "consolidate"
    TEMPLATE_OPTIMIZATION = "template"
    SPLIT_2Q_UNITARIES = "split2q"
    OPTIMIZE_CLIFFORDS = "cliffords"

    @property
    def cli_name(self) -> str:
        return self.value

    @property
    def title(self) -> str:
        return _TITLES[self]

    @property
    def is_baseline(self) -> bool:
        return self in BASELINE

    @classmethod
    def parse(cls, name: str) -> PassId:
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(p.value for p in cls)
            raise ValueError(f"unknown pass {name!r}; valid names: {valid}") from None


_TITLES = {
    PassId.OPTIMIZE_1Q_GATES: "Optimize1qGates",
    PassId.INVERSE_CANCELLATION: "InverseCancellation",
    PassId.COMMUTATIVE_CANCELLATION: "CommutativeCancellation",
    PassId.REMOVE_IDENTITY_EQUIVALENT: "RemoveIdentityEquivalent",
    PassId.CONSOLIDATE_BLOCKS: "ConsolidateBlocks",
    PassId.TEMPLATE_OPTIMIZATION: "TemplateOptimization",
    PassId.SPLIT_2Q_UNITARIES: "Split2QUnitaries",
    PassId.OPTIMIZE_CLIFFORDS: "OptimizeCliffords",
}

ALL_PASSES = tuple(PassId)
BASELINE = ALL_PASSES[:6]
MISC = ALL_PASSES[6:]

PASS_FUNCTIONS = {
    PassId.OPTIMIZE_1Q_GATES: optimize_1q_gates,
    PassId.INVERSE_CANCELLATION: inverse_cancellation,
    PassId.COMMUTATIVE_CANCELLATION: commutative_cancellation,
    PassId.REMOVE_IDENTITY_EQUIVALENT: remove_identity_equivalent,
    PassId.CONSOLIDATE_BLOCKS: consolidate_blocks,
    PassId.TEMPLATE_OPTIMIZATION: template_optimization,
    PassId.SPLIT_2Q_UNITARIES: split_2q_unitaries,
    PassId.OPTIMIZE_CLIFFORDS: optimize_cliffords,
}


@dataclass(frozen=True)
class PassSelection:
    baseline: frozenset = frozenset()
    misc: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "baseline", frozenset(self.baseline))
        object.__setattr__(self, "misc", frozenset(self.misc))
        if not self.baseline:
            raise ValueError("a pass selection needs at least one baseline pass")
        if not self.baseline <= set(BASELINE):
            raise ValueError("baseline selection contains a miscellaneous pass")
        if not self.misc <= set(MISC):
            raise ValueError("misc selection contains a baseline pass")

    @property
    def ordered(self) -> list[PassId]:
        chosen = self.baseline | self.misc
        return [p for p in ALL_PASSES if p in chosen]


def run_passes(c: Circuit, passes) -> Circuit:
    """Apply each given pass once, in canonical order, ignoring duplicates."""
    chosen = set(passes)
    for p in ALL_PASSES:
        if p in chosen:
            c = PASS_FUNCTIONS[p](c)
    return c


def apply_passes(c: Circuit, sel: PassSelection) -> Circuit:
    return run_passes(c, sel.ordered)


__all__ = [
    "PassId", "PassSelection", "ALL_PASSES", "BASELINE", "MISC", "PASS_FUNCTIONS",
    "apply_passes", "run_passes", "optimize_1q_gates", "inverse_cancellation",
    "commutative_cancellation", "remove_identity_equivalent", "consolidate_blocks",
    "template_optimization", "split_2q_unitaries", "optimize_cliffords",
]
