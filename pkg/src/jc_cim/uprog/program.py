"""
μProgram containers, op accounting and the listing printer.

A listing has one mnemonic per line:

    AAP D12 B9        # clone D12 into T1 and ~DCC1
    AP B15            # MAJ3 over DCC1, T0, T3
    AP B11 D40        # MAJ3 over T0, T1, DCC0 and copy the result to D40
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Tuple

from ..fabric import MultiRowAddress, OpTally


class OpKind(str, Enum):
    AAP = "AAP"
    AP = "AP"
    # Pinatubo and MAGIC primitives
    AND = "AND"
    OR = "OR"
    NOT = "NOT"
    NOR = "NOR"
    INIT = "INIT"


AMBIT_KINDS = frozenset({OpKind.AAP, OpKind.AP})
PINATUBO_KINDS = frozenset({OpKind.AND, OpKind.OR, OpKind.NOT, OpKind.NOR})
MAGIC_KINDS = frozenset({OpKind.NOR, OpKind.INIT})


@dataclass(frozen=True)
class MicroOp:
    """
    One command.

    Ambit ops use ``src``/``dst``/``target`` addresses. Row-list ops of the
    other backends use ``inputs`` and ``outputs`` (plain row indices).
    """

    kind: OpKind
    src: Optional[MultiRowAddress] = None
    dst: Optional[MultiRowAddress] = None
    target: Optional[MultiRowAddress] = None
    inputs: Tuple[int, ...] = ()
    outputs: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind is OpKind.AP and (self.target is None or self.target.width != 3):
            raise ProgramError(f"AP needs a 3-row target, got {self.target}")
        if self.kind is OpKind.AAP:
            if self.src is None or self.dst is None:
                raise ProgramError("AAP needs a source and a destination")
            if self.src == self.dst:
                raise ProgramError(f"AAP source and destination are both {self.src}")

    @classmethod
    def aap(cls, src: MultiRowAddress, dst: MultiRowAddress) -> "MicroOp":
        return cls(OpKind.AAP, src=src, dst=dst)

    @classmethod
    def ap(cls, target: MultiRowAddress, dst: Optional[MultiRowAddress] = None) -> "MicroOp":
        return cls(OpKind.AP, target=target, dst=dst)

    @classmethod
    def rows(cls, kind: OpKind, inputs: Iterable[int], outputs: Iterable[int]) -> "MicroOp":
        return cls(kind, inputs=tuple(inputs), outputs=tuple(outputs))

    def __str__(self) -> str:
        if self.kind is OpKind.AAP:
            return f"AAP {self.src} {self.dst}"
        if self.kind is OpKind.AP:
            return f"AP {self.target}" + (f" {self.dst}" if self.dst is not None else "")
        ins = ",".join(f"D{r}" for r in self.inputs)
        outs = ",".join(f"D{r}" for r in self.outputs)
        return f"{self.kind.value} {ins} -> {outs}" if ins else f"{self.kind.value} -> {outs}"


@dataclass(frozen=True)
class ProgramMeta:
    purpose: str
    digit: Optional[int] = None
    k: Optional[int] = None
    expected_ops: int = 0
    backend: str = "ambit"


@dataclass(frozen=True)
class MicroProgram:
    """An immutable op sequence whose meta records its expected length."""

    ops: Tuple[MicroOp, ...]
    meta: ProgramMeta = field(default_factory=lambda: ProgramMeta("adhoc"))

    def __post_init__(self):
        if self.meta.expected_ops != len(self.ops):
            raise ProgramError(
                f"{self.meta.purpose}: expected {self.meta.expected_ops} ops, built {len(self.ops)}"
            )

    @classmethod
    def build(cls, ops: Iterable[MicroOp], purpose: str, **meta) -> "MicroProgram":
        ops = tuple(ops)
        return cls(ops, ProgramMeta(purpose, expected_ops=len(ops), **meta))

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def then(self, other: "MicroProgram", purpose: Optional[str] = None) -> "MicroProgram":
        """Concatenate; meta is taken from self unless a purpose is given."""
        meta = self.meta
        ops = self.ops + other.ops
        return MicroProgram(
            ops,
            ProgramMeta(purpose or meta.purpose, meta.digit, meta.k, len(ops), meta.backend),
        )


def count_ops(program: MicroProgram) -> OpTally:
    """Return (aap, ap) tallies; row-list backend ops count as AAP-class commands."""
    ap = sum(1 for op in program.ops if op.kind is OpKind.AP)
    return OpTally(aap=len(program.ops) - ap, ap=ap)


def format_listing(program: MicroProgram, header: bool = True) -> str:
    lines: List[str] = []
    if header:
        m = program.meta
        desc = ", ".join(
            f"{k}={v}" for k, v in (("digit", m.digit), ("k", m.k), ("backend", m.backend)) if v is not None
        )
        lines.append(f"# {m.purpose} ({desc}) ops={len(program)}")
    lines.extend(str(op) for op in program.ops)
    return "\n".join(lines) + "\n"


class ExecutorError(Exception):
    """Base exception for μProgram construction and execution errors."""

    pass


class ProgramError(ExecutorError):
    """Raised on malformed ops, programs or listings."""

    pass
