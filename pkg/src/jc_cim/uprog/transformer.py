"""
Transformer turning μProgram listing parse trees into MicroOps.

Parsing and address resolution live here; running the ops on a fabric is
the executor's job.
"""

from typing import Any, List

from lark import Token, Transformer

from ..fabric import MultiRowAddress, parse_label
from .program import MicroOp, ProgramError


class UProgTransformer(Transformer):
    """
    Converts an ``uprog.lark`` parse tree into a list of MicroOps.
    """

    def start(self, items: List[Any]) -> List[MicroOp]:
        """Collect instructions in listing order."""
        return [item for item in items if isinstance(item, MicroOp)]

    def aap(self, items: List[Any]) -> MicroOp:
        """Transform ``AAP src dst``."""
        src, dst = items
        if src.width != 1:
            raise ProgramError(f"AAP source {src} activates {src.width} rows")
        return MicroOp.aap(src, dst)

    def ap(self, items: List[Any]) -> MicroOp:
        """Transform ``AP target [dst]``."""
        target = items[0]
        dst = items[1] if len(items) > 1 else None
        return MicroOp.ap(target, dst)

    def b_addr(self, items: List[Token]) -> MultiRowAddress:
        return parse_label(str(items[0]))

    def c_addr(self, items: List[Token]) -> MultiRowAddress:
        return parse_label(str(items[0]))

    def d_addr(self, items: List[Token]) -> MultiRowAddress:
        try:
            return parse_label(str(items[0]))
        except ValueError as e:
            raise ProgramError(str(e)) from None
