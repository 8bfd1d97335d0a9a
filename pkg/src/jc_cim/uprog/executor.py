"""
μProgram executor: grammar loading, listing parsing and running programs
on a subarray.
"""

import logging
from pathlib import Path
from typing import List, Optional

from lark import Lark
from lark.exceptions import LarkError, VisitError

from ..fabric import FabricError, OpTally, Subarray
from .program import AMBIT_KINDS, ExecutorError, MicroProgram, OpKind, ProgramError
from .transformer import UProgTransformer

logger = logging.getLogger(__name__)


class ProgramExecutor:
    """
    Runs Ambit μPrograms, given either as MicroProgram objects or as text
    listings, against one Subarray.
    """

    def __init__(self, fabric: Subarray, grammar_file: Optional[str] = None):
        """
        Initialize executor with a fabric.

        Args:
            fabric: Subarray the programs run on
            grammar_file: Path to .lark grammar file (optional)
        """
        self.fabric = fabric
        self.grammar_file = self._resolve_grammar_file(grammar_file)
        self.parser = self._load_parser()
        self.transformer = UProgTransformer()

    def _resolve_grammar_file(self, grammar_file: Optional[str] = None) -> Path:
        if grammar_file is not None:
            return Path(grammar_file)

        # Default to uprog.lark in the grammars directory
        grammar_path = Path(__file__).parent.parent / "grammars" / "uprog.lark"
        if not grammar_path.exists():
            raise GrammarError(f"Grammar file not found: {grammar_path}")
        return grammar_path

    def _load_parser(self) -> Lark:
        try:
            grammar_content = self.grammar_file.read_text()
        except FileNotFoundError:
            raise GrammarError(f"Grammar file not found: {self.grammar_file}") from None
        try:
            return Lark(grammar_content, parser="lalr")
        except LarkError as e:
            raise GrammarError(f"Error loading grammar: {e}") from e

    def parse(self, listing: str, purpose: str = "listing") -> MicroProgram:
        """
        Parse a listing into a MicroProgram without running it.

        Args:
            listing: One AAP/AP command per line

        Returns:
            The parsed program
        """
        try:
            tree = self.parser.parse(listing)
            ops = self.transformer.transform(tree)
        except VisitError as e:
            raise ProgramError(f"bad listing: {e.orig_exc}") from e.orig_exc
        except LarkError as e:
            raise ProgramError(f"bad listing: {e}") from e
        return MicroProgram.build(ops, purpose)

    def run(self, program: MicroProgram) -> OpTally:
        """
        Execute a program op by op.

        Returns:
            The AAP/AP counts the program consumed
        """
        before = self.fabric.tally.copy()
        for index, op in enumerate(program.ops):
            if op.kind not in AMBIT_KINDS:
                raise ProgramError(f"{op.kind.value} is not an Ambit command")
            try:
                if op.kind is OpKind.AAP:
                    self.fabric.aap(op.src, op.dst)
                else:
                    self.fabric.ap(op.target, op.dst)
            except FabricError as e:
                raise ProgramError(f"{program.meta.purpose} op {index} ({op}): {e}") from e
        used = self.fabric.tally - before
        logger.debug("ran %s: %d AAP, %d AP", program.meta.purpose, used.aap, used.ap)
        return used

    def execute(self, listing: str) -> OpTally:
        """Parse and run a listing."""
        return self.run(self.parse(listing))

    def execute_batch(self, listings: List[str]) -> List[OpTally]:
        return [self.execute(text) for text in listings]

    def validate_listing(self, listing: str) -> bool:
        """
        Validate a listing without running it.

        Returns:
            True if it parses into legal ops, False otherwise
        """
        try:
            self.parse(listing)
            return True
        except ExecutorError:
            return False

    def get_parse_tree(self, listing: str):
        """Return the Lark tree for a listing."""
        return self.parser.parse(listing)

    def reload_grammar(self):
        """Reload the grammar file and recreate the parser."""
        self.parser = self._load_parser()

    @property
    def grammar_path(self) -> str:
        """Get the path to the currently loaded grammar file."""
        return str(self.grammar_file)


class GrammarError(ExecutorError):
    """Exception raised when there are grammar-related errors."""

    pass
