"""
Rich terminal output: result tables, program listings and counter dumps.
"""

from typing import Any, Dict, List, Optional, Sequence

from rich import box
from rich.align import Align
from rich.panel import Panel
from rich.syntax import Syntax
from rich.table import Table
from rich.text import Text

from .prompt import USING_PROMPT_TOOLKIT, USING_READLINE, console, get_input_method_info


def _cell(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.4g}"
    return "" if v is None else str(v)


def show_rows(rows: Sequence[Dict[str, Any]], fields: List[str], title: str, limit: Optional[int] = None) -> None:
    """Render dict rows as a table; ``limit`` truncates long outputs."""
    table = Table(title=title, box=box.ROUNDED, title_style="bold green")
    for f in fields:
        table.add_column(f, style="cyan" if f in ("mode", "source", "kernel") else "white", justify="right")
    shown = rows if limit is None else rows[:limit]
    for row in shown:
        table.add_row(*(_cell(row.get(f)) for f in fields))
    console.print(table)
    if limit is not None and len(rows) > limit:
        console.print(f"[dim]... {len(rows) - limit} more rows in results.csv[/dim]")


def show_listing(listing: str, title: str = "μProgram") -> None:
    console.print(
        Panel(
            Syntax(listing, "text", theme="monokai", background_color="default", line_numbers=True),
            title=f"[bold cyan]{title}",
            box=box.ROUNDED,
            border_style="cyan",
        )
    )


def show_counters(bank, title: str = "Counters", limit: int = 16) -> None:
    """Per-column digits (MSD first), O_next flags and decoded values."""
    digits = bank.digit_values()
    flags = bank.flag_values()
    values = bank.read_counters()
    table = Table(title=title, box=box.ROUNDED, title_style="bold cyan")
    table.add_column("col", style="dim", justify="right")
    table.add_column("digits (MSD..LSD)", style="white")
    table.add_column("O_next", style="yellow")
    table.add_column("value", style="green", justify="right")
    for col in range(min(bank.C, limit)):
        ds = " ".join("x" if v < 0 else str(int(v)) for v in reversed(digits[:, col]))
        fl = "".join(str(int(f)) for f in reversed(flags[:, col]))
        val = "[red]invalid[/red]" if values[col] is None else str(values[col])
        table.add_row(str(col), ds, fl, val)
    console.print(table)


def show_trace(lines: List[str]) -> None:
    table = Table(title="IARM plan", box=box.SIMPLE, title_style="bold magenta")
    table.add_column("step", style="dim")
    table.add_column("ripples", style="yellow")
    table.add_column("state", style="green", justify="right")
    for line in lines:
        head, _, rest = line.partition(": ")
        ripples, _, state = rest.rpartition("; ")
        table.add_row(head, ripples or "-", state)
    console.print(table)


def show_welcome(title: str = "Johnson-counter fabric shell") -> None:
    info = get_input_method_info()
    style = "green" if USING_PROMPT_TOOLKIT else "yellow" if USING_READLINE else "red"
    console.print(
        Panel(
            Align.center(f"{Text(title, style='bold magenta')}\n\n{Text(info, style=style)}"),
            box=box.DOUBLE,
            padding=(1, 2),
            style="bright_blue",
        )
    )


SHELL_COMMANDS = [
    ("AAP <src> <dst>", "Activate-activate-precharge; end a line with \\ to continue"),
    ("AP <addr> [dst]", "Triple-row activation with optional copy"),
    ("inc <digit> <k>", "Masked k-ary increment of one digit"),
    ("dec <digit> <k>", "Masked k-ary decrement of one digit"),
    ("ripple <digit>", "Propagate a digit's O_next flag"),
    ("resolve", "Ripple every pending flag"),
    ("add <value>", "Accumulate a value into every column under the mask"),
    ("load <v0> <v1> ...", "Host-write counter values"),
    ("read / digits", "Decoded values / per-digit dump"),
    ("emit <k>", "List the k-ary program for digit 0"),
    ("rows / stats", "Row map / command and ripple counts"),
]


def show_commands() -> None:
    table = Table(title="Commands", box=box.ROUNDED, title_style="bold green")
    table.add_column("Command", style="cyan")
    table.add_column("Description", style="white")
    for cmd, desc in SHELL_COMMANDS:
        table.add_row(cmd, desc)
    console.print(table)


def show_history(history: List[str]) -> None:
    if not history:
        console.print("[dim]No commands in history yet.[/dim]")
        return
    table = Table(title="Command History", box=box.ROUNDED, title_style="bold blue")
    table.add_column("#", style="dim", justify="right")
    table.add_column("Command", style="green")
    for i, cmd in enumerate(history[-20:], 1):
        table.add_row(str(i), cmd)
    console.print(table)
