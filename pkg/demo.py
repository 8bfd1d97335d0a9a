#!/usr/bin/env python3
"""
Interactive fabric shell.

Allocates one counter bank on a small subarray and lets you drive it with
raw AAP/AP listings or counter verbs, inspecting digits as you go.

    python demo.py --n 5 --D 3 --cols 8
"""

import argparse
import logging
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / "src"))

from rich.logging import RichHandler  # noqa: E402

from jc_cim.counters import CounterBank, CounterError, CounterLayout, Policy  # noqa: E402
from jc_cim.fabric import C1, D_BASE, FabricError, Subarray  # noqa: E402
from jc_cim.uprog import ExecutorError, format_listing, gen_kary_program  # noqa: E402
from jc_cim.ui import (  # noqa: E402
    ShellPrompt,
    console,
    show_commands,
    show_counters,
    show_history,
    show_listing,
    show_welcome,
)

SHELL_ERRORS = (CounterError, FabricError, ExecutorError, ValueError)


def build_bank(args) -> CounterBank:
    rows = D_BASE + CounterLayout.rows_needed(args.n, args.D, args.signed)
    fabric = Subarray(rows, args.cols)
    return CounterBank.alloc(fabric, args.n, args.D, args.signed, policy=Policy(args.policy))


def show_rows_map(bank: CounterBank) -> None:
    lay = bank.layout
    for i, bits in enumerate(lay.bit_rows):
        console.print(f"digit {i}: bits {', '.join(f'D{r}' for r in bits)}  O_next D{lay.onext_rows[i]}")
    console.print(f"shadow: {', '.join(f'D{r}' for r in lay.shadow_rows)}")
    console.print(f"mask D{lay.mask_row}  aux D{lay.aux_row}" + (f"  O_sign D{lay.osign_row}" if bank.signed else ""))


def handle(bank: CounterBank, cmd: str) -> None:
    """Run one shell line against the bank."""
    words = cmd.split()
    verb = words[0].lower()
    nums = [int(w) for w in words[1:]] if verb not in ("aap", "ap") else []
    if verb in ("aap", "ap"):
        used = bank.executor.execute(cmd)
        console.print(f"[green]✓[/green] {used.aap} AAP, {used.ap} AP")
    elif verb == "inc":
        bank.increment_digit(nums[0], nums[1], C1)
    elif verb == "dec":
        bank.decrement_digit(nums[0], nums[1], C1)
    elif verb == "ripple":
        bank.ripple(nums[0])
    elif verb == "resolve":
        bank.resolve()
    elif verb == "add":
        used = bank.accumulate_value(nums[0])
        console.print(f"[green]✓[/green] {used.total} commands")
    elif verb == "load":
        bank.load_values(nums + [0] * (bank.C - len(nums)))
    elif verb == "read":
        console.print(bank.read_counters())
    elif verb == "digits":
        show_counters(bank)
    elif verb == "emit":
        show_listing(format_listing(gen_kary_program(bank.layout, nums[0], 0)), f"k={nums[0]}")
    elif verb == "rows":
        show_rows_map(bank)
    elif verb == "stats":
        console.print(dict(bank.stats), f"tally: {bank.fabric.tally.aap} AAP, {bank.fabric.tally.ap} AP")
    else:
        console.print(f"[red]unknown command[/red] {verb!r}; try help")


def interactive_mode(bank: CounterBank) -> None:
    prompt = ShellPrompt()
    show_commands()
    while True:
        try:
            cmd = prompt.get_input("jc")
        except KeyboardInterrupt:
            break
        low = cmd.lower()
        if low in ("quit", "exit", "q"):
            break
        if low == "help":
            show_commands()
        elif low == "history":
            show_history(prompt.history)
        elif low == "clear":
            console.clear()
        elif cmd:
            try:
                handle(bank, cmd)
            except (IndexError, *SHELL_ERRORS) as e:
                console.print(f"[red]✗[/red] {type(e).__name__}: {e}")
    console.print("[yellow]bye[/yellow]")


def main() -> None:
    parser = argparse.ArgumentParser(description="Interactive Johnson-counter fabric shell")
    parser.add_argument("--n", type=int, default=5, help="Bits per digit (radix 2n)")
    parser.add_argument("--D", type=int, default=3, help="Digits per counter")
    parser.add_argument("--cols", type=int, default=8, help="Columns (counters)")
    parser.add_argument("--signed", action="store_true", help="Allocate an O_sign row")
    parser.add_argument("--policy", default="full_ripple", choices=[p.value for p in Policy])
    parser.add_argument("--log-level", default="INFO")
    args = parser.parse_args()

    logging.basicConfig(
        level=args.log_level.upper(), format="%(message)s", handlers=[RichHandler(console=console, show_path=False)]
    )
    show_welcome()
    bank = build_bank(args)
    console.print(f"[green]✓[/green] bank n={args.n} D={args.D} capacity={bank.capacity} on {bank.C} columns")
    interactive_mode(bank)


if __name__ == "__main__":
    main()
