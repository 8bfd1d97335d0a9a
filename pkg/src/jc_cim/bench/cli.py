"""
``jc-cim`` command line: one verb per experiment.

    jc-cim opcount --config sweep.json
    jc-cim faults --workers 4
    jc-cim kernel --config gemm.json --dump-counters
    jc-cim trace-iarm
"""

import argparse
import logging
import sys
from dataclasses import asdict
from typing import List, Optional

from rich.logging import RichHandler

from ..backends import BackendKind, BackendRows, gen_increment
from ..codec import CodecError
from ..counters import CounterError, CounterLayout
from ..fabric import D_BASE, FabricError, Subarray, save_state
from ..shield import RATE_FIELDS, ShieldError
from ..tensor import TensorError
from ..ui import console, show_counters, show_listing, show_rows, show_trace
from ..uprog import ExecutorError, format_listing
from .config import BACKENDS, EXPERIMENTS, BenchError, ExperimentConfig
from .results import ResultWriter
from .sweeps import (
    KERNEL_FIELDS,
    OPCOUNT_FIELDS,
    run_fault_sweep,
    run_iarm_trace,
    run_kernel,
    run_opcount_sweep,
)

logger = logging.getLogger("jc_cim")

FAILURES = (BenchError, CounterError, CodecError, FabricError, ExecutorError, ShieldError, TensorError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jc-cim", description="Johnson-counter CIM experiments")
    parser.add_argument("experiment", choices=EXPERIMENTS, help="Experiment to run")
    parser.add_argument("--config", help="JSON experiment configuration")
    parser.add_argument("--backend", choices=BACKENDS, help="Primitive set (default: ambit)")
    parser.add_argument("--seed", type=int, help="Seed for inputs and fault injection")
    parser.add_argument("--out-dir", default="results", help="Results root (default: results)")
    parser.add_argument("--emit-uprog", type=int, metavar="K", help="Also write the k-ary program for step K")
    parser.add_argument("--dump-counters", action="store_true", help="Write the final counter dump (kernel)")
    parser.add_argument("--dump-state", action="store_true", help="Write the final fabric snapshot (kernel)")
    parser.add_argument("--no-oracle", action="store_true", help="Warn instead of failing on oracle mismatches")
    parser.add_argument("--workers", type=int, help="Processes for Monte Carlo fault runs")
    parser.add_argument(
        "--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Log verbosity"
    )
    return parser


def setup_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=True, show_path=False)],
        force=True,
    )


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    return cfg.override(
        experiment=args.experiment,
        backend=args.backend,
        seed=args.seed,
        workers=args.workers,
        oracle=False if args.no_oracle else None,
    )


def emit_uprog(cfg: ExperimentConfig, k: int, writer: ResultWriter) -> str:
    """Listing of one masked k-ary update of digit 0 on the configured backend."""
    backend = BackendKind(cfg.backend)
    rows = D_BASE + CounterLayout.rows_needed(cfg.n, 1, False) + 3 * cfg.n + 5
    fabric = Subarray(rows, 1)
    layout = CounterLayout.allocate(fabric, cfg.n, 1)
    scratch = None if backend is BackendKind.AMBIT else BackendRows.allocate(fabric, cfg.n)
    listing = format_listing(gen_increment(backend, layout, k, 0, scratch))
    writer.write_text(f"uprog_{backend.value}_k{k}.txt", listing)
    return listing


def run(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    writer = ResultWriter(args.out_dir, cfg.experiment)
    writer.write_config(cfg)

    if args.emit_uprog is not None:
        show_listing(emit_uprog(cfg, args.emit_uprog, writer), f"k={args.emit_uprog} on {cfg.backend}")

    if cfg.experiment == "opcount":
        rows = [r.as_dict() for r in run_opcount_sweep(cfg, progress=True)]
        writer.write_rows(rows, OPCOUNT_FIELDS)
        show_rows(rows, OPCOUNT_FIELDS, "Commands per input")
    elif cfg.experiment == "faults":
        rows = [asdict(r) for r in run_fault_sweep(cfg)]
        writer.write_rows(rows, RATE_FIELDS)
        show_rows(rows, RATE_FIELDS, "Protection scheme rates")
    elif cfg.experiment == "kernel":
        report, engine = run_kernel(cfg)
        writer.write_rows(report.rows(), KERNEL_FIELDS)
        show_rows(report.rows(), KERNEL_FIELDS, f"{report.kernel} ({report.tally.total} commands)", limit=32)
        bank = engine.last_bank
        if args.dump_counters and bank is not None:
            writer.write_text("counters.csv", bank.dump_csv())
            show_counters(bank)
        if args.dump_state and bank is not None:
            save_state(bank.fabric, writer.path / "state.txt")
    else:
        lines = run_iarm_trace(cfg)
        writer.write_text("trace.txt", "\n".join(lines))
        show_trace(lines)

    console.print(f"[green]✓[/green] results in [cyan]{writer.path}[/cyan]")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        return run(args)
    except FAILURES as e:
        logger.error("%s: %s", type(e).__name__, e)
        return 1
    except KeyboardInterrupt:
        logger.warning("interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
