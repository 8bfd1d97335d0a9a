"""Text snapshots of a subarray: ``rows=<r> cols=<c>`` then one 0/1 line per row."""

from pathlib import Path
from typing import Optional, Union

import numpy as np

from .addresses import C0, C1, PORTS
from .faults import FaultModel
from .subarray import FabricError, Subarray


def dump_state(sub: Subarray) -> str:
    """Render every row as seen through its port (complement ports included)."""
    lines = [f"rows={sub.rows} cols={sub.cols}"]
    for r in range(sub.rows):
        lines.append("".join("1" if v else "0" for v in sub.peek_row(r)))
    return "\n".join(lines) + "\n"


def load_state(text: str, fault_model: Optional[FaultModel] = None) -> Subarray:
    """Rebuild a subarray from ``dump_state`` output."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FabricError("empty snapshot")
    try:
        fields = dict(part.split("=") for part in lines[0].split())
        rows, cols = int(fields["rows"]), int(fields["cols"])
    except (KeyError, ValueError):
        raise FabricError(f"bad snapshot header: {lines[0]!r}") from None
    body = lines[1:]
    if len(body) != rows:
        raise FabricError(f"snapshot declares {rows} rows, found {len(body)}")

    sub = Subarray(rows, cols, fault_model)
    for r, line in enumerate(body):
        if len(line) != cols or set(line) - {"0", "1"}:
            raise FabricError(f"row {r}: expected {cols} bits")
        bits = np.frombuffer(line.encode(), dtype=np.uint8) == ord("1")
        if r in (C0, C1):
            if bits.any() != (r == C1) or bits.all() != (r == C1):
                raise FabricError(f"constant row {r} does not hold its constant")
            continue
        if r in PORTS:
            continue
        sub.write_row(r, bits)
    return sub


def save_state(sub: Subarray, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(dump_state(sub))
    return path
