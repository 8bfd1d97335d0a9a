"""Run directories: results/<experiment>/<timestamp>/{config.json, results.csv}."""

import csv
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

from .config import ExperimentConfig

logger = logging.getLogger(__name__)


class ResultWriter:
    """
    Creates one timestamped directory per run and writes its artifacts.

    Args:
        root: Parent directory, ``results`` by default
        experiment: Experiment name, used as the sub-directory
        stamp: Directory name; the current time when None
    """

    def __init__(self, root: Union[str, Path], experiment: str, stamp: Optional[str] = None):
        stamp = stamp or datetime.now().strftime("%Y%m%d-%H%M%S")
        self.path = Path(root) / experiment / stamp
        self.path.mkdir(parents=True, exist_ok=True)
        logger.debug("writing results to %s", self.path)

    def write_config(self, cfg: ExperimentConfig) -> Path:
        out = self.path / "config.json"
        out.write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
        return out

    def write_rows(self, rows: Iterable[Dict[str, Any]], fields: List[str], name: str = "results.csv") -> Path:
        out = self.path / name
        with out.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
        return out

    def write_text(self, name: str, text: str) -> Path:
        out = self.path / name
        out.write_text(text if text.endswith("\n") else text + "\n")
        return out
