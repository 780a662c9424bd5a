import csv
import json
import logging
import math
import os
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Optional

from src import __version__
from src.config import Config
from src.models.schemas import RunManifest

logger = logging.getLogger(__name__)


def json_safe(value: Any) -> Any:
    """Replaces non-finite floats by 'inf' / '-inf' / 'nan' strings, recursively."""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    return value


class ArtifactRepository:
    """Report, table and manifest files of one run directory."""

    MANIFEST_NAME = "manifest.json"

    def __init__(self, output_dir: Optional[str] = None):
        self.output_dir = output_dir or Config.OUTPUT_DIR
        os.makedirs(self.output_dir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def write_json(self, name: str, payload: Any) -> str:
        path = self.path(name)
        temp_path = f"{path}.tmp"
        with open(temp_path, "w", encoding="utf-8") as file:
            json.dump(json_safe(payload), file, indent=2, sort_keys=True, allow_nan=False)
            file.write("\n")
        os.replace(temp_path, path)
        logger.debug(f"Wrote {path}")
        return path

    def read_json(self, name: str) -> Any:
        with open(self.path(name), "r", encoding="utf-8") as file:
            return json.load(file)

    def write_csv(self, name: str, rows: Iterable[Dict[str, Any]], columns: List[str]) -> str:
        path = self.path(name)
        with open(path, "w", encoding="utf-8", newline="") as file:
            writer = csv.DictWriter(file, fieldnames=columns, extrasaction="ignore")
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
        logger.debug(f"Wrote {path}")
        return path

    def write_manifest(
        self,
        command: str,
        arguments: Dict[str, Any],
        tolerance_overrides: Dict[str, float],
        seed: Optional[int] = None,
    ) -> str:
        manifest = RunManifest(
            command=command,
            arguments=json_safe(arguments),
            tolerance_overrides=tolerance_overrides,
            seed=seed,
            version=__version__,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )
        return self.write_json(self.MANIFEST_NAME, manifest.model_dump(mode="json"))
