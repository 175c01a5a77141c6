"""Deterministic result files and run manifests.

Every CLI run writes its data files plus one manifest JSON recording the
command, the resolved parameters, the seed, and a digest per output file.
Data files are byte-reproducible except for one timestamp header line in
CSV outputs; digests skip that line, so replaying a manifest must
reproduce every digest exactly.
"""

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

TIMESTAMP_PREFIX = "# generated "


def format_float(x) -> str:
    """17 significant digits: enough to round-trip any 64-bit float."""
    if x is None:
        return ""
    return f"{float(x):.17g}"


def write_csv(path, columns, rows, timestamp: bool = True) -> None:
    """Write rows of dicts as CSV with an optional timestamp header line.

    Floats are serialized with 17 significant digits; None becomes an
    empty cell. The timestamp line is the only non-reproducible byte in
    the file and is excluded from digests.
    """
    path = Path(path)
    lines = []
    if timestamp:
        stamp = datetime.now(timezone.utc).isoformat()
        lines.append(f"{TIMESTAMP_PREFIX}{stamp}")
    lines.append(",".join(columns))
    for row in rows:
        cells = []
        for col in columns:
            value = row[col]
            if value is None:
                cells.append("")
            elif isinstance(value, float):
                cells.append(format_float(value))
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def write_json(path, payload) -> None:
    """Deterministic JSON data file (no timestamps inside)."""
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def file_digest(path) -> str:
    """SHA-256 of the file content, skipping a leading timestamp line."""
    data = Path(path).read_bytes()
    if data.startswith(TIMESTAMP_PREFIX.encode()):
        newline = data.find(b"\n")
        if newline >= 0:
            data = data[newline + 1:]
    return "sha256:" + hashlib.sha256(data).hexdigest()


def strip_timestamp(path) -> bytes:
    """File bytes with the timestamp header line removed, for comparisons."""
    data = Path(path).read_bytes()
    if data.startswith(TIMESTAMP_PREFIX.encode()):
        newline = data.find(b"\n")
        if newline >= 0:
            data = data[newline + 1:]
    return data


@dataclass
class RunManifest:
    """Reproducibility record of one CLI run."""

    command: str
    parameters: dict
    seed: int
    artifact_version: str
    duration_seconds: float
    outputs: dict = field(default_factory=dict)
    conventions: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "artifact_version": self.artifact_version,
            "duration_seconds": self.duration_seconds,
            "outputs": self.outputs,
            "conventions": self.conventions,
        }

    def write(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @staticmethod
    def load(path) -> "RunManifest":
        raw = json.loads(Path(path).read_text())
        return RunManifest(
            command=raw["command"],
            parameters=raw["parameters"],
            seed=raw["seed"],
            artifact_version=raw["artifact_version"],
            duration_seconds=raw["duration_seconds"],
            outputs=raw["outputs"],
            conventions=raw.get("conventions", {}),
        )


def manifest_path(out_path) -> Path:
    return Path(str(out_path) + ".manifest.json")
