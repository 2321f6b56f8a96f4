"""CSV artifact helpers: '#'-comment metadata headers, fixed float format.

Every CSV written here starts with comment lines carrying a schema tag and
arbitrary key=value metadata, followed by a column-header row and data rows.
Floats are printed with nine significant digits so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

SCHEMA_VERSION = "1"


def format_value(x) -> str:
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, float):
        if x != x:  # NaN
            return "NA"
        return f"{x:.9g}"
    if x is None:
        return "NA"
    return str(x)


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def write_csv(path, columns, rows, metadata: dict | None = None,
              comments: list[str] | None = None) -> None:
    """Write rows (iterables matching columns) with a commented header."""
    lines = [f"# schema={SCHEMA_VERSION}"]
    for key, value in (metadata or {}).items():
        lines.append(f"# {key}={format_value(value)}")
    for comment in comments or []:
        lines.append(f"# {comment}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path):
    """Parse a CSV written by write_csv: (metadata, columns, rows of str)."""
    metadata = {}
    columns = None
    rows = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                metadata[key.strip()] = value.strip()
            else:
                metadata.setdefault("comments", []).append(body)
        elif columns is None:
            columns = line.split(",")
        else:
            rows.append(line.split(","))
    return metadata, columns, rows


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True,
                                     default=_json_default) + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def _json_default(obj):
    import numpy as np
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")
