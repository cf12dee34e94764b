"""CSV/JSON serialization with reproducibility guarantees.

CSV files carry the resolved run configuration as ``# key = value`` header
lines and contain no timestamps, so identical configs produce bit-identical
files. Floats are written with ``repr``, the shortest round-trip decimal
form. JSON fit summaries are wrapped in an envelope with a schema version
and a timestamp.
"""

from __future__ import annotations

import datetime
import json
from pathlib import Path


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path: Path, columns: dict[str, list], meta: dict[str, object]) -> None:
    """Column-oriented table with # metadata header; '.' decimals, \\n endings."""
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    rows = len(columns[names[0]]) if names else 0
    lines = [f"# {k} = {format_value(v)}" for k, v in meta.items()]
    lines.append(",".join(names))
    for i in range(rows):
        lines.append(",".join(format_value(columns[name][i]) for name in names))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_csv(path: Path) -> tuple[dict[str, list[str]], dict[str, str]]:
    """Inverse of write_csv; values come back as strings."""
    meta: dict[str, str] = {}
    rows: list[list[str]] = []
    header: list[str] | None = None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    columns = {name: [r[i] for r in rows] for i, name in enumerate(header or [])}
    return columns, meta


def write_envelope(path: Path, config: dict, tables: dict) -> None:
    """JSON result envelope: schema version, config snapshot, named tables."""
    path.parent.mkdir(parents=True, exist_ok=True)
    envelope = {
        "schema_version": 1,
        "config": {k: config[k] for k in sorted(config)},
        "produced_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "tables": tables,
    }
    path.write_text(json.dumps(envelope, indent=2, sort_keys=False) + "\n",
                    encoding="utf-8", newline="\n")
