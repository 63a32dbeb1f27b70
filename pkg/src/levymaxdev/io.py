"""Deterministic CSV / JSON output stamped with a configuration hash."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

HASH_PREFIX = "# config_sha256: "


def config_hash(command: str, config: dict, seed: int) -> str:
    """sha256 of the canonical JSON of (command, config, seed)."""
    blob = json.dumps({"command": command, "config": config, "seed": int(seed)},
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path, columns: dict, config_hash: str | None = None) -> Path:
    """Write equal-length columns; floats use repr so reruns are byte-identical."""
    path = Path(path)
    names = list(columns)
    cols = [np.asarray(columns[k]) for k in names]
    if len({c.shape[0] for c in cols}) > 1:
        raise ValueError("columns differ in length")
    lines = [HASH_PREFIX + config_hash] if config_hash else []
    lines.append(",".join(names))
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def write_json(path, payload: dict, config_hash: str | None = None) -> Path:
    path = Path(path)
    body = dict(_plain(payload))
    if config_hash:
        body["config_sha256"] = config_hash
    path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")
    return path
