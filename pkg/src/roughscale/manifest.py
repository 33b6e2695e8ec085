"""Run manifests: enough resolved state to reproduce a command bit-exactly.

Every CLI command writes exactly one ``manifest.json`` into its output
directory holding the command name, the fully resolved configuration, the
seeds in play, the tool version, digests of any input files, and a creation
timestamp. Re-running from the manifest regenerates all other outputs
byte-identically (the manifest itself differs only in its timestamp).
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from pathlib import Path

from . import __version__

MANIFEST_NAME = "manifest.json"


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(command: str, config: dict, seeds: dict, inputs: dict | None = None) -> dict:
    return {
        "command": command,
        "config": config,
        "seeds": seeds,
        "version": __version__,
        "inputs": {name: file_digest(p) for name, p in (inputs or {}).items()},
        "input_paths": {name: str(p) for name, p in (inputs or {}).items()},
        "created_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }


def write_manifest(manifest: dict, out_dir) -> Path:
    path = Path(out_dir) / MANIFEST_NAME
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_manifest(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
