"""Reproducibility plumbing: atomic output files and run manifests.

A manifest records everything needed to re-execute a run bit-exactly —
command, configuration, seed, input provenance, compute backend — plus the
SHA-256 of every output file, and deliberately no timestamps. Outputs are
staged to temp files and renamed on success, so a failed run leaves no
partial files behind.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

MANIFEST_NAME = "manifest.json"


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def atomic_write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2) + "\n")


class OutputSet:
    """All-or-nothing collection of output files.

    Writers target staging paths from ``stage``; ``commit`` renames
    everything into place and returns final paths, ``abort`` removes the
    staged files. Either way the directory never holds a half-written run.
    """

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self._pending: list[tuple[Path, Path]] = []

    def stage(self, name: str) -> Path:
        final = self.out_dir / name
        tmp = self.out_dir / (name + ".part")
        self._pending.append((tmp, final))
        return tmp

    def commit(self) -> dict[str, Path]:
        done = {}
        for tmp, final in self._pending:
            os.replace(tmp, final)
            done[final.name] = final
        self._pending.clear()
        return done

    def abort(self) -> None:
        for tmp, _ in self._pending:
            tmp.unlink(missing_ok=True)
        self._pending.clear()


def write_manifest(out_dir, run: dict, output_paths: dict[str, Path]) -> Path:
    """Record the run description plus a hash of every produced file."""
    from specamp import __version__
    from specamp import backend

    manifest = {
        "tool": "specamp",
        "version": __version__,
        "backend": backend.active_name(),
        "run": run,
        "outputs": {name: sha256_file(p) for name, p in sorted(output_paths.items())},
    }
    path = Path(out_dir) / MANIFEST_NAME
    atomic_write_json(path, manifest)
    return path


def load_manifest(path) -> dict:
    with open(path, encoding="utf-8") as f:
        manifest = json.load(f)
    for key in ("tool", "version", "backend", "run", "outputs"):
        if key not in manifest:
            raise ValueError(f"{path}: not a run manifest (missing {key!r})")
    if manifest["tool"] != "specamp":
        raise ValueError(f"{path}: manifest written by {manifest['tool']!r}, not specamp")
    return manifest


def compare_outputs(manifest: dict, out_dir) -> list[str]:
    """Names of recorded outputs that are missing or differ by hash."""
    out_dir = Path(out_dir)
    bad = []
    for name, digest in manifest["outputs"].items():
        p = out_dir / name
        if not p.exists() or sha256_file(p) != digest:
            bad.append(name)
    return bad
