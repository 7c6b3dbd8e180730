import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialise {type(value).__name__} to JSON")


def atomic_write_text(path: Path, text: str) -> Path:
    """Write through a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def dumps_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=_jsonable) + "\n"


def write_json(path: Path, data) -> Path:
    return atomic_write_text(path, dumps_json(data))


def write_csv(path: Path, header, rows) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([float(v) if isinstance(v, np.floating) else v for v in row])
    return atomic_write_text(path, buffer.getvalue())


def sha256_of(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir: Path, command: str, parameters: dict, outputs: list[Path]) -> Path:
    """Resolved parameters plus a checksum of every file the run wrote."""
    out_dir = Path(out_dir)
    files = {}
    for p in sorted(Path(p) for p in outputs):
        key = p.relative_to(out_dir) if p.is_relative_to(out_dir) else p
        files[key.as_posix()] = sha256_of(p)
    manifest = {"command": command, "parameters": parameters, "outputs": files}
    return write_json(out_dir / "manifest.json", manifest)
