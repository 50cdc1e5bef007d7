"""Deterministic file emission and content-addressed result caching.

Every artifact is written atomically (temp file in the target directory,
then rename) and is byte-reproducible: reals are printed with 17
significant digits, complex values split into re_/im_ columns, dict keys
sorted, no timestamps.  A run is identified by the hash of its
(subcommand, config) pair; cached output bytes are replayed on a hit so
sweeps that share work do not recompute it.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from . import __version__


def format_real(x) -> str:
    return format(float(x), ".17g")


def config_lines(config: dict) -> list[str]:
    """key=value serialization, sorted, one entry per line."""
    out = []
    for key in sorted(config):
        val = config[key]
        if isinstance(val, float):
            val = format_real(val)
        out.append(f"{key}={val}")
    return out


def config_hash(subcommand: str, config: dict) -> str:
    text = subcommand + "\n" + "\n".join(config_lines(config))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def header_block(subcommand: str, config: dict) -> str:
    lines = [f"# dirac-spectra {__version__} {subcommand}"]
    lines += [f"# {line}" for line in config_lines(config)]
    return "\n".join(lines) + "\n"


def render_csv(subcommand: str, config: dict, columns: list[str], rows) -> bytes:
    parts = [header_block(subcommand, config), ",".join(columns) + "\n"]
    for row in rows:
        parts.append(",".join(format_real(x) for x in row) + "\n")
    return "".join(parts).encode()


def render_json(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode()


def write_atomic(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def cache_dir() -> Path | None:
    """DIRAC_SPECTRA_CACHE wins (empty value disables caching); the default
    lives under the user cache directory."""
    env = os.environ.get("DIRAC_SPECTRA_CACHE")
    if env is not None:
        return Path(env) if env else None
    base = os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache"))
    return Path(base) / "dirac-spectra"


def cache_load(key: str) -> dict[str, bytes] | None:
    root = cache_dir()
    if root is None or not (root / key).is_dir():
        return None
    return {p.name: p.read_bytes() for p in sorted((root / key).iterdir())}


def cache_store(key: str, files: dict[str, bytes]) -> None:
    root = cache_dir()
    if root is None:
        return
    for name, data in files.items():
        write_atomic(root / key / name, data)
