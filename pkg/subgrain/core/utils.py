"""
Utility functions for hashing and JSON Lines artifacts.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Iterable

from pydantic import validate_call

from subgrain.exceptions import ArtifactMismatchError, InputNotFoundError


META_KEY = "_meta"


def stable_hash(payload: Any) -> str:
    """
    Returns a short SHA-256 digest of a JSON-serializable payload.

    Keys are sorted so equal payloads always hash equally.

    Parameters:
        payload (Any): the data to hash.

    Returns:
        str: the first 16 hex characters of the digest.
    """
    text = json.dumps(payload, sort_keys=True, ensure_ascii=False, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def file_digest(path: Path) -> str | None:
    """
    Returns a short SHA-256 digest of a file's bytes, or `None` when it does not exist.

    A folder digests the names and sizes of its files, so adding, removing or replacing an
    image changes it.
    """
    path = Path(path)
    if path.is_file():
        return hashlib.sha256(path.read_bytes()).hexdigest()[:16]

    if path.is_dir():
        return stable_hash(
            sorted((item.name, item.stat().st_size) for item in path.iterdir() if item.is_file())
        )

    return None


@validate_call(validate_return=True)
def meta_line(artifact: str, config_hash: str) -> str:
    """The first line of every artifact."""
    return json.dumps({META_KEY: {"artifact": artifact, "config_hash": config_hash}})


def dump_row(row: dict) -> str:
    return json.dumps(row, ensure_ascii=False, sort_keys=True)


def write_jsonl(
    path: Path,
    rows: Iterable[dict | str],
    artifact: str | None = None,
    config_hash: str | None = None,
) -> None:
    """
    Writes rows as UTF-8 JSON Lines, led by a `_meta` line when `artifact` is given.

    Rows may be dicts or pre-serialized JSON strings.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    lines = [meta_line(artifact, config_hash or "")] if artifact else []
    lines.extend(row if isinstance(row, str) else dump_row(row) for row in rows)

    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")


def read_jsonl(path: Path) -> tuple[dict | None, list[dict]]:
    """Returns the `_meta` object (or `None`) and the remaining rows of a JSON Lines file."""
    path = Path(path)
    if not path.is_file():
        raise InputNotFoundError(f"file not found: {path}")

    meta = None
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue

        row = json.loads(line)
        if META_KEY in row:
            meta = row[META_KEY]
        else:
            rows.append(row)

    return meta, rows


def read_artifact(path: Path, artifact: str, config_hash: str) -> list[dict]:
    """
    Reads an artifact and checks it came from the current configuration.

    Raises:
        InputNotFoundError: the artifact does not exist.
        ArtifactMismatchError: the artifact is of another kind or its config hash differs.
    """
    meta, rows = read_jsonl(path)

    if meta is None or meta.get("artifact") != artifact:
        raise ArtifactMismatchError(f"{path} is not a '{artifact}' artifact")

    if meta.get("config_hash") != config_hash:
        raise ArtifactMismatchError(
            f"{path} was produced by a different configuration "
            f"({meta.get('config_hash')} != {config_hash}). Re-run the upstream stage."
        )

    return rows
