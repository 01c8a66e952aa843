"""
The context cache: one JSON line per segment so summaries are built once and reused by translation runs.
"""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel

from subgrain.cli.constants.enums import Artifact
from subgrain.context.builders import AttrContext, GapContext
from subgrain.core.utils import read_artifact, write_jsonl


ContextKind = Literal["attr", "gap"]
VisualContext = AttrContext | GapContext


class ContextRecord(BaseModel):
    """A cached context row: `{"idx", "kind", "context", "prompt_chars"}`."""

    idx: int
    kind: ContextKind
    context: dict
    prompt_chars: int

    @classmethod
    def from_context(cls, idx: int, context: VisualContext) -> "ContextRecord":
        return cls(
            idx=idx,
            kind="attr" if isinstance(context, AttrContext) else "gap",
            context=context.model_dump(mode="json"),
            prompt_chars=context.prompt_chars,
        )

    def to_context(self) -> VisualContext:
        if self.kind == "attr":
            return AttrContext.model_validate(self.context)
        return GapContext.model_validate(self.context)


def load_contexts(path: Path, config_hash: str) -> dict[int, VisualContext]:
    """
    Returns the cached contexts keyed by segment index. A missing file is an empty cache.

    Raises:
        ArtifactMismatchError: the cache was built under a different configuration.
    """
    if not Path(path).is_file():
        return {}

    rows = read_artifact(path, Artifact.CONTEXTS, config_hash)
    records = [ContextRecord.model_validate(row) for row in rows]
    return {record.idx: record.to_context() for record in records}


def save_contexts(path: Path, contexts: dict[int, VisualContext], config_hash: str) -> None:
    """Writes the cache sorted by segment index."""
    rows = [
        ContextRecord.from_context(idx, contexts[idx]).model_dump(mode="json")
        for idx in sorted(contexts)
    ]
    write_jsonl(path, rows, artifact=Artifact.CONTEXTS, config_hash=config_hash)
