"""
Readers and writers for the per-stage artifacts in the work directory.
"""

from subgrain.cli.constants.enums import Artifact
from subgrain.core.config import PipelineConfig
from subgrain.core.utils import dump_row, read_artifact, write_jsonl
from subgrain.schema import TranslationRecord, Variant
from subgrain.timedtext import ParallelCorpus, corpus_from_jsonl, corpus_to_jsonl
from subgrain.timeline import Timeline, timeline_from_jsonl, timeline_to_jsonl


def save_corpus(config: PipelineConfig, corpus: ParallelCorpus) -> None:
    write_jsonl(
        config.corpus_path(corpus.language),
        corpus_to_jsonl(corpus),
        artifact=Artifact.CORPUS,
        config_hash=config.corpus_hash(corpus.language),
    )


def load_corpus(config: PipelineConfig, language: str) -> ParallelCorpus:
    rows = read_artifact(
        config.corpus_path(language), Artifact.CORPUS, config.corpus_hash(language)
    )
    return corpus_from_jsonl(
        (dump_row(row) for row in rows), movie_id=config.movie_id, language=language
    )


def save_timeline(config: PipelineConfig, timeline: Timeline) -> None:
    write_jsonl(
        config.timeline_path(),
        timeline_to_jsonl(timeline),
        artifact=Artifact.TIMELINE,
        config_hash=config.timeline_hash(),
    )


def load_timeline(config: PipelineConfig) -> Timeline:
    rows = read_artifact(config.timeline_path(), Artifact.TIMELINE, config.timeline_hash())
    return timeline_from_jsonl(dump_row(row) for row in rows)


def save_translations(
    config: PipelineConfig,
    variant: Variant,
    language: str,
    records: dict[int, TranslationRecord],
) -> None:
    """Writes translation records sorted by segment index."""
    write_jsonl(
        config.translations_path(variant, language),
        (records[idx].model_dump(mode="json") for idx in sorted(records)),
        artifact=Artifact.TRANSLATIONS,
        config_hash=config.translations_hash(variant, language),
    )


def load_translations(
    config: PipelineConfig,
    variant: Variant,
    language: str,
    missing_ok: bool = False,
) -> dict[int, TranslationRecord]:
    """Returns translation records keyed by segment index. `missing_ok` treats a missing file as empty."""
    path = config.translations_path(variant, language)
    if missing_ok and not path.is_file():
        return {}

    rows = read_artifact(path, Artifact.TRANSLATIONS, config.translations_hash(variant, language))
    records = [TranslationRecord.model_validate(row) for row in rows]
    return {record.idx: record for record in records}

