import json

from subgrain.backends import get_backend
from subgrain.cli.artifacts import save_corpus, save_timeline
from subgrain.cli.commands.base import PipelineStage
from subgrain.cli.constants import StageSuccessCodes
from subgrain.cli.constants.display import corpus_stats_table, frame_stats_table
from subgrain.timedtext import (
    CorpusStats,
    SubtitleSegment,
    corpus_stats,
    filter_segments,
    normalize,
    pair,
    read_srt,
)
from subgrain.timeline import (
    Timeline,
    apply_drift,
    count_frames_in_spans,
    load_frames,
    sampled_frame_total,
)


class Prepare(PipelineStage):
    """Builds the parallel corpora and the frame timeline for the `prepare` command."""

    success_code = StageSuccessCodes.PREPARED

    def _segments(self, path) -> list[SubtitleSegment]:
        """Reads, normalizes and filters one subtitle file."""
        bounds = self.config.filter
        segments = [normalize(seg) for seg in read_srt(path)]
        return filter_segments(segments, bounds.min_words, bounds.max_words)

    def build_corpora(self) -> tuple[list[SubtitleSegment], dict[str, CorpusStats]]:
        source = self._segments(self.config.paths.srt_source)

        stats = {}
        for language in self.config.languages:
            reference = self._segments(self.config.paths.srt_reference_per_language[language])
            corpus = pair(source, reference, movie_id=self.config.movie_id, language=language)

            save_corpus(self.config, corpus)
            stats[language] = corpus_stats(corpus)
            self.logger.stdout.info(
                f"{language}: {stats[language].pairs} pairs written to {self.config.corpus_path(language)}"
            )

        return source, stats

    def build_timeline(self) -> Timeline:
        describe = self.config.backends.describe
        describer = get_backend(describe) if describe is not None else None

        timeline = load_frames(self.config.paths.frames, describer)
        if self.config.drift is not None:
            timeline = apply_drift(timeline, self.config.drift, seed=self.config.seed)
            self.logger.stdout.info(f"applied drift {self.config.drift.model_dump()}")

        save_timeline(self.config, timeline)
        return timeline

    def run(self) -> None:
        source, stats = self.build_corpora()
        timeline = self.build_timeline()

        in_spans = count_frames_in_spans(self.config.fps, [seg.span for seg in source])
        total = (
            sampled_frame_total(self.config.fps, self.config.duration_ms)
            if self.config.duration_ms is not None
            else None
        )

        summary = {
            "movie_id": self.config.movie_id,
            "languages": {lang: row.model_dump() for lang, row in stats.items()},
            "frames_loaded": len(timeline.frames),
            "frames_in_spans": in_spans,
            "frames_total": total,
            "duration_ms": self.config.duration_ms,
        }
        self.config.stats_path().write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

        self.show(corpus_stats_table(self.config.movie_id, stats))
        self.show(
            frame_stats_table(
                self.config.movie_id,
                self.config.duration_ms,
                len(timeline.frames),
                in_spans,
                total,
            )
        )
        self.complete()
