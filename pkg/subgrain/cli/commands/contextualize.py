from concurrent.futures import ThreadPoolExecutor, as_completed

from rich.progress import track

from subgrain.backends import get_backend
from subgrain.cli.artifacts import load_corpus, load_timeline
from subgrain.cli.commands.base import PipelineStage
from subgrain.cli.constants import StageSuccessCodes
from subgrain.context.builders import build_attr_context, build_gap_context
from subgrain.context.cache import VisualContext, load_contexts, save_contexts
from subgrain.core.config import PipelineConfig
from subgrain.exceptions import BackendError, StageIncompleteError
from subgrain.schema import Method
from subgrain.timedtext import SubtitleSegment
from subgrain.timeline import Timeline


class Contextualize(PipelineStage):
    """Builds and caches one visual context per segment for the `contextualize` command."""

    success_code = StageSuccessCodes.CONTEXTUALIZED

    def __init__(
        self,
        config: PipelineConfig,
        method: Method,
        no_output: bool = False,
        test_logging: bool = False,
    ) -> None:
        super().__init__(config, no_output=no_output, test_logging=test_logging)
        self.method = Method(method)
        self.summarizer = get_backend(config.backends.summarize)

    def _build(
        self,
        timeline: Timeline,
        prev: SubtitleSegment | None,
        cur: SubtitleSegment,
        language: str,
    ) -> VisualContext:
        if self.method == Method.ATTR_VC:
            return build_attr_context(
                timeline,
                cur,
                self.config.language_name(language),
                self.summarizer,
                half_width_ms=self.config.window_half_ms,
                duration_ms=self.config.duration_ms,
            )
        return build_gap_context(timeline, prev, cur, self.summarizer)

    def contextualize_language(self, timeline: Timeline, language: str) -> list[int]:
        """Fills the context cache for one language. Returns the indices that failed."""
        corpus = load_corpus(self.config, language)
        path = self.config.contexts_path(self.method, language)
        config_hash = self.config.contexts_hash(self.method, language)

        contexts = load_contexts(path, config_hash)
        sources = corpus.sources
        todo = [
            (sources[i - 1] if i > 0 else None, seg)
            for i, seg in enumerate(sources)
            if seg.index not in contexts
        ]
        self.logger.stdout.info(
            f"{self.method.value}/{language}: {len(contexts)} cached, {len(todo)} to build"
        )

        failed = []
        workers = self.summarizer.profile.max_concurrency
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(self._build, timeline, prev, cur, language): cur.index
                for prev, cur in todo
            }
            for future in track(
                as_completed(futures),
                total=len(futures),
                description=f"Contextualizing {language}...",
                disable=self.no_output,
            ):
                idx = futures[future]
                try:
                    contexts[idx] = future.result()
                except BackendError as err:
                    failed.append(idx)
                    self.logger.stderr.error(f"{self.method.value}/{language} segment {idx}: {err}")

        save_contexts(path, contexts, config_hash)
        return sorted(failed)

    def run(self) -> None:
        timeline = load_timeline(self.config)

        failed = {}
        for language in self.config.languages:
            missing = self.contextualize_language(timeline, language)
            if missing:
                failed[language] = missing

        if failed:
            raise StageIncompleteError(
                f"context building failed for {failed}", failed=sum(failed.values(), [])
            )

        self.complete()
