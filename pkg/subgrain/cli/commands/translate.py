from concurrent.futures import ThreadPoolExecutor, as_completed

from rich.progress import track

from subgrain.backends import get_backend
from subgrain.cli.artifacts import load_corpus, load_translations, save_translations
from subgrain.cli.commands.base import PipelineStage
from subgrain.cli.constants import StageSuccessCodes
from subgrain.context.cache import VisualContext, load_contexts
from subgrain.core.config import PipelineConfig
from subgrain.exceptions import BackendError, InputNotFoundError, StageIncompleteError
from subgrain.schema import Method, TranslationRecord, Variant
from subgrain.timedtext import SubtitleSegment
from subgrain.translation import translate_segment


class Translate(PipelineStage):
    """Translates every segment under one variant for the `translate` command."""

    success_code = StageSuccessCodes.TRANSLATED

    def __init__(
        self,
        config: PipelineConfig,
        variant: Variant,
        no_output: bool = False,
        test_logging: bool = False,
    ) -> None:
        super().__init__(config, no_output=no_output, test_logging=test_logging)
        self.variant = Variant(variant)
        self.translator = get_backend(config.backends.translate)

    def _contexts(self, language: str, indices: list[int]) -> dict[int, VisualContext]:
        """The cached contexts for a visual variant. Every segment must have one."""
        if self.variant == Variant.BASELINE:
            return {}

        method = Method(self.variant.value)
        path = self.config.contexts_path(method, language)
        if not path.is_file():
            raise InputNotFoundError(f"context cache not found: {path}. Run `contextualize` first.")

        contexts = load_contexts(path, self.config.contexts_hash(method, language))

        missing = [idx for idx in indices if idx not in contexts]
        if missing:
            raise StageIncompleteError(
                f"{method.value}/{language}: no cached context for {len(missing)} segment(s); "
                "re-run `contextualize`",
                failed=missing,
            )
        return contexts

    def _translate(
        self,
        segment: SubtitleSegment,
        contexts: dict[int, VisualContext],
        language: str,
    ) -> TranslationRecord:
        return translate_segment(
            segment,
            contexts.get(segment.index),
            language,
            self.config.language_name(language),
            self.variant,
            self.translator,
        )

    def translate_language(self, language: str) -> list[int]:
        """Translates one language, resuming from earlier records. Returns the indices that failed."""
        corpus = load_corpus(self.config, language)
        sources = corpus.sources
        contexts = self._contexts(language, [seg.index for seg in sources])

        records = load_translations(self.config, self.variant, language, missing_ok=True)
        todo = [seg for seg in sources if seg.index not in records]

        failed = []
        workers = self.translator.profile.max_concurrency
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(self._translate, seg, contexts, language): seg.index for seg in todo
            }
            for future in track(
                as_completed(futures),
                total=len(futures),
                description=f"Translating {language} ({self.variant.value})...",
                disable=self.no_output,
            ):
                idx = futures[future]
                try:
                    records[idx] = future.result()
                except BackendError as err:
                    failed.append(idx)
                    self.logger.stderr.error(f"{self.variant.value}/{language} segment {idx}: {err}")

        save_translations(self.config, self.variant, language, records)

        fallbacks = sum(record.fallback for record in records.values())
        if fallbacks:
            self.logger.stdout.info(
                f"{self.variant.value}/{language}: {fallbacks} segment(s) used the baseline prompt (empty context)"
            )
        return sorted(failed)

    def run(self) -> None:
        failed = {}
        for language in self.config.languages:
            missing = self.translate_language(language)
            if missing:
                failed[language] = missing

        if failed:
            raise StageIncompleteError(
                f"translation failed for {failed}", failed=sum(failed.values(), [])
            )

        self.complete()
