from pathlib import Path

from subgrain.cli.artifacts import load_corpus, load_translations
from subgrain.cli.commands.base import PipelineStage
from subgrain.cli.constants import StageSuccessCodes
from subgrain.cli.constants.enums import Artifact
from subgrain.exceptions import MissingScoresError, StageIncompleteError
from subgrain.report import RunResult, results_document
from subgrain.schema import Method, TranslationRecord, Variant
from subgrain.scoring import (
    MetricTriple,
    apply_selective,
    corpus_bleu,
    corpus_chrfpp,
    corpus_score_from_segments,
    ingest_segment_scores,
    merge_segment_scores,
    plan_selective,
    scores_by_variant,
)


class Evaluate(PipelineStage):
    """Scores every variant and selective budget for the `evaluate` command."""

    success_code = StageSuccessCodes.EVALUATED

    def _records(self, variant: Variant, language: str, indices: list[int]) -> list[TranslationRecord]:
        records = load_translations(self.config, variant, language)
        missing = [idx for idx in indices if idx not in records]
        if missing:
            raise StageIncompleteError(
                f"{variant.value}/{language}: {len(missing)} segment(s) untranslated",
                failed=missing,
            )
        return [records[idx] for idx in indices]

    def _scores(self, language: str) -> dict[Variant, dict[int, float]]:
        path = self.config.paths.segment_scores.get(language)
        if path is None:
            raise MissingScoresError(f"no segment score file configured for '{language}'")
        return scores_by_variant(ingest_segment_scores(path))

    @staticmethod
    def _variant_scores(
        scores: dict[Variant, dict[int, float]], variant: Variant, indices: list[int]
    ) -> dict[int, float]:
        found = scores.get(variant)
        if not found:
            raise MissingScoresError(f"no segment scores for variant '{variant.value}'")

        missing = [idx for idx in indices if idx not in found]
        if missing:
            raise MissingScoresError(
                f"variant '{variant.value}' lacks scores for {len(missing)} segment(s): {missing[:20]}",
                missing=missing,
            )
        return {idx: found[idx] for idx in indices}

    @staticmethod
    def _triple(records: list[TranslationRecord], refs: list[str], comet: list[float]) -> MetricTriple:
        hyps = [record.hypothesis for record in records]
        return MetricTriple(
            bleu=corpus_bleu(hyps, refs),
            chrfpp=corpus_chrfpp(hyps, refs),
            comet=corpus_score_from_segments(comet),
        )

    def _plan_path(self, method: Method, language: str, condition: str) -> Path:
        return Path(self.config.workdir, "plans", f"{method.value}_{language}_{condition}.json")

    def evaluate_language(self, language: str) -> list[RunResult]:
        corpus = load_corpus(self.config, language)
        indices = [seg.index for seg in corpus.sources]
        refs = [seg.text for seg in corpus.references]

        scores = self._scores(language)
        base_scores = self._variant_scores(scores, Variant.BASELINE, indices)

        baseline = self._records(Variant.BASELINE, language, indices)
        base_triple = self._triple(baseline, refs, [base_scores[idx] for idx in indices])

        results = []
        for method in self.config.methods:
            visual = self._records(method.variant, language, indices)
            vis_scores = self._variant_scores(scores, method.variant, indices)

            def result(condition: str, metrics: MetricTriple) -> RunResult:
                return RunResult(
                    movie_id=self.config.movie_id,
                    language=language,
                    method=method,
                    condition=condition,
                    metrics=metrics,
                    baseline=base_triple,
                )

            results.append(
                result("full", self._triple(visual, refs, [vis_scores[idx] for idx in indices]))
            )

            for k in self.config.selective.k_list:
                plan = plan_selective(base_scores, k, expected_idx=indices)
                merged = apply_selective(baseline, visual, plan)
                merged_scores = merge_segment_scores(base_scores, vis_scores, plan)
                results.append(result(plan.condition, self._triple(merged, refs, merged_scores)))

                plan_path = self._plan_path(method, language, plan.condition)
                plan_path.parent.mkdir(parents=True, exist_ok=True)
                plan_path.write_text(plan.to_json() + "\n", encoding="utf-8")

            self.logger.stdout.info(f"{method.value}/{language}: scored {len(indices)} segments")

        return results

    def run(self) -> None:
        results = []
        for language in self.config.languages:
            results.extend(self.evaluate_language(language))

        self.config.results_path().write_text(
            results_document(results, Artifact.RESULTS, self.config.results_hash()),
            encoding="utf-8",
        )
        self.complete()
