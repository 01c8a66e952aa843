"""
Segment-level COMET ingestion and oracle selective grounding.

Selective grounding replaces the worst k% of baseline segments (by baseline score) with a visual
variant's translations. All functions are pure.
"""

import json
import math
from pathlib import Path
from statistics import fmean
from typing import Iterable, Self, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_core import PydanticCustomError

from subgrain.core.logger import BaseLogger
from subgrain.exceptions import InputNotFoundError, MissingScoresError, ScoreFormatError, ScoringError
from subgrain.schema import TranslationRecord, Variant


logger = BaseLogger("subgrain.scoring")

BUDGET_TOLERANCE = 1e-9


class SegmentScore(BaseModel):
    """A segment-level quality score for one variant."""

    idx: int
    variant: Variant
    score: float

    model_config = ConfigDict(frozen=True)


def selective_budget(n_total: int, k_percent: float) -> int:
    """The number of segments replaced: `floor(n_total * k / 100)`."""
    return math.floor(n_total * k_percent / 100 + BUDGET_TOLERANCE)


def condition_name(k_percent: float) -> str:
    """`sel20`, `sel30`, `sel22.5`, ..."""
    return f"sel{k_percent:g}"


class SelectivePlan(BaseModel):
    """
    The segments to replace for one budget.

    Parameters:
        k_percent (float): the budget in `(0, 100]`.
        replaced (tuple[int, ...]): the replaced segment indices, ascending.
        n_total (int): the corpus size.
    """

    k_percent: float = Field(..., gt=0, le=100)
    replaced: tuple[int, ...]
    n_total: int = Field(..., ge=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_budget(self) -> Self:
        expected = selective_budget(self.n_total, self.k_percent)
        if len(self.replaced) != expected:
            raise PydanticCustomError(
                "invalid_plan",
                "A {k}% plan over {n} segments replaces {expected}, not {size}.",
                dict(k=self.k_percent, n=self.n_total, expected=expected, size=len(self.replaced)),
            )
        return self

    @property
    def condition(self) -> str:
        return condition_name(self.k_percent)

    def to_json(self) -> str:
        return json.dumps(
            {"k_percent": self.k_percent, "replaced": list(self.replaced), "n_total": self.n_total}
        )


def parse_segment_scores(lines: Iterable[str], source: str = "scores") -> list[SegmentScore]:
    """
    Validates segment score lines `{"idx", "variant", "score"}`.

    Raises:
        ScoreFormatError: a malformed line, an unknown variant or a repeated (idx, variant).
    """
    scores = []
    seen = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue

        try:
            row = json.loads(line)
            if "_meta" in row:
                continue
            score = SegmentScore.model_validate(row)
        except (json.JSONDecodeError, ValidationError, TypeError) as err:
            raise ScoreFormatError(f"{source}:{line_no}: invalid score line ({err})") from err

        key = (score.idx, score.variant)
        if key in seen:
            raise ScoreFormatError(
                f"{source}:{line_no}: duplicate score for segment {score.idx} ({score.variant.value})"
            )

        seen.add(key)
        scores.append(score)

    return scores


def ingest_segment_scores(path: Path) -> list[SegmentScore]:
    """Reads a segment score JSON Lines file."""
    path = Path(path)
    if not path.is_file():
        raise InputNotFoundError(f"segment score file not found: {path}")

    return parse_segment_scores(path.read_text(encoding="utf-8").splitlines(), source=str(path))


def scores_by_variant(scores: Iterable[SegmentScore]) -> dict[Variant, dict[int, float]]:
    """Groups scores as `{variant: {idx: score}}`."""
    grouped: dict[Variant, dict[int, float]] = {}
    for score in scores:
        grouped.setdefault(score.variant, {})[score.idx] = score.score
    return grouped


def _baseline_map(baseline_scores: Sequence[SegmentScore] | dict[int, float]) -> dict[int, float]:
    if isinstance(baseline_scores, dict):
        return dict(baseline_scores)

    mapped: dict[int, float] = {}
    for score in baseline_scores:
        if score.variant != Variant.BASELINE:
            continue
        if score.idx in mapped:
            raise ScoreFormatError(f"duplicate baseline score for segment {score.idx}")
        mapped[score.idx] = score.score
    return mapped


def plan_selective(
    baseline_scores: Sequence[SegmentScore] | dict[int, float],
    k_percent: float,
    expected_idx: Iterable[int] | None = None,
) -> SelectivePlan:
    """
    Picks the `floor(n * k / 100)` segments with the lowest baseline scores.

    Ties are broken by ascending index, so the plan only depends on score ranks.

    Parameters:
        baseline_scores (Sequence[SegmentScore] | dict[int, float]): baseline scores; other variants are ignored.
        k_percent (float): the budget in `(0, 100]`.
        expected_idx (Iterable[int] | None): (optional) every corpus index. Each must have a baseline score.

    Raises:
        MissingScoresError: an expected index has no baseline score.
        ScoringError: `k_percent` is outside `(0, 100]`.
    """
    if not 0 < k_percent <= 100:
        raise ScoringError(f"'k_percent' must be in (0, 100], got {k_percent}")

    scores = _baseline_map(baseline_scores)

    if expected_idx is not None:
        missing = sorted(set(expected_idx) - set(scores))
        if missing:
            raise MissingScoresError(
                f"missing baseline scores for {len(missing)} segment(s): {missing[:20]}",
                missing=missing,
            )
        expected = set(expected_idx)
        scores = {idx: value for idx, value in scores.items() if idx in expected}

    budget = selective_budget(len(scores), k_percent)
    worst = sorted(scores.items(), key=lambda item: (item[1], item[0]))[:budget]

    return SelectivePlan(
        k_percent=k_percent,
        replaced=tuple(sorted(idx for idx, _ in worst)),
        n_total=len(scores),
    )


def apply_selective(
    baseline: Sequence[TranslationRecord],
    visual: Sequence[TranslationRecord],
    plan: SelectivePlan,
) -> list[TranslationRecord]:
    """
    Returns the baseline records with replaced segments swapped for their visual records.

    Output order follows `baseline`. Every record is stamped with the visual variant and keeps
    the variant whose output it carries as `provenance`, so kept baseline records read
    `variant=<visual>, provenance=baseline`.

    Raises:
        ScoringError: the lists do not cover the plan, mix visual variants, or a replaced index has no visual record.
    """
    if len(baseline) != plan.n_total:
        raise ScoringError(
            f"plan covers {plan.n_total} segments but {len(baseline)} baseline records were given"
        )

    variants = {record.variant for record in visual}
    if len(variants) > 1 or Variant.BASELINE in variants:
        raise ScoringError(f"visual records must share one visual variant, got {sorted(variants)}")

    visual_by_idx = {record.idx: record for record in visual}
    missing = [idx for idx in plan.replaced if idx not in visual_by_idx]
    if missing:
        raise ScoringError(f"replaced segments without a visual record: {missing[:20]}")

    if not variants:
        return list(baseline)

    (selective,) = variants
    replaced = set(plan.replaced)
    return [
        visual_by_idx[record.idx]
        if record.idx in replaced
        else record.model_copy(update={"variant": selective})
        for record in baseline
    ]


def merge_segment_scores(
    baseline_scores: dict[int, float],
    visual_scores: dict[int, float],
    plan: SelectivePlan,
) -> list[float]:
    """Per-segment scores after replacement, in index order."""
    replaced = set(plan.replaced)
    missing = sorted(replaced - set(visual_scores))
    if missing:
        raise MissingScoresError(
            f"missing visual scores for replaced segment(s): {missing[:20]}", missing=missing
        )

    return [
        visual_scores[idx] if idx in replaced else score
        for idx, score in sorted(baseline_scores.items())
    ]


def corpus_score_from_segments(scores: Sequence[float]) -> float:
    """The corpus score as the arithmetic mean of segment scores."""
    if len(scores) == 0:
        raise ScoringError("Cannot aggregate an empty score list.")
    return fmean(scores)
