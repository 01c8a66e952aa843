import json
import random
from statistics import fmean

import pytest
from pydantic import ValidationError

from subgrain.exceptions import InputNotFoundError, MissingScoresError, ScoreFormatError, ScoringError
from subgrain.schema import TemplateId, TranslationRecord, Variant
from subgrain.scoring.selective import (
    SegmentScore,
    SelectivePlan,
    apply_selective,
    condition_name,
    corpus_score_from_segments,
    ingest_segment_scores,
    merge_segment_scores,
    parse_segment_scores,
    plan_selective,
    scores_by_variant,
    selective_budget,
)


def record(idx: int, variant: Variant) -> TranslationRecord:
    return TranslationRecord(
        idx=idx,
        language="hin",
        variant=variant,
        provenance=variant,
        hypothesis=f"{variant.value}-{idx}",
        template_id=TemplateId.BASELINE_TRANSLATE,
        system_text="s",
        user_text="u",
    )


def oracle_replaced(scores: dict[int, float], k: float) -> set[int]:
    """A segment is replaced when fewer than `budget` segments rank strictly before it."""
    budget = int(len(scores) * k // 100)
    chosen = set()
    for i, s_i in scores.items():
        ahead = sum(1 for j, s_j in scores.items() if s_j < s_i or (s_j == s_i and j < i))
        if ahead < budget:
            chosen.add(i)
    return chosen


class TestBudget:
    @staticmethod
    @pytest.mark.parametrize(
        "n, k, expected",
        [(10, 30, 3), (10, 20, 2), (7, 30, 2), (3, 30, 0), (100, 100, 100), (10, 33.3, 3), (1000, 0.1, 1)],
    )
    def test_floor(n: int, k: float, expected: int):
        assert selective_budget(n, k) == expected

    @staticmethod
    @pytest.mark.parametrize("k, name", [(20.0, "sel20"), (30, "sel30"), (22.5, "sel22.5")])
    def test_condition_name(k: float, name: str):
        assert condition_name(k) == name


class TestPlanSelective:
    @staticmethod
    def test_worst_replaced():
        scores = {1: 0.9, 2: 0.1, 3: 0.5, 4: 0.2, 5: 0.8, 6: 0.3, 7: 0.7, 8: 0.6, 9: 0.95, 10: 0.4}
        plan = plan_selective(scores, 30)

        assert plan.replaced == (2, 4, 6)
        assert plan.condition == "sel30"
        assert json.loads(plan.to_json()) == {"k_percent": 30, "replaced": [2, 4, 6], "n_total": 10}

    @staticmethod
    def test_ties_by_index():
        plan = plan_selective({5: 0.5, 3: 0.5, 9: 0.5, 1: 0.9}, 50)
        assert plan.replaced == (3, 5)

    @staticmethod
    def test_other_variants_ignored():
        scores = [
            SegmentScore(idx=1, variant="baseline", score=0.2),
            SegmentScore(idx=2, variant="baseline", score=0.9),
            SegmentScore(idx=1, variant="attr_vc", score=0.0),
        ]
        assert plan_selective(scores, 50).replaced == (1,)

    @staticmethod
    @pytest.mark.parametrize("seed", range(100))
    def test_matches_rank_oracle(seed: int):
        rng = random.Random(seed)
        for _ in range(10):
            n = rng.randint(0, 40)
            scores = {idx: round(rng.random(), 1) for idx in rng.sample(range(1, 500), n)}
            k = rng.choice([10.0, 20.0, 25.0, 30.0, 50.0, 100.0, round(rng.uniform(0.5, 100), 2)])

            plan = plan_selective(scores, k)
            assert set(plan.replaced) == oracle_replaced(scores, k)
            assert list(plan.replaced) == sorted(plan.replaced)

    @staticmethod
    @pytest.mark.parametrize("seed", range(20))
    def test_budgets_nest(seed: int):
        rng = random.Random(seed)
        scores = {idx: rng.random() for idx in range(1, 60)}

        sel20 = plan_selective(scores, 20)
        sel30 = plan_selective(scores, 30)
        assert set(sel20.replaced) <= set(sel30.replaced)

    @staticmethod
    def test_missing_scores():
        with pytest.raises(MissingScoresError) as exc:
            plan_selective({1: 0.5}, 30, expected_idx=[1, 2, 3])
        assert exc.value.missing == [2, 3]

    @staticmethod
    def test_extra_scores_dropped():
        plan = plan_selective({1: 0.5, 2: 0.1, 99: 0.0}, 50, expected_idx=[1, 2])
        assert plan.replaced == (2,)
        assert plan.n_total == 2

    @staticmethod
    @pytest.mark.parametrize("k", [0, -5, 100.5])
    def test_invalid_k(k: float):
        with pytest.raises(ScoringError):
            plan_selective({1: 0.5}, k)

    @staticmethod
    def test_plan_budget_checked():
        with pytest.raises(ValidationError):
            SelectivePlan(k_percent=30, replaced=(1,), n_total=10)


class TestApplySelective:
    @staticmethod
    def test_replaces_planned():
        baseline = [record(i, Variant.BASELINE) for i in range(1, 6)]
        visual = [record(i, Variant.INTER_VS) for i in range(1, 6)]
        plan = SelectivePlan(k_percent=40, replaced=(2, 5), n_total=5)

        merged = apply_selective(baseline, visual, plan)
        assert [r.idx for r in merged] == [1, 2, 3, 4, 5]
        assert [r.provenance for r in merged] == [
            Variant.BASELINE,
            Variant.INTER_VS,
            Variant.BASELINE,
            Variant.BASELINE,
            Variant.INTER_VS,
        ]
        assert {r.variant for r in merged} == {Variant.INTER_VS}
        assert [r.hypothesis for r in merged] == [
            "baseline-1",
            "inter_vs-2",
            "baseline-3",
            "baseline-4",
            "inter_vs-5",
        ]

    @staticmethod
    def test_provenance_differs_only_for_kept():
        baseline = [record(i, Variant.BASELINE) for i in range(1, 5)]
        visual = [record(i, Variant.ATTR_VC) for i in range(1, 5)]
        plan = SelectivePlan(k_percent=25, replaced=(3,), n_total=4)

        merged = apply_selective(baseline, visual, plan)
        differing = [r.idx for r in merged if r.provenance != r.variant]

        assert differing == [1, 2, 4]
        assert baseline[0].variant == Variant.BASELINE

    @staticmethod
    def test_nothing_replaced():
        baseline = [record(i, Variant.BASELINE) for i in range(1, 3)]
        plan = SelectivePlan(k_percent=20, replaced=(), n_total=2)

        assert apply_selective(baseline, [], plan) == baseline

    @staticmethod
    def test_missing_visual():
        baseline = [record(i, Variant.BASELINE) for i in range(1, 6)]
        plan = SelectivePlan(k_percent=40, replaced=(2, 5), n_total=5)

        with pytest.raises(ScoringError):
            apply_selective(baseline, [record(2, Variant.ATTR_VC)], plan)

    @staticmethod
    def test_mixed_variants():
        baseline = [record(i, Variant.BASELINE) for i in range(1, 3)]
        visual = [record(1, Variant.ATTR_VC), record(2, Variant.INTER_VS)]
        plan = SelectivePlan(k_percent=50, replaced=(1,), n_total=2)

        with pytest.raises(ScoringError):
            apply_selective(baseline, visual, plan)

    @staticmethod
    def test_size_mismatch():
        plan = SelectivePlan(k_percent=50, replaced=(1,), n_total=2)
        with pytest.raises(ScoringError):
            apply_selective([record(1, Variant.BASELINE)], [record(1, Variant.ATTR_VC)], plan)


class TestMergeScores:
    @staticmethod
    def test_merge():
        plan = SelectivePlan(k_percent=50, replaced=(2,), n_total=2)
        assert merge_segment_scores({1: 0.5, 2: 0.2}, {1: 0.1, 2: 0.6}, plan) == [0.5, 0.6]

    @staticmethod
    def test_missing_visual_score():
        plan = SelectivePlan(k_percent=50, replaced=(2,), n_total=2)
        with pytest.raises(MissingScoresError):
            merge_segment_scores({1: 0.5, 2: 0.2}, {1: 0.1}, plan)

    @staticmethod
    @pytest.mark.parametrize("seed", range(30))
    def test_never_worse_when_visual_dominates(seed: int):
        rng = random.Random(seed)
        baseline = {idx: rng.random() for idx in range(1, 30)}
        visual = {idx: score + rng.random() * 0.1 for idx, score in baseline.items()}
        plan = plan_selective(baseline, 30)

        merged = corpus_score_from_segments(merge_segment_scores(baseline, visual, plan))
        assert merged >= fmean(baseline.values())

    @staticmethod
    def test_empty_mean():
        with pytest.raises(ScoringError):
            corpus_score_from_segments([])


class TestIngestScores:
    @staticmethod
    def test_parse_and_group():
        lines = [
            '{"_meta": {"artifact": "scores"}}',
            '{"idx": 1, "variant": "baseline", "score": 0.5}',
            "",
            '{"idx": 1, "variant": "attr_vc", "score": 0.6}',
        ]
        grouped = scores_by_variant(parse_segment_scores(lines))

        assert grouped == {Variant.BASELINE: {1: 0.5}, Variant.ATTR_VC: {1: 0.6}}

    @staticmethod
    @pytest.mark.parametrize(
        "lines, line_no",
        [
            (['{"idx": 1, "variant": "baseline", "score": "high"}'], 1),
            (['{"idx": 1, "variant": "other", "score": 0.1}'], 1),
            (["{bad json"], 1),
            (
                [
                    '{"idx": 1, "variant": "baseline", "score": 0.1}',
                    '{"idx": 1, "variant": "baseline", "score": 0.2}',
                ],
                2,
            ),
        ],
    )
    def test_invalid(lines: list[str], line_no: int):
        with pytest.raises(ScoreFormatError, match=f"scores:{line_no}:"):
            parse_segment_scores(lines)

    @staticmethod
    def test_missing_file(tmp_path):
        with pytest.raises(InputNotFoundError):
            ingest_segment_scores(tmp_path / "none.jsonl")
