from subgrain.scoring.metrics import MetricTriple, corpus_bleu, corpus_chrfpp
from subgrain.scoring.selective import (
    SegmentScore,
    SelectivePlan,
    apply_selective,
    condition_name,
    corpus_score_from_segments,
    ingest_segment_scores,
    merge_segment_scores,
    plan_selective,
    scores_by_variant,
)


__all__ = [
    "MetricTriple",
    "SegmentScore",
    "SelectivePlan",
    "apply_selective",
    "condition_name",
    "corpus_bleu",
    "corpus_chrfpp",
    "corpus_score_from_segments",
    "ingest_segment_scores",
    "merge_segment_scores",
    "plan_selective",
    "scores_by_variant",
]
