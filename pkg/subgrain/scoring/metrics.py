"""
Corpus-level BLEU and chrF++ on a 0-100 scale, computed with sacrebleu.
"""

import math
from typing import Sequence

from pydantic import BaseModel, ConfigDict, Field
from sacrebleu.metrics import BLEU, CHRF

from subgrain.exceptions import ScoringError


MAX_NGRAM_ORDER = 4
ZERO_LOG = -9999999999

# sacrebleu metric objects hold no per-call state once built.
_BLEU = BLEU(tokenize="intl", smooth_method="exp")
_CHRF = CHRF(word_order=2)


class MetricTriple(BaseModel):
    """
    Corpus metrics for one system output.

    Parameters:
        bleu (float | None): corpus BLEU. `None` when only COMET is known.
        chrfpp (float | None): corpus chrF++. `None` when only COMET is known.
        comet (float): corpus COMET.
    """

    bleu: float | None = Field(None, ge=0, le=100)
    chrfpp: float | None = Field(None, ge=0, le=100)
    comet: float

    model_config = ConfigDict(frozen=True)


def _check_lengths(hyps: Sequence[str], refs: Sequence[str]) -> None:
    if len(hyps) != len(refs):
        raise ScoringError(
            f"Hypothesis and reference counts differ ({len(hyps)} != {len(refs)})."
        )
    if not hyps:
        raise ScoringError("Cannot score an empty corpus.")


def _log(value: float) -> float:
    return math.log(value) if value > 0 else ZERO_LOG


def smoothed_bleu(
    counts: Sequence[int],
    totals: Sequence[int],
    sys_len: int,
    ref_len: int,
) -> float:
    """
    BLEU from clipped n-gram statistics with exponential smoothing.

    Each order with zero matches gets precision `1 / (2^j * total)`, where `j` counts the
    zero-match orders so far. An order with no hypothesis n-grams ends the sum.
    """
    if sys_len < ref_len:
        brevity = math.exp(1 - ref_len / sys_len) if sys_len > 0 else 0.0
    else:
        brevity = 1.0

    precisions = [0.0] * MAX_NGRAM_ORDER
    smooth = 1.0
    for n in range(MAX_NGRAM_ORDER):
        if totals[n] == 0:
            break

        if counts[n] == 0:
            smooth *= 2
            precisions[n] = 1.0 / (smooth * totals[n])
        else:
            precisions[n] = counts[n] / totals[n]

    # precisions stay in [0, 1] so a perfect match is exactly exp(0)
    score = 100.0 * brevity * math.exp(sum(_log(p) for p in precisions) / MAX_NGRAM_ORDER)
    return min(score, 100.0)


def corpus_bleu(hyps: Sequence[str], refs: Sequence[str]) -> float:
    """
    Corpus BLEU over n-gram orders 1-4 with the `intl` tokenizer (case kept).

    sacrebleu counts the n-grams; smoothing is applied by `smoothed_bleu` so corpora with no
    matches still score above zero.
    """
    _check_lengths(hyps, refs)

    stats = _BLEU.corpus_score(list(hyps), [list(refs)])
    return smoothed_bleu(stats.counts, stats.totals, stats.sys_len, stats.ref_len)


def corpus_chrfpp(hyps: Sequence[str], refs: Sequence[str]) -> float:
    """Corpus chrF++: character 6-grams, word bigrams, beta 2."""
    _check_lengths(hyps, refs)
    return min(_CHRF.corpus_score(list(hyps), [list(refs)]).score, 100.0)
