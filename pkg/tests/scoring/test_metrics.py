import itertools
import math
import random
from collections import Counter

import pytest

from subgrain.exceptions import ScoringError
from subgrain.scoring.metrics import MetricTriple, corpus_bleu, corpus_chrfpp, smoothed_bleu


def ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def oracle_bleu(hyps: list[str], refs: list[str]) -> float:
    """Textbook corpus BLEU with exponential smoothing over whitespace tokens."""
    counts, totals = [0] * 4, [0] * 4
    sys_len = ref_len = 0
    for hyp, ref in zip(hyps, refs):
        h, r = hyp.split(), ref.split()
        sys_len += len(h)
        ref_len += len(r)
        for n in range(1, 5):
            hyp_grams, ref_grams = ngrams(h, n), ngrams(r, n)
            totals[n - 1] += sum(hyp_grams.values())
            counts[n - 1] += sum(min(c, ref_grams[g]) for g, c in hyp_grams.items())

    log_sum, smooth = 0.0, 1
    for n in range(4):
        if totals[n] == 0:
            return 0.0
        if counts[n] == 0:
            smooth *= 2
            log_sum += math.log(100 / (smooth * totals[n]))
        else:
            log_sum += math.log(100 * counts[n] / totals[n])

    brevity = 1.0 if sys_len >= ref_len else math.exp(1 - ref_len / sys_len)
    return brevity * math.exp(log_sum / 4)


def sentences(vocab: str, max_len: int) -> list[str]:
    return [
        " ".join(words)
        for length in range(1, max_len + 1)
        for words in itertools.product(vocab, repeat=length)
    ]


def strings(alphabet: str, max_len: int) -> list[str]:
    return [
        "".join(chars)
        for length in range(1, max_len + 1)
        for chars in itertools.product(alphabet, repeat=length)
    ]


def oracle_chrfpp(hyps: list[str], refs: list[str], beta: float = 2.0) -> float:
    """Corpus chrF++ from character 1-6 grams (spaces removed) and word 1-2 grams."""
    stats = [[0, 0, 0] for _ in range(8)]
    for hyp, ref in zip(hyps, refs):
        orders = [(list("".join(hyp.split())), list("".join(ref.split())), n) for n in range(1, 7)]
        orders += [(hyp.split(), ref.split(), n) for n in range(1, 3)]
        for slot, (h, r, n) in zip(stats, orders):
            hyp_grams, ref_grams = ngrams(h, n), ngrams(r, n)
            slot[0] += sum(hyp_grams.values())
            slot[1] += sum(ref_grams.values())
            slot[2] += sum(min(c, ref_grams[g]) for g, c in hyp_grams.items())

    active = [(h, r, m) for h, r, m in stats if h > 0 and r > 0]
    if not active:
        return 0.0

    precision = sum(m / h for h, _, m in active) / len(active)
    recall = sum(m / r for _, r, m in active) / len(active)
    if precision + recall == 0:
        return 0.0
    return 100 * (1 + beta**2) * precision * recall / (beta**2 * precision + recall)


class TestBleu:
    @staticmethod
    def test_near_match():
        assert corpus_bleu(["a b c d e"], ["a b c d f"]) == pytest.approx(100 * 0.2**0.25)

    @staticmethod
    def test_disjoint_is_positive():
        score = corpus_bleu(["a b c d e"], ["f g h i j"])
        expected = math.exp(
            (math.log(100 / 10) + math.log(100 / 16) + math.log(100 / 24) + math.log(100 / 32)) / 4
        )
        assert score == pytest.approx(expected)
        assert score == pytest.approx(5.341, abs=1e-3)

    @staticmethod
    def test_short_hypothesis_zero():
        assert corpus_bleu(["the the the"], ["the cat sat"]) == 0.0

    @staticmethod
    @pytest.mark.parametrize(
        "refs",
        [
            ["the ship sails at dawn", "we will meet again soon"],
            ["a b c d"],
            ["one two three four five six seven", "x y z w", "p q r s t"],
        ],
    )
    def test_identical(refs: list[str]):
        score = corpus_bleu(refs, refs)

        assert score == 100.0
        assert MetricTriple(bleu=score, chrfpp=corpus_chrfpp(refs, refs), comet=0.9).bleu == 100.0

    @staticmethod
    def test_brevity_penalty():
        assert corpus_bleu(["a b c d"], ["a b c d e f g h"]) == pytest.approx(100 * math.exp(-1))

    @staticmethod
    @pytest.mark.parametrize("ref", sentences("ab", 5)[::3])
    def test_exhaustive_small(ref: str):
        for hyp in sentences("ab", 5):
            assert corpus_bleu([hyp], [ref]) == pytest.approx(oracle_bleu([hyp], [ref]), abs=1e-9)

    @staticmethod
    @pytest.mark.parametrize("seed", range(30))
    def test_random_corpora(seed: int):
        rng = random.Random(seed)
        vocab = "abcde"
        size = rng.randint(1, 6)
        hyps = [" ".join(rng.choices(vocab, k=rng.randint(1, 9))) for _ in range(size)]
        refs = [" ".join(rng.choices(vocab, k=rng.randint(1, 9))) for _ in range(size)]

        assert corpus_bleu(hyps, refs) == pytest.approx(oracle_bleu(hyps, refs), abs=1e-9)

    @staticmethod
    def test_smoothed_bleu_stops_at_empty_order():
        assert smoothed_bleu([3, 0, 0, 0], [3, 2, 1, 0], 3, 3) == 0.0

    @staticmethod
    @pytest.mark.parametrize("hyps, refs", [([], []), (["a"], ["a", "b"])])
    def test_invalid_lengths(hyps, refs):
        with pytest.raises(ScoringError):
            corpus_bleu(hyps, refs)


class TestChrfpp:
    @staticmethod
    def test_near_match():
        assert corpus_chrfpp(["abc"], ["abd"]) == pytest.approx(700 / 24)

    @staticmethod
    @pytest.mark.parametrize("line", ["the same line", "a", "ab ba ab", "we will meet again soon"])
    def test_identical(line: str):
        assert corpus_chrfpp([line], [line]) == 100.0

    @staticmethod
    @pytest.mark.parametrize("hyp, ref", [("", "a b"), ("a b", ""), ("", "")])
    def test_empty_side_is_zero(hyp: str, ref: str):
        assert corpus_chrfpp([hyp], [ref]) == 0.0

    @staticmethod
    @pytest.mark.parametrize("ref", strings("ab ", 5)[::7])
    def test_exhaustive_small(ref: str):
        for hyp in strings("ab ", 5):
            assert corpus_chrfpp([hyp], [ref]) == pytest.approx(oracle_chrfpp([hyp], [ref]), abs=1e-9)

    @staticmethod
    @pytest.mark.parametrize("seed", range(30))
    def test_random_corpora(seed: int):
        rng = random.Random(seed)
        size = rng.randint(1, 5)
        hyps = [" ".join(rng.choices(["ab", "ba", "a", "bb", "aab"], k=rng.randint(1, 7))) for _ in range(size)]
        refs = [" ".join(rng.choices(["ab", "b", "aa", "bab"], k=rng.randint(1, 7))) for _ in range(size)]

        assert corpus_chrfpp(hyps, refs) == pytest.approx(oracle_chrfpp(hyps, refs), abs=1e-9)

    @staticmethod
    @pytest.mark.parametrize("seed", range(20))
    def test_bounds(seed: int):
        rng = random.Random(seed)
        hyps = ["".join(rng.choices("ab ", k=rng.randint(1, 12))) for _ in range(3)]
        refs = ["".join(rng.choices("abc ", k=rng.randint(1, 12))) for _ in range(3)]

        assert 0.0 <= corpus_chrfpp(hyps, refs) <= 100.0

    @staticmethod
    def test_invalid_lengths():
        with pytest.raises(ScoringError):
            corpus_chrfpp(["a"], [])


class TestMetricTriple:
    @staticmethod
    def test_comet_only():
        assert MetricTriple(comet=0.7).bleu is None

    @staticmethod
    def test_range():
        with pytest.raises(ValueError):
            MetricTriple(bleu=101, chrfpp=50, comet=0.7)
