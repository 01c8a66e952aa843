import random

import pytest
from pydantic import ValidationError

from subgrain.exceptions import (
    EmptyCorpusError,
    FilterConfigError,
    InputNotFoundError,
    SubtitleParseError,
    TimeSpanError,
)
from subgrain.timedtext import (
    ParallelCorpus,
    SubtitleSegment,
    TimeSpan,
    corpus_from_jsonl,
    corpus_stats,
    corpus_to_jsonl,
    filter_segments,
    format_timestamp,
    normalize,
    normalize_text,
    pair,
    parse_srt,
    read_srt,
    serialize_srt,
)


WORDS = ["the", "ship", "sinks", "Jack", "Rose", "<i>ocean</i>", "“hey”", "run…", "42"]


def random_segments(rng: random.Random) -> list[SubtitleSegment]:
    segments = []
    t_ms = rng.randint(0, 5000)
    for index in range(1, rng.randint(1, 12) + 1):
        start = t_ms + rng.randint(0, 3000)
        end = start + rng.randint(0, 6000)
        lines = [
            " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 6)))
            for _ in range(rng.randint(1, 3))
        ]
        text = "\n".join(lines)
        segments.append(
            SubtitleSegment(
                index=index, span=TimeSpan(start_ms=start, end_ms=end), text=text, raw_text=text
            )
        )
        t_ms = end
    return segments


class TestTimeSpan:
    @staticmethod
    def test_overlap():
        a = TimeSpan(start_ms=0, end_ms=1000)
        assert a.overlap_ms(TimeSpan(start_ms=500, end_ms=2000)) == 500
        assert a.overlap_ms(TimeSpan(start_ms=1000, end_ms=2000)) == 0
        assert a.duration_ms == 1000

    @staticmethod
    def test_reversed():
        with pytest.raises(ValueError):
            TimeSpan(start_ms=10, end_ms=5)


class TestParseSrt:
    @staticmethod
    def test_basic():
        raw = b"1\n00:00:01,000 --> 00:00:02,500\nHello\nthere\n\n2\n01:02:03,004 --> 01:02:04,000\nBye\n"
        segments = parse_srt(raw)

        assert [seg.index for seg in segments] == [1, 2]
        assert segments[0].span == TimeSpan(start_ms=1000, end_ms=2500)
        assert segments[0].raw_text == "Hello\nthere"
        assert segments[1].span.start_ms == 3_723_004

    @staticmethod
    @pytest.mark.parametrize("seed", range(100))
    def test_round_trip(seed: int):
        rng = random.Random(seed)
        segments = random_segments(rng)
        canonical = serialize_srt(segments)

        variant = canonical
        if rng.random() < 0.5:
            variant = variant.replace("\n", "\r\n")
        if rng.random() < 0.3:
            variant = variant + "\n\n\n"
        raw = variant.encode("utf-8")
        if rng.random() < 0.5:
            raw = b"\xef\xbb\xbf" + raw

        parsed = parse_srt(raw)
        assert parsed == segments
        assert serialize_srt(parsed) == canonical

    @staticmethod
    @pytest.mark.parametrize(
        "raw, line",
        [
            (b"1\n00:00:01,000 -> 00:00:02,000\nHi\n", 2),
            (b"x\n00:00:01,000 --> 00:00:02,000\nHi\n", 1),
            (b"1\n00:00:01,000 --> 00:00:02,000\nHi\n\nabc\n", 5),
            (b"1\n00:61:01,000 --> 00:00:02,000\nHi\n", 2),
            (b"1\n", 2),
        ],
    )
    def test_malformed(raw: bytes, line: int):
        with pytest.raises(SubtitleParseError) as exc:
            parse_srt(raw, source="movie.srt")

        assert exc.value.line == line
        assert f"movie.srt:{line}" in str(exc.value)

    @staticmethod
    def test_reversed_span():
        with pytest.raises(TimeSpanError) as exc:
            parse_srt(b"1\n00:00:05,000 --> 00:00:02,000\nHi\n")
        assert exc.value.line == 2

    @staticmethod
    def test_invalid_utf8():
        with pytest.raises(SubtitleParseError) as exc:
            parse_srt(b"1\n00:00:01,000 --> 00:00:02,000\n\xff\xfe\n")
        assert exc.value.line == 3

    @staticmethod
    def test_read_missing(tmp_path):
        with pytest.raises(InputNotFoundError):
            read_srt(tmp_path / "nope.srt")

    @staticmethod
    def test_format_timestamp():
        assert format_timestamp(3_723_004) == "01:02:03,004"


class TestNormalize:
    @staticmethod
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("<i>Hello</i>  world", "Hello world"),
            ("{\\an8}Top line", "Top line"),
            ("“Quoted” – dash…", '"Quoted" - dash...'),
            ("<b><i>nested</i></b>", "nested"),
            ("<i></i>", ""),
            ("Two\nlines", "Two lines"),
        ],
    )
    def test_normalize_text(text: str, expected: str):
        assert normalize_text(text) == expected

    @staticmethod
    @pytest.mark.parametrize("seed", range(20))
    def test_idempotent(seed: int):
        for seg in random_segments(random.Random(seed)):
            once = normalize(seg)
            assert normalize(once) == once
            assert once.raw_text == seg.raw_text

    @staticmethod
    def test_empty_flag(segment):
        assert normalize(segment(1, 0, 10, "<i> </i>")).is_empty


class TestFilter:
    @staticmethod
    def test_bounds(segment):
        segs = [
            segment(1, 0, 10, ""),
            segment(2, 10, 20, "one"),
            segment(3, 20, 30, "one two three"),
            segment(4, 30, 40, " ".join(["w"] * 41)),
        ]
        assert [s.index for s in filter_segments(segs)] == [2, 3]
        assert [s.index for s in filter_segments(segs, min_words=2)] == [3]
        assert [s.index for s in filter_segments(segs, max_words=None)] == [2, 3, 4]

    @staticmethod
    @pytest.mark.parametrize("min_words, max_words", [(0, 40), (5, 4)])
    def test_invalid_bounds(segment, min_words: int, max_words: int):
        with pytest.raises(FilterConfigError):
            filter_segments([segment(1, 0, 10)], min_words, max_words)


class TestPair:
    @staticmethod
    def test_by_index(segment):
        source = [segment(1, 0, 100, "a"), segment(2, 100, 200, "b")]
        reference = [segment(2, 500, 600, "B"), segment(1, 400, 450, "A")]

        corpus = pair(source, reference, "m", "hin")
        assert [(s.text, r.text) for s, r in corpus.pairs] == [("a", "A"), ("b", "B")]
        assert corpus.dropped_source == corpus.dropped_reference == 0

    @staticmethod
    def test_by_overlap(segment):
        source = [segment(1, 0, 1000, "a"), segment(2, 1000, 2000, "b"), segment(3, 5000, 6000, "c")]
        reference = [segment(7, 100, 900, "A"), segment(8, 900, 1900, "B")]

        corpus = pair(source, reference, "m", "hin")
        assert [(s.index, r.index, r.text) for s, r in corpus.pairs] == [(1, 1, "A"), (2, 2, "B")]
        assert corpus.dropped_source == 1
        assert corpus.dropped_reference == 0

    @staticmethod
    def test_greedy_prefers_largest_overlap(segment):
        source = [segment(1, 0, 1000, "a"), segment(2, 800, 3000, "b")]
        reference = [segment(5, 700, 2000, "X")]

        corpus = pair(source, reference)
        assert [(s.index, r.text) for s, r in corpus.pairs] == [(2, "X")]

    @staticmethod
    def test_empty(segment):
        with pytest.raises(EmptyCorpusError):
            pair([segment(1, 0, 10)], [segment(5, 100, 200)])

    @staticmethod
    def test_duplicate_source_indices_renumbered():
        raw = (
            b"1\n00:00:01,000 --> 00:00:02,000\nOne.\n\n"
            b"2\n00:00:03,000 --> 00:00:04,000\nTwo.\n\n"
            b"2\n00:00:05,000 --> 00:00:06,000\nThree.\n\n"
            b"3\n00:00:07,000 --> 00:00:08,000\nFour.\n"
        )
        source = parse_srt(raw)
        assert [seg.index for seg in source] == [1, 2, 2, 3]

        reference = parse_srt(raw.replace(b"2\n00:00:05", b"3\n00:00:05").replace(b"3\n00:00:07", b"4\n00:00:07"))
        corpus = pair(source, reference, "m", "hin")

        assert [seg.index for seg in corpus.sources] == [1, 2, 3, 4]
        assert [(s.text, r.text) for s, r in corpus.pairs] == [
            ("One.", "One."),
            ("Two.", "Two."),
            ("Three.", "Three."),
            ("Four.", "Four."),
        ]

    @staticmethod
    def test_duplicate_indices_on_both_sides(segment):
        source = [segment(1, 0, 1000, "a"), segment(1, 2000, 3000, "b")]
        reference = [segment(4, 0, 900, "A"), segment(4, 2100, 3000, "B")]

        corpus = pair(source, reference)
        assert [(s.index, r.index, r.text) for s, r in corpus.pairs] == [(1, 1, "A"), (2, 2, "B")]

    @staticmethod
    def test_corpus_rejects_duplicate_indices(segment):
        with pytest.raises(ValidationError):
            ParallelCorpus(
                movie_id="m",
                language="hin",
                pairs=[(segment(1, 0, 10), segment(1, 0, 10)), (segment(1, 20, 30), segment(1, 20, 30))],
            )


class TestCorpus:
    @staticmethod
    def test_stats_and_jsonl(segment):
        source = [segment(1, 0, 100, "one two"), segment(2, 100, 200, "three four five six")]
        reference = [segment(1, 0, 100, "ek do"), segment(2, 100, 200, "teen")]
        corpus = pair(source, reference, "m", "hin")

        stats = corpus_stats(corpus)
        assert stats.pairs == 2
        assert stats.avg_words == 3.0
        assert stats.avg_chars == (7 + 19) / 2

        rebuilt = corpus_from_jsonl(['{"_meta": {}}', *corpus_to_jsonl(corpus)], "m", "hin")
        assert [(s.text, r.text) for s, r in rebuilt.pairs] == [
            ("one two", "ek do"),
            ("three four five six", "teen"),
        ]
