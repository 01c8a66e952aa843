"""
Timed-text handling: SubRip parsing, normalization, filtering and source/reference pairing.

All functions are pure over immutable pydantic models, so they can be called from any thread.
"""

import json
import re
from pathlib import Path
from typing import Iterable, Self

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_core import PydanticCustomError

from subgrain.core.logger import BaseLogger
from subgrain.exceptions import (
    EmptyCorpusError,
    FilterConfigError,
    InputNotFoundError,
    SubtitleParseError,
    TimeSpanError,
)


logger = BaseLogger("subgrain.timedtext")

TIMING_LINE = re.compile(
    r"(\d{2}):(\d{2}):(\d{2}),(\d{3}) --> (\d{2}):(\d{2}):(\d{2}),(\d{3})"
)
LINE_BREAK = re.compile(r"\r\n|\r|\n")
CUE_INDEX = re.compile(r"[0-9]+")

HTML_TAG = re.compile(r"<[^>]*>")
ASS_OVERRIDE = re.compile(r"\{\\[^}]*\}")

PUNCTUATION_MAP = str.maketrans(
    {
        "“": '"',
        "”": '"',
        "„": '"',
        "‟": '"',
        "«": '"',
        "»": '"',
        "‘": "'",
        "’": "'",
        "‚": "'",
        "‛": "'",
        "‐": "-",
        "‑": "-",
        "‒": "-",
        "–": "-",
        "—": "-",
        "―": "-",
        "…": "...",
    }
)


class TimeSpan(BaseModel):
    """
    A closed millisecond interval on the movie clock.

    Parameters:
        start_ms (int): the span start in milliseconds.
        end_ms (int): the span end in milliseconds. Must not precede `start_ms`.
    """

    start_ms: int = Field(..., ge=0)
    end_ms: int = Field(..., ge=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_order(self) -> Self:
        if self.end_ms < self.start_ms:
            raise PydanticCustomError(
                "invalid_span",
                "Span ends ({end_ms} ms) before it starts ({start_ms} ms).",
                dict(start_ms=self.start_ms, end_ms=self.end_ms),
            )
        return self

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms

    def overlap_ms(self, other: "TimeSpan") -> int:
        """The length of the intersection with `other`. Zero when they are disjoint."""
        return max(0, min(self.end_ms, other.end_ms) - max(self.start_ms, other.start_ms))


class SubtitleSegment(BaseModel):
    """
    A single subtitle cue.

    Parameters:
        index (int): the cue number from the file.
        span (TimeSpan): when the cue is shown.
        text (str): the normalized text. Equal to `raw_text` until `normalize()` runs.
        raw_text (str): the cue text exactly as it appears in the file, lines joined with `\\n`.
    """

    index: int = Field(..., ge=1)
    span: TimeSpan
    text: str
    raw_text: str

    model_config = ConfigDict(frozen=True)

    @property
    def is_empty(self) -> bool:
        """Flags a segment whose text is empty. Such segments are removed by `filter_segments`."""
        return self.text == ""

    @property
    def word_count(self) -> int:
        return len(self.text.split())


class ParallelCorpus(BaseModel):
    """
    Source segments paired with reference segments for one movie and target language.

    Parameters:
        movie_id (str): the movie identifier.
        language (str): the target language code.
        pairs (list[tuple[SubtitleSegment, SubtitleSegment]]): ordered (source, reference) pairs.
        dropped_source (int): source segments without a partner.
        dropped_reference (int): reference segments without a partner.
    """

    movie_id: str
    language: str
    pairs: list[tuple[SubtitleSegment, SubtitleSegment]]
    dropped_source: int = 0
    dropped_reference: int = 0

    @model_validator(mode="after")
    def validate_pairs(self) -> Self:
        if not self.pairs:
            raise PydanticCustomError(
                "empty_corpus",
                "A parallel corpus needs at least one pair.",
                dict(movie_id=self.movie_id, language=self.language),
            )

        indices = [source.index for source, _ in self.pairs]
        if len(set(indices)) != len(indices):
            raise PydanticCustomError(
                "duplicate_index",
                "Corpus indices must be unique ({count} pairs, {unique} indices).",
                dict(count=len(indices), unique=len(set(indices))),
            )

        for source, reference in self.pairs:
            if source.index != reference.index:
                raise PydanticCustomError(
                    "unpaired_index",
                    "Paired segments must share an index ({source} != {reference}).",
                    dict(source=source.index, reference=reference.index),
                )
        return self

    @property
    def sources(self) -> list[SubtitleSegment]:
        return [source for source, _ in self.pairs]

    @property
    def references(self) -> list[SubtitleSegment]:
        return [reference for _, reference in self.pairs]


class CorpusStats(BaseModel):
    """Per-movie subtitle statistics over the English source side."""

    pairs: int
    avg_words: float
    avg_chars: float


def format_timestamp(ms: int) -> str:
    """Formats milliseconds as a SubRip timestamp `HH:MM:SS,mmm`."""
    hours, rest = divmod(ms, 3_600_000)
    minutes, rest = divmod(rest, 60_000)
    seconds, millis = divmod(rest, 1000)
    return f"{hours:02}:{minutes:02}:{seconds:02},{millis:03}"


def _timing_to_span(line: str, line_no: int, source: str | None) -> TimeSpan:
    match = TIMING_LINE.fullmatch(line.strip())
    if match is None:
        raise SubtitleParseError(f"malformed timing line {line!r}", line_no, source)

    values = [int(group) for group in match.groups()]
    bounds = []
    for hours, minutes, seconds, millis in (values[:4], values[4:]):
        if minutes > 59 or seconds > 59:
            raise SubtitleParseError(f"timestamp out of range in {line!r}", line_no, source)
        bounds.append(((hours * 60 + minutes) * 60 + seconds) * 1000 + millis)

    try:
        return TimeSpan(start_ms=bounds[0], end_ms=bounds[1])
    except ValidationError:
        raise TimeSpanError(
            f"cue ends before it starts ({line.strip()})", line_no, source
        )


def parse_srt(raw: bytes, source: str | None = None) -> list[SubtitleSegment]:
    """
    Parses a SubRip byte stream into segments in file order.

    Accepts an optional UTF-8 byte-order mark, CRLF/LF/CR line endings and trailing blank lines.
    `raw_text` keeps every text line verbatim, joined with `\\n`.

    Parameters:
        raw (bytes): the file contents.
        source (str | None): (optional) a file name used in error messages.

    Returns:
        list[SubtitleSegment]: the parsed cues.

    Raises:
        SubtitleParseError: a malformed index or timing line, with its line number.
        TimeSpanError: a cue that ends before it starts.
    """
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as err:
        line_no = raw[: err.start].count(b"\n") + 1
        raise SubtitleParseError("file is not valid UTF-8", line_no, source)

    lines = LINE_BREAK.split(text)
    segments: list[SubtitleSegment] = []
    pos = 0

    while pos < len(lines):
        if lines[pos].strip() == "":
            pos += 1
            continue

        index_line = lines[pos].strip()
        if CUE_INDEX.fullmatch(index_line) is None or int(index_line) < 1:
            raise SubtitleParseError(f"expected a cue index, found {index_line!r}", pos + 1, source)
        index = int(index_line)

        if pos + 1 >= len(lines):
            raise SubtitleParseError("cue is missing its timing line", pos + 2, source)
        span = _timing_to_span(lines[pos + 1], pos + 2, source)

        pos += 2
        text_lines = []
        while pos < len(lines) and lines[pos].strip() != "":
            text_lines.append(lines[pos])
            pos += 1

        raw_text = "\n".join(text_lines)
        if segments and index <= segments[-1].index:
            logger.warning(
                f"{source or 'srt'}: cue index {index} does not increase after {segments[-1].index}"
            )

        segments.append(
            SubtitleSegment(index=index, span=span, text=raw_text, raw_text=raw_text)
        )

    return segments


def read_srt(path: Path) -> list[SubtitleSegment]:
    """Reads and parses a SubRip file from disk."""
    path = Path(path)
    if not path.is_file():
        raise InputNotFoundError(f"subtitle file not found: {path}")

    return parse_srt(Path(path).read_bytes(), source=str(path))


def serialize_srt(segments: Iterable[SubtitleSegment]) -> str:
    """Writes segments in canonical SubRip form: LF line endings, no BOM, one blank line after every cue."""
    blocks = []
    for seg in segments:
        timing = f"{format_timestamp(seg.span.start_ms)} --> {format_timestamp(seg.span.end_ms)}"
        blocks.append(f"{seg.index}\n{timing}\n{seg.raw_text}\n\n")
    return "".join(blocks)


def strip_markup(text: str) -> str:
    """Removes HTML-style tags and `{\\...}` override blocks until none remain."""
    while True:
        stripped = ASS_OVERRIDE.sub("", HTML_TAG.sub("", text))
        if stripped == text:
            return stripped
        text = stripped


def normalize_punctuation(text: str) -> str:
    """Maps curly quotes, dashes and the ellipsis to ASCII and collapses whitespace runs."""
    return " ".join(text.translate(PUNCTUATION_MAP).split())


def normalize_text(text: str) -> str:
    return normalize_punctuation(strip_markup(text))


def normalize(seg: SubtitleSegment) -> SubtitleSegment:
    """
    Returns a copy of `seg` with normalized text. Idempotent.

    An empty result is not an error; the segment is flagged through `is_empty`.
    """
    return seg.model_copy(update={"text": normalize_text(seg.text)})


def filter_segments(
    segs: list[SubtitleSegment],
    min_words: int = 1,
    max_words: int | None = 40,
) -> list[SubtitleSegment]:
    """
    Keeps non-empty segments whose word count lies in `[min_words, max_words]`.

    Parameters:
        segs (list[SubtitleSegment]): normalized segments.
        min_words (int): (optional) the smallest word count kept. Defaults to `1`.
        max_words (int | None): (optional) the largest word count kept. `None` removes the upper bound.

            Defaults to `40`.

    Raises:
        FilterConfigError: when `min_words < 1` or `min_words > max_words`.
    """
    if min_words < 1 or (max_words is not None and min_words > max_words):
        raise FilterConfigError(
            f"invalid word bounds: min_words={min_words}, max_words={max_words}"
        )

    kept = [
        seg
        for seg in segs
        if not seg.is_empty
        and seg.word_count >= min_words
        and (max_words is None or seg.word_count <= max_words)
    ]
    logger.info(f"filter kept {len(kept)} of {len(segs)} segments ({len(segs) - len(kept)} dropped)")
    return kept


def pair(
    source: list[SubtitleSegment],
    reference: list[SubtitleSegment],
    movie_id: str = "movie",
    language: str = "und",
) -> ParallelCorpus:
    """
    Pairs source and reference segments.

    Equal index sets pair by index. Otherwise every candidate with a positive temporal overlap
    is ranked by (overlap desc, source index, reference index) and accepted when both sides are
    still free. Paired references take the source index.

    Duplicate source indices are replaced by file-order numbers (1..n) before pairing, so
    corpus indices are unique.

    Raises:
        EmptyCorpusError: when no pairs remain.
    """
    if len({seg.index for seg in source}) != len(source):
        logger.warning(
            f"{movie_id}/{language}: duplicate source cue indices, renumbering by file order"
        )
        source = [seg.model_copy(update={"index": pos}) for pos, seg in enumerate(source, start=1)]

    src_indices = [seg.index for seg in source]
    ref_indices = [seg.index for seg in reference]

    if sorted(src_indices) == sorted(ref_indices) and len(set(src_indices)) == len(src_indices):
        by_index = {seg.index: seg for seg in reference}
        pairs = [(seg, by_index[seg.index]) for seg in source]
    else:
        candidates = []
        for i, src in enumerate(source):
            for j, ref in enumerate(reference):
                overlap = src.span.overlap_ms(ref.span)
                if overlap > 0:
                    candidates.append((-overlap, src.index, ref.index, i, j))
        candidates.sort()

        taken_src: dict[int, int] = {}
        taken_ref: set[int] = set()
        for _, _, _, i, j in candidates:
            if i in taken_src or j in taken_ref:
                continue
            taken_src[i] = j
            taken_ref.add(j)

        pairs = [
            (source[i], reference[j].model_copy(update={"index": source[i].index}))
            for i, j in sorted(taken_src.items())
        ]

    if not pairs:
        raise EmptyCorpusError(f"no subtitle pairs for {movie_id}/{language}")

    dropped_source = len(source) - len(pairs)
    dropped_reference = len(reference) - len(pairs)
    if dropped_source or dropped_reference:
        logger.info(
            f"{movie_id}/{language}: dropped {dropped_source} source and {dropped_reference} reference segments while pairing"
        )

    return ParallelCorpus(
        movie_id=movie_id,
        language=language,
        pairs=pairs,
        dropped_source=dropped_source,
        dropped_reference=dropped_reference,
    )


def corpus_stats(corpus: ParallelCorpus) -> CorpusStats:
    """Computes pair count and mean word/character length of the source side."""
    sources = corpus.sources
    return CorpusStats(
        pairs=len(sources),
        avg_words=sum(seg.word_count for seg in sources) / len(sources),
        avg_chars=sum(len(seg.text) for seg in sources) / len(sources),
    )


def corpus_to_jsonl(corpus: ParallelCorpus) -> list[str]:
    """Returns one canonical JSON line per pair: `idx`, `start_ms`, `end_ms`, `src`, `ref`."""
    return [
        json.dumps(
            {
                "idx": src.index,
                "start_ms": src.span.start_ms,
                "end_ms": src.span.end_ms,
                "src": src.text,
                "ref": ref.text,
            },
            ensure_ascii=False,
        )
        for src, ref in corpus.pairs
    ]


def corpus_from_jsonl(
    lines: Iterable[str], movie_id: str = "movie", language: str = "und"
) -> ParallelCorpus:
    """Rebuilds a corpus from canonical JSON lines. Lines carrying a `_meta` key are skipped."""
    pairs = []
    for line in lines:
        if not line.strip():
            continue
        row = json.loads(line)
        if "_meta" in row:
            continue

        span = TimeSpan(start_ms=row["start_ms"], end_ms=row["end_ms"])
        src = SubtitleSegment(index=row["idx"], span=span, text=row["src"], raw_text=row["src"])
        ref = SubtitleSegment(index=row["idx"], span=span, text=row["ref"], raw_text=row["ref"])
        pairs.append((src, ref))

    if not pairs:
        raise EmptyCorpusError(f"no subtitle pairs for {movie_id}/{language}")

    return ParallelCorpus(movie_id=movie_id, language=language, pairs=pairs)
