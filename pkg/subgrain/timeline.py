"""
The sampled frame-description timeline: loading, window and gap queries, frame accounting and drift injection.

A `Timeline` is immutable after loading and every query is read-only.
"""

import json
import math
import random
import re
from bisect import bisect_left, bisect_right
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Self

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    ValidationError,
    computed_field,
    model_validator,
)
from pydantic_core import PydanticCustomError

from subgrain.core.logger import BaseLogger
from subgrain.exceptions import FrameFormatError, InputNotFoundError
from subgrain.timedtext import SubtitleSegment, TimeSpan, normalize_punctuation


logger = BaseLogger("subgrain.timeline")

MS_PER_HOUR = 3_600_000
FRAME_IMAGE = re.compile(r"frame_(\d+)\.jpg")
REPEATED_PUNCTUATION = re.compile(r"([,;:!?])\1+")
TOKEN_EDGE_PUNCTUATION = ".,;:!?\"'"
MAX_REPEAT_NGRAM = 4


class FrameDescription(BaseModel):
    """
    A textual description of one sampled video frame.

    Parameters:
        t_ms (int): the nominal frame timestamp in milliseconds.
        raw_text (str): the description as produced by the describer.
        clean_text (str): the description after cleaning.
    """

    t_ms: int = Field(..., ge=0)
    raw_text: str
    clean_text: str

    model_config = ConfigDict(frozen=True)


class Timeline(BaseModel):
    """An ordered run of frame descriptions with strictly increasing timestamps."""

    frames: tuple[FrameDescription, ...] = ()

    model_config = ConfigDict(frozen=True)

    _times: list[int] = PrivateAttr(default_factory=list)

    @model_validator(mode="after")
    def validate_order(self) -> Self:
        times = [frame.t_ms for frame in self.frames]
        for prev, cur in zip(times, times[1:]):
            if cur <= prev:
                raise PydanticCustomError(
                    "unsorted_timeline",
                    "Frame timestamps must strictly increase ({prev} then {cur}).",
                    dict(prev=prev, cur=cur),
                )
        return self

    def model_post_init(self, __context) -> None:
        self._times = [frame.t_ms for frame in self.frames]

    @property
    def times(self) -> list[int]:
        return self._times


class DriftModel(BaseModel):
    """
    A synthetic temporal drift applied to frame timestamps.

    Parameters:
        offset_ms (int): (optional) a constant shift, may be negative. Defaults to `0`.
        rate_s_per_hour (float): (optional) drift accumulated per hour of movie time. Defaults to `0.0`.
        jitter_ms (int): (optional) half-width of seeded uniform jitter. Defaults to `0`.
    """

    offset_ms: int = 0
    rate_s_per_hour: float = 0.0
    jitter_ms: int = Field(0, ge=0)

    model_config = ConfigDict(frozen=True)

    @property
    def is_identity(self) -> bool:
        return self.offset_ms == 0 and self.rate_s_per_hour == 0 and self.jitter_ms == 0

    def shift(self, t_ms: int, jitter: int = 0) -> int:
        """The drifted timestamp for `t_ms`, clamped at zero."""
        linear = round(self.rate_s_per_hour * t_ms / MS_PER_HOUR * 1000)
        return max(0, t_ms + self.offset_ms + linear + jitter)


class GapSpan(BaseModel):
    """The half-open interval `[prev_end_ms, cur_start_ms)` between two consecutive subtitles."""

    prev_end_ms: int
    cur_start_ms: int

    model_config = ConfigDict(frozen=True)

    @computed_field
    @property
    def degenerate(self) -> bool:
        return self.prev_end_ms >= self.cur_start_ms


def gap_between(prev: SubtitleSegment | None, cur: SubtitleSegment) -> GapSpan:
    """The visual gap before `cur`. The first segment's gap starts at `0`."""
    prev_end = prev.span.end_ms if prev is not None else 0
    return GapSpan(prev_end_ms=prev_end, cur_start_ms=cur.span.start_ms)


def _collapse_repeats(tokens: list[str], max_n: int = MAX_REPEAT_NGRAM) -> list[str]:
    tokens = list(tokens)
    keys = [token.lower().strip(TOKEN_EDGE_PUNCTUATION) for token in tokens]

    i = 0
    while i < len(tokens):
        for n in range(max_n, 0, -1):
            if i + 2 * n <= len(tokens) and keys[i : i + n] == keys[i + n : i + 2 * n]:
                del tokens[i + n : i + 2 * n]
                del keys[i + n : i + 2 * n]
                break
        else:
            i += 1

    return tokens


def clean_description(text: str) -> str:
    """
    Cleans a raw frame description.

    Normalizes punctuation, squeezes repeated punctuation marks and collapses immediately
    repeated phrases of up to four words (case-insensitive, the first occurrence is kept).

    ??? example "Example Usage"
        ```python
        clean_description("the man the man walks")  # "the man walks"
        ```
    """
    text = REPEATED_PUNCTUATION.sub(r"\1", normalize_punctuation(text))

    previous = None
    while previous != text:
        previous = text
        text = " ".join(_collapse_repeats(text.split()))
        text = REPEATED_PUNCTUATION.sub(r"\1", text)

    return text


def build_timeline(entries: Iterable[tuple[int, str]], source: str = "frames") -> Timeline:
    """
    Builds a sorted, cleaned timeline from `(t_ms, raw_text)` entries.

    Raises:
        FrameFormatError: when two entries share a timestamp or a timestamp is negative.
    """
    entries = sorted(entries, key=lambda entry: entry[0])
    for (prev, _), (cur, _) in zip(entries, entries[1:]):
        if prev == cur:
            raise FrameFormatError(f"{source}: duplicate frame timestamp {cur} ms")

    try:
        frames = tuple(
            FrameDescription(t_ms=t_ms, raw_text=text, clean_text=clean_description(text))
            for t_ms, text in entries
        )
    except ValidationError as err:
        raise FrameFormatError(f"{source}: {err.errors()[0]['msg']}")

    return Timeline(frames=frames)


def _read_frame_lines(path: Path) -> list[tuple[int, str]]:
    entries = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError:
                raise FrameFormatError(f"{path}:{line_no}: invalid JSON")

            if "_meta" in row:
                continue

            t_ms, text = row.get("t_ms"), row.get("text", row.get("raw_text"))
            if not isinstance(t_ms, int) or isinstance(t_ms, bool) or not isinstance(text, str):
                raise FrameFormatError(
                    f"{path}:{line_no}: expected {{\"t_ms\": int, \"text\": str}}"
                )
            entries.append((t_ms, text))

    return entries


def list_frame_images(directory: Path) -> list[tuple[int, Path]]:
    """Returns `(t_ms, path)` for every `frame_<seconds>.jpg` in `directory`, ordered by time."""
    images = []
    for path in Path(directory).iterdir():
        match = FRAME_IMAGE.fullmatch(path.name)
        if match:
            images.append((int(match.group(1)) * 1000, path))
    return sorted(images)


def load_frames(path: Path, describer=None) -> Timeline:
    """
    Loads a frame-description timeline.

    `path` is either a JSON Lines file of `{"t_ms": int, "text": str}` objects, or a directory
    of `frame_<seconds>.jpg` images that are described through `describer`.

    Parameters:
        path (Path): the frames file or image directory.
        describer (Backend | None): (optional) a describe-role backend. Required for image directories.

    Raises:
        InputNotFoundError: when `path` does not exist.
        FrameFormatError: on malformed lines, duplicate timestamps or a directory without a describer.
    """
    path = Path(path)
    if not path.exists():
        raise InputNotFoundError(f"frames not found: {path}")

    if path.is_dir():
        if describer is None:
            raise FrameFormatError(f"{path}: an image directory needs a describe backend")

        images = list_frame_images(path)
        descriptions = describer.describe_many([image for _, image in images])
        entries = [(t_ms, text) for (t_ms, _), text in zip(images, descriptions)]
    else:
        entries = _read_frame_lines(path)

    timeline = build_timeline(entries, source=str(path))
    logger.info(f"loaded {len(timeline.frames)} frames from {path}")
    return timeline


def timeline_to_jsonl(timeline: Timeline, cleaned: bool = True) -> list[str]:
    """One JSON line per frame. `cleaned=False` emits the `{"t_ms", "text"}` input format."""
    if cleaned:
        return [frame.model_dump_json() for frame in timeline.frames]
    return [
        json.dumps({"t_ms": frame.t_ms, "text": frame.raw_text}, ensure_ascii=False)
        for frame in timeline.frames
    ]


def timeline_from_jsonl(lines: Iterable[str]) -> Timeline:
    """Rebuilds a timeline from cleaned JSON lines. Lines carrying a `_meta` key are skipped."""
    frames = []
    for line in lines:
        if not line.strip():
            continue
        row = json.loads(line)
        if "_meta" not in row:
            frames.append(FrameDescription.model_validate(row))
    return Timeline(frames=tuple(frames))


def frames_in_window(
    timeline: Timeline,
    center_ms: int,
    half_width_ms: int = 150_000,
    duration_ms: int | None = None,
) -> list[FrameDescription]:
    """
    Returns the frames with `t_ms` in `[max(0, center - half), min(duration, center + half)]`.

    Both bounds are inclusive. The result is a contiguous slice of the timeline.
    """
    if half_width_ms <= 0:
        raise ValueError(f"'half_width_ms' must be positive, got {half_width_ms}")

    low = max(0, center_ms - half_width_ms)
    high = center_ms + half_width_ms
    if duration_ms is not None:
        high = min(duration_ms, high)

    if high < low:
        return []

    times = timeline.times
    return list(timeline.frames[bisect_left(times, low) : bisect_right(times, high)])


def frames_in_gap(timeline: Timeline, gap: GapSpan) -> list[FrameDescription]:
    """Returns the frames with `prev_end_ms <= t_ms < cur_start_ms`. Empty for degenerate gaps."""
    if gap.degenerate:
        return []

    times = timeline.times
    return list(
        timeline.frames[bisect_left(times, gap.prev_end_ms) : bisect_left(times, gap.cur_start_ms)]
    )


def count_frames_in_spans(timeline_fps: float, spans: Iterable[TimeSpan]) -> int:
    """
    Counts the sampling instants `k / fps` (k = 0, 1, 2, ...) inside the union of `spans`.

    Spans are closed intervals; overlapping or touching spans are merged first so no instant
    is counted twice.
    """
    if timeline_fps <= 0:
        raise ValueError(f"'timeline_fps' must be positive, got {timeline_fps}")

    fps = Fraction(str(timeline_fps))
    merged: list[list[int]] = []
    for span in sorted(spans, key=lambda s: (s.start_ms, s.end_ms)):
        if merged and span.start_ms <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], span.end_ms)
        else:
            merged.append([span.start_ms, span.end_ms])

    total = 0
    for start_ms, end_ms in merged:
        first = math.ceil(start_ms * fps / 1000)
        last = math.floor(end_ms * fps / 1000)
        total += max(0, last - first + 1)

    return total


def sampled_frame_total(timeline_fps: float, duration_ms: int) -> int:
    """The number of sampling instants over a whole movie."""
    return count_frames_in_spans(timeline_fps, [TimeSpan(start_ms=0, end_ms=duration_ms)])


def apply_drift(timeline: Timeline, model: DriftModel, seed: int = 0) -> Timeline:
    """
    Shifts every frame by `offset + round(rate * t / 1h) + jitter`.

    Jitter is drawn uniformly from `[-jitter_ms, jitter_ms]` with a `random.Random(seed)`
    stream in timeline order. Negative results clamp to `0`. The output is re-sorted and a
    timestamp equal to its predecessor moves one millisecond later.
    """
    if model.is_identity:
        return timeline

    rng = random.Random(seed)
    shifted = []
    for frame in timeline.frames:
        jitter = rng.randint(-model.jitter_ms, model.jitter_ms) if model.jitter_ms else 0
        shifted.append((model.shift(frame.t_ms, jitter), frame))
    shifted.sort(key=lambda item: (item[0], item[1].t_ms))

    frames = []
    last = -1
    for t_ms, frame in shifted:
        t_ms = max(t_ms, last + 1)
        frames.append(frame.model_copy(update={"t_ms": t_ms}))
        last = t_ms

    return Timeline(frames=tuple(frames))
