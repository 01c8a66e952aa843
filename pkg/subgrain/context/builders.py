import re
from typing import Protocol, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic_core import PydanticCustomError

from subgrain.cli.constants import ATTR_CHAR_LIMIT, GAP_CHAR_LIMIT, WINDOW_HALF_MS
from subgrain.context.templates import (
    PromptBundle,
    render_attr_prompt,
    render_baseline_prompt,
    render_gap_prompt,
    render_visual_prompt,
)
from subgrain.core.logger import BaseLogger
from subgrain.timedtext import SubtitleSegment, TimeSpan
from subgrain.timeline import (
    FrameDescription,
    GapSpan,
    Timeline,
    frames_in_gap,
    frames_in_window,
    gap_between,
)


logger = BaseLogger("subgrain.context")

ATTR_TAGS = ("SETTING", "GENDER", "RELATION", "HONORIFIC", "SUMMARY")
ATTR_TAG_PATTERN = re.compile(
    r"\[(%s)\]\s*:?[ \t]*(.*?)(?=\[(?:%s)\]|\Z)" % ("|".join(ATTR_TAGS), "|".join(ATTR_TAGS)),
    re.DOTALL | re.IGNORECASE,
)


class Completer(Protocol):
    def complete(self, system_text: str, user_text: str, raw_text: str | None = None) -> str: ...


class AttrContext(BaseModel):
    """
    Structured scene attributes for one subtitle, summarized from the frames around its start.

    Parameters:
        setting (str): e.g. formal, public, intimate.
        gender (str): speaker/listener gender.
        relation (str): e.g. stranger, family, hostile.
        honorific (str): the suggested register.
        summary (str): a one-sentence scene summary.
        window (TimeSpan): the clamped window the frames came from.
        source_char_count (int): the length of the aggregated descriptions before truncation.
        prompt_chars (int): the number of description characters sent to the summarizer.
        frame_count (int): the number of frames in the window.
        parse_warning (bool): `True` when one or more tags were missing from the summarizer output.
        no_visual (bool): `True` when the window held no frames and the summarizer was skipped.
    """

    setting: str = ""
    gender: str = ""
    relation: str = ""
    honorific: str = ""
    summary: str = ""
    window: TimeSpan
    source_char_count: int = Field(0, ge=0)
    prompt_chars: int = Field(0, ge=0)
    frame_count: int = Field(0, ge=0)
    parse_warning: bool = False
    no_visual: bool = False

    model_config = ConfigDict(frozen=True)

    @property
    def is_empty(self) -> bool:
        return not any(getattr(self, tag.lower()) for tag in ATTR_TAGS)

    def serialize(self) -> str:
        """The five tag lines inserted into the visual translation prompt."""
        return "\n".join(f"[{tag}]: {getattr(self, tag.lower())}" for tag in ATTR_TAGS)


class GapContext(BaseModel):
    """
    A free-text summary of the frames between two consecutive subtitles.

    Parameters:
        text (str): the summary, empty when no frames fell in the gap.
        gap (GapSpan): the gap the frames came from.
        frame_count (int): the number of frames aggregated.
        prompt_chars (int): the number of description characters sent to the summarizer.
    """

    text: str = ""
    gap: GapSpan
    frame_count: int = Field(0, ge=0)
    prompt_chars: int = Field(0, ge=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_text_matches_frames(self) -> Self:
        if bool(self.text) != (self.frame_count > 0):
            raise PydanticCustomError(
                "inconsistent_gap_context",
                "A gap context has text if and only if it aggregated frames (frame_count={count}).",
                dict(count=self.frame_count),
            )
        return self

    @property
    def is_empty(self) -> bool:
        return not self.text

    def serialize(self) -> str:
        return self.text


def aggregate_descriptions(frames: list[FrameDescription]) -> str:
    """Joins cleaned frame descriptions in time order, one per line."""
    return "\n".join(frame.clean_text for frame in frames)


def parse_attr_tags(text: str) -> tuple[dict[str, str], list[str]]:
    """
    Extracts the five attribute tags from summarizer output.

    Returns a `{field: value}` map (missing tags map to `""`) and the list of missing tags.
    The first occurrence of a tag wins.
    """
    values: dict[str, str] = {}
    for match in ATTR_TAG_PATTERN.finditer(text):
        tag = match.group(1).upper()
        if tag not in values:
            values[tag] = " ".join(match.group(2).split())

    missing = [tag for tag in ATTR_TAGS if not values.get(tag)]
    return {tag.lower(): values.get(tag, "") for tag in ATTR_TAGS}, missing


def attr_window(
    segment: SubtitleSegment,
    half_width_ms: int = WINDOW_HALF_MS,
    duration_ms: int | None = None,
) -> TimeSpan:
    """The clamped window centred on the segment start."""
    start = max(0, segment.span.start_ms - half_width_ms)
    end = segment.span.start_ms + half_width_ms
    if duration_ms is not None:
        end = max(start, min(duration_ms, end))
    return TimeSpan(start_ms=start, end_ms=end)


def attr_prompt(
    timeline: Timeline,
    segment: SubtitleSegment,
    target_language: str,
    half_width_ms: int = WINDOW_HALF_MS,
    duration_ms: int | None = None,
) -> tuple[PromptBundle | None, list[FrameDescription], str]:
    """Returns the attribute prompt (or `None` for an empty window), its frames and the untruncated aggregate."""
    frames = frames_in_window(timeline, segment.span.start_ms, half_width_ms, duration_ms)
    if not frames:
        return None, frames, ""

    aggregate = aggregate_descriptions(frames)
    return render_attr_prompt(aggregate, target_language), frames, aggregate


def gap_prompt(timeline: Timeline, gap: GapSpan) -> tuple[PromptBundle | None, list[FrameDescription], str]:
    """Returns the gap prompt (or `None` for an empty gap), its frames and the untruncated aggregate."""
    frames = frames_in_gap(timeline, gap)
    if not frames:
        return None, frames, ""

    aggregate = aggregate_descriptions(frames)
    return (
        render_gap_prompt(aggregate, gap.prev_end_ms // 1000, gap.cur_start_ms // 1000),
        frames,
        aggregate,
    )


def build_attr_context(
    timeline: Timeline,
    segment: SubtitleSegment,
    target_language: str,
    summarizer: Completer,
    half_width_ms: int = WINDOW_HALF_MS,
    duration_ms: int | None = None,
) -> AttrContext:
    """
    Summarizes the frames within `half_width_ms` of the segment start into scene attributes.

    An empty window skips the summarizer and returns an all-empty context flagged `no_visual`.
    Output missing any of the five tags is kept with empty fields and `parse_warning` set.
    """
    window = attr_window(segment, half_width_ms, duration_ms)
    bundle, frames, aggregate = attr_prompt(
        timeline, segment, target_language, half_width_ms, duration_ms
    )

    if bundle is None:
        return AttrContext(window=window, no_visual=True)

    output = summarizer.complete(bundle.system_text, bundle.user_text, bundle.to_raw())
    fields, missing = parse_attr_tags(output)

    if missing:
        logger.warning(
            f"Segment {segment.index}: summarizer output missing tags {', '.join(missing)}"
        )

    return AttrContext(
        **fields,
        window=window,
        source_char_count=len(aggregate),
        prompt_chars=min(len(aggregate), ATTR_CHAR_LIMIT),
        frame_count=len(frames),
        parse_warning=bool(missing),
    )


def build_gap_context(
    timeline: Timeline,
    prev: SubtitleSegment | None,
    cur: SubtitleSegment,
    summarizer: Completer,
) -> GapContext:
    """
    Summarizes the frames between the previous subtitle's end and the current subtitle's start.

    Degenerate or frameless gaps skip the summarizer and return an empty context.
    """
    gap = gap_between(prev, cur)
    bundle, frames, aggregate = gap_prompt(timeline, gap)

    if bundle is None:
        return GapContext(gap=gap)

    output = summarizer.complete(bundle.system_text, bundle.user_text, bundle.to_raw())
    return GapContext(
        text=output.strip(),
        gap=gap,
        frame_count=len(frames),
        prompt_chars=min(len(aggregate), GAP_CHAR_LIMIT),
    )


def render_translation_prompt(
    segment: SubtitleSegment,
    context: AttrContext | GapContext | None,
    target_language: str,
) -> PromptBundle:
    """
    The translation prompt for a segment.

    No context, or an empty one, renders the baseline template. Otherwise the visual template
    receives the serialized context.
    """
    if context is None or context.is_empty:
        return render_baseline_prompt(segment.text, target_language)
    return render_visual_prompt(segment.text, context.serialize(), target_language)
