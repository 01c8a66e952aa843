from subgrain.context.builders import (
    AttrContext,
    GapContext,
    build_attr_context,
    build_gap_context,
    parse_attr_tags,
    render_translation_prompt,
)
from subgrain.context.templates import PromptBundle


__all__ = [
    "AttrContext",
    "GapContext",
    "PromptBundle",
    "build_attr_context",
    "build_gap_context",
    "parse_attr_tags",
    "render_translation_prompt",
]
