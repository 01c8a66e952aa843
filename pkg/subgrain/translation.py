"""
Segment translation under the three variants, with prompt provenance.
"""

from subgrain.context.builders import AttrContext, Completer, GapContext, render_translation_prompt
from subgrain.schema import TemplateId, TranslationRecord, Variant
from subgrain.timedtext import SubtitleSegment


def translate_segment(
    segment: SubtitleSegment,
    context: AttrContext | GapContext | None,
    language: str,
    target_language: str,
    variant: Variant,
    translator: Completer,
) -> TranslationRecord:
    """
    Translates one segment and records the exact prompt used.

    A visual variant whose context is missing or empty is rendered with the baseline template
    and flagged as a fallback.

    Parameters:
        segment (SubtitleSegment): the English source segment.
        context (AttrContext | GapContext | None): the visual context. Ignored for the baseline variant.
        language (str): the target language code stored on the record.
        target_language (str): the language name inserted into the prompt.
        variant (Variant): the variant being generated.
        translator (Completer): the translate backend.
    """
    if variant == Variant.BASELINE:
        context = None

    bundle = render_translation_prompt(segment, context, target_language)
    hypothesis = translator.complete(bundle.system_text, bundle.user_text, bundle.to_raw())

    return TranslationRecord(
        idx=segment.index,
        language=language,
        variant=variant,
        provenance=variant,
        hypothesis=hypothesis,
        template_id=bundle.template_id,
        system_text=bundle.system_text,
        user_text=bundle.user_text,
        fallback=(
            variant != Variant.BASELINE
            and bundle.template_id == TemplateId.BASELINE_TRANSLATE
        ),
    )
