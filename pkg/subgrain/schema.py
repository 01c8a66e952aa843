from enum import StrEnum

from pydantic import BaseModel, ConfigDict


class Variant(StrEnum):
    """The translation variants of a run."""

    BASELINE = "baseline"
    ATTR_VC = "attr_vc"
    INTER_VS = "inter_vs"

    @classmethod
    def values(cls) -> list[str]:
        """Returns a list of the enum values."""
        return [variant.value for variant in cls]


class Method(StrEnum):
    """The visual context summarization methods."""

    ATTR_VC = "attr_vc"
    INTER_VS = "inter_vs"

    @property
    def variant(self) -> Variant:
        return Variant(self.value)


class Role(StrEnum):
    """The three model roles a backend can serve."""

    DESCRIBE = "describe"
    SUMMARIZE = "summarize"
    TRANSLATE = "translate"


class TemplateId(StrEnum):
    """The prompt templates."""

    ATTR_SUMMARIZE = "attr_summarize"
    GAP_SUMMARIZE = "gap_summarize"
    BASELINE_TRANSLATE = "baseline_translate"
    VISUAL_TRANSLATE = "visual_translate"


class TranslationRecord(BaseModel):
    """
    The hypothesis for one segment under one variant, with the prompt that produced it.

    Parameters:
        idx (int): the segment index.
        language (str): the target language code.
        variant (Variant): the variant the record was generated for.
        provenance (Variant): the variant whose output this record carries. Differs from
            `variant` only after selective replacement.
        hypothesis (str): the model output.
        template_id (TemplateId): the template used to build the prompt.
        system_text (str): the exact system block sent.
        user_text (str): the exact user block sent.
        fallback (bool): `True` when a visual variant fell back to the baseline prompt
            because its context was empty.
    """

    idx: int
    language: str
    variant: Variant
    provenance: Variant
    hypothesis: str
    template_id: TemplateId
    system_text: str
    user_text: str
    fallback: bool = False

    model_config = ConfigDict(frozen=True)
