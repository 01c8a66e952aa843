"""
Prompt templates for summarization and translation.

Each template renders a `PromptBundle`. `system_text`/`user_text` serve message-structured servers;
`to_raw()` returns the exact chat-token layout for servers that take pre-formatted strings.
"""

from pydantic import BaseModel, ConfigDict

from subgrain.cli.constants import ATTR_CHAR_LIMIT, GAP_CHAR_LIMIT
from subgrain.schema import TemplateId


CHATML_LAYOUT = (
    "<|im_start|>system\n{system}\n<|im_end|>\n"
    "<|im_start|>user\n{user}\n<|im_end|>\n"
    "<|im_start|>assistant\n"
)

ATTR_LLAMA_LAYOUT = (
    "<|begin_of_text|><|start_header_id|>system<|end_header_id|>\n{system}<|eot_id|>"
    "<|start_header_id|>user<|end_header_id|>\n{user}<|eot_id|>\n"
    "<|start_header_id|>assistant<|end_header_id|>\n"
)

GAP_LLAMA_LAYOUT = (
    "<|begin_of_text|><|start_header_id|>system<|end_header_id|>\n{system}\n<|eot_id|>"
    "<|start_header_id|>user<|end_header_id|>\n{user}\n<|eot_id|>"
    "<|start_header_id|>assistant<|end_header_id|>\n"
)

BASELINE_SYSTEM = (
    "You are a translation expert. Translate dialogue from English to {language}.\n"
    "RULES:\n"
    "- Provide ONLY the translated {language} dialogue.\n"
    "- DO NOT include explanations, or English text."
)
BASELINE_USER = '[SOURCE]: "{text}"\n[TASK]: Translate to {language} dialogue.'

VISUAL_SYSTEM = (
    "You are a cinematic multimodal translator specializing in English-to-{language}.\n"
    'Your goal is to provide a "grounded translation" where the choice of words depends on the visual scene.\n'
    "\n"
    "RULES:\n"
    "1. GENDER: Use the Visual Context to identify speaker/listener gender.\n"
    "2. HONORIFICS: Determine social hierarchy from the scene (Formal vs. Informal).\n"
    "3. LOOSE MEANING: Prioritize emotional intent and natural {language} flow.\n"
    "4. Output ONLY the translated {language} dialogue text. No names, no English."
)
VISUAL_USER = (
    "[VISUAL CONTEXT]: {context}\n"
    '[ENGLISH SOURCE]: "{text}"\n'
    "[TASK]: Based on the visual scene, provide the most natural {language} translation."
)

ATTR_SYSTEM = (
    "Identify these cinematic attributes to guide {language} translation:\n"
    "[SETTING]: (e.g., Formal, Public, Intimate)\n"
    "[GENDER]: (Speaker/Listener gender)\n"
    "[RELATION]: (e.g., Stranger, Family, Hostile)\n"
    "[HONORIFIC]: (language-specific, e.g., APNI/TUMI for Bengali)\n"
    "[SUMMARY]: (One sentence factual summary with emotional intent)\n"
    "Output ONLY these tags."
)
ATTR_USER = "Visual Data: {sample}"

GAP_SYSTEM = (
    "You are a movie analyzer. Summarize the following visual descriptions\n"
    "from {start_sec}s to {end_sec}s of the movie into 2-3 sentences.\n"
    "Focus ONLY on the current location and character actions.\n"
    "Do not use introductory filler."
)
GAP_USER = "Visual Data: {text_blob}"

RAW_LAYOUTS = {
    TemplateId.BASELINE_TRANSLATE: CHATML_LAYOUT,
    TemplateId.VISUAL_TRANSLATE: CHATML_LAYOUT,
    TemplateId.ATTR_SUMMARIZE: ATTR_LLAMA_LAYOUT,
    TemplateId.GAP_SUMMARIZE: GAP_LLAMA_LAYOUT,
}


class PromptBundle(BaseModel):
    """
    A rendered prompt.

    Parameters:
        system_text (str): the system block.
        user_text (str): the user block.
        template_id (TemplateId): the template that produced it.
    """

    system_text: str
    user_text: str
    template_id: TemplateId

    model_config = ConfigDict(frozen=True)

    def to_raw(self) -> str:
        """Returns the prompt in the chat-token layout of its template."""
        return RAW_LAYOUTS[self.template_id].format(
            system=self.system_text, user=self.user_text
        )


def render_attr_prompt(sample: str, target_language: str) -> PromptBundle:
    """The attribute-summarization prompt. Only the first 3,000 characters of `sample` are used."""
    return PromptBundle(
        system_text=ATTR_SYSTEM.format(language=target_language),
        user_text=ATTR_USER.format(sample=sample[:ATTR_CHAR_LIMIT]),
        template_id=TemplateId.ATTR_SUMMARIZE,
    )


def render_gap_prompt(text_blob: str, start_sec: int, end_sec: int) -> PromptBundle:
    """The gap-summarization prompt. Only the first 2,500 characters of `text_blob` are used."""
    return PromptBundle(
        system_text=GAP_SYSTEM.format(start_sec=start_sec, end_sec=end_sec),
        user_text=GAP_USER.format(text_blob=text_blob[:GAP_CHAR_LIMIT]),
        template_id=TemplateId.GAP_SUMMARIZE,
    )


def render_baseline_prompt(text: str, target_language: str) -> PromptBundle:
    return PromptBundle(
        system_text=BASELINE_SYSTEM.format(language=target_language),
        user_text=BASELINE_USER.format(text=text, language=target_language),
        template_id=TemplateId.BASELINE_TRANSLATE,
    )


def render_visual_prompt(text: str, visual_context: str, target_language: str) -> PromptBundle:
    return PromptBundle(
        system_text=VISUAL_SYSTEM.format(language=target_language),
        user_text=VISUAL_USER.format(
            context=visual_context, text=text, language=target_language
        ),
        template_id=TemplateId.VISUAL_TRANSLATE,
    )
