from pathlib import Path

import pytest

from subgrain.context.templates import (
    render_attr_prompt,
    render_baseline_prompt,
    render_gap_prompt,
    render_visual_prompt,
)
from subgrain.schema import TemplateId


GOLDEN = Path(__file__).parent.parent / "fixtures" / "golden"

ATTR_CONTEXT = (
    "[SETTING]: Intimate\n"
    "[GENDER]: Male speaker, female listener\n"
    "[RELATION]: Family\n"
    "[HONORIFIC]: TUMI\n"
    "[SUMMARY]: A father comforts his daughter."
)


def golden(name: str) -> str:
    return Path(GOLDEN, f"{name}.txt").read_text(encoding="utf-8")


class TestGoldenPrompts:
    @staticmethod
    def test_baseline():
        bundle = render_baseline_prompt("Where are you going?", "Hindi")
        assert bundle.template_id == TemplateId.BASELINE_TRANSLATE
        assert bundle.to_raw() == golden("baseline_translate")

    @staticmethod
    def test_visual():
        bundle = render_visual_prompt("Don't be afraid.", ATTR_CONTEXT, "Bengali")
        assert bundle.template_id == TemplateId.VISUAL_TRANSLATE
        assert bundle.to_raw() == golden("visual_translate")

    @staticmethod
    def test_attr():
        bundle = render_attr_prompt("a man stands on a ship deck\na woman looks at the sea", "Hindi")
        assert bundle.to_raw() == golden("attr_summarize")

    @staticmethod
    def test_gap():
        bundle = render_gap_prompt("the door opens\na car drives away", 12, 47)
        assert bundle.to_raw() == golden("gap_summarize")


class TestTruncation:
    @staticmethod
    @pytest.mark.parametrize("length", [10, 2999, 3000, 3001, 9000])
    def test_attr_sample(length: int):
        sample = "".join(chr(ord("a") + i % 26) for i in range(length))
        bundle = render_attr_prompt(sample, "Hindi")

        assert bundle.user_text == f"Visual Data: {sample[:3000]}"

    @staticmethod
    @pytest.mark.parametrize("length", [10, 2499, 2500, 2501, 9000])
    def test_gap_blob(length: int):
        blob = "x" * length
        bundle = render_gap_prompt(blob, 0, 10)

        assert bundle.user_text == "Visual Data: " + "x" * min(length, 2500)
