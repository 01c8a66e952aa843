import pytest
from pydantic import ValidationError

from subgrain.schema import Method, TemplateId, TranslationRecord, Variant


class TestVariant:
    @staticmethod
    def test_values():
        assert Variant.values() == ["baseline", "attr_vc", "inter_vs"]

    @staticmethod
    @pytest.mark.parametrize("method", list(Method))
    def test_method_variant(method: Method):
        assert method.variant.value == method.value


class TestTranslationRecord:
    @staticmethod
    def test_frozen():
        record = TranslationRecord(
            idx=1,
            language="hin",
            variant="attr_vc",
            provenance="baseline",
            hypothesis="x",
            template_id="baseline_translate",
            system_text="s",
            user_text="u",
        )

        assert record.template_id == TemplateId.BASELINE_TRANSLATE
        with pytest.raises(ValidationError):
            record.hypothesis = "y"

    @staticmethod
    def test_unknown_variant():
        with pytest.raises(ValidationError):
            TranslationRecord(
                idx=1,
                language="hin",
                variant="full",
                provenance="baseline",
                hypothesis="x",
                template_id="baseline_translate",
                system_text="s",
                user_text="u",
            )
