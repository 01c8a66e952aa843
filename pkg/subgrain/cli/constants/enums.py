from enum import StrEnum


class ReportFormat(StrEnum):
    """The table formats the report stage can write."""

    TSV = "tsv"
    MARKDOWN = "markdown"
    JSON = "json"

    @property
    def suffix(self) -> str:
        return {"tsv": ".tsv", "markdown": ".md", "json": ".json"}[self.value]


class DeltaRule(StrEnum):
    """How per-movie COMET gains are averaged per language."""

    MEAN_OF_RATIOS = "mean_of_ratios"
    RATIO_OF_MEANS = "ratio_of_means"


class Artifact(StrEnum):
    """Artifact kinds stamped into the `_meta` line of each file."""

    CORPUS = "corpus"
    TIMELINE = "timeline"
    CONTEXTS = "contexts"
    TRANSLATIONS = "translations"
    RESULTS = "results"
