"""
Run results and the reporting artifacts built from them: metric tables, language-wise COMET
gains and the per-movie gain matrix.
"""

import csv
import io
import json
import re
from pathlib import Path
from statistics import fmean
from typing import Iterable

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator
from pydantic_core import PydanticCustomError

from subgrain.cli.constants import language_name
from subgrain.cli.constants.enums import DeltaRule, ReportFormat
from subgrain.core.logger import BaseLogger
from subgrain.core.utils import META_KEY
from subgrain.exceptions import InputNotFoundError, ScoreFormatError, ScoringError
from subgrain.schema import Method
from subgrain.scoring.metrics import MetricTriple


logger = BaseLogger("subgrain.report")

FULL = "full"
CONDITION_PATTERN = re.compile(r"full|sel(\d+(?:\.\d+)?)")
METRICS = ("bleu", "chrfpp", "comet")
COLUMN_PATTERN = re.compile(
    r"(?P<method>%s)_(?P<condition>full|sel\d+(?:\.\d+)?)_(?P<metric>%s)"
    % ("|".join(m.value for m in Method), "|".join(METRICS))
)
GAIN_HEADER = ("movie", "language", "delta")


def condition_sort_key(condition: str) -> tuple[int, float]:
    """`full` first, then selective budgets in ascending order."""
    if condition == FULL:
        return (0, 0.0)
    return (1, float(condition.removeprefix("sel")))


class RunResult(BaseModel):
    """
    Corpus metrics for one (movie, language, method, condition).

    Parameters:
        movie_id (str): the movie identifier.
        language (str): the target language code.
        method (Method): the visual context method.
        condition (str): `full` or `sel<k>`.
        metrics (MetricTriple): the scores under this condition.
        baseline (MetricTriple): the text-only scores for the same movie and language.
    """

    movie_id: str
    language: str
    method: Method
    condition: str
    metrics: MetricTriple
    baseline: MetricTriple

    model_config = ConfigDict(frozen=True)

    @field_validator("condition")
    def validate_condition(cls, condition: str) -> str:
        if not CONDITION_PATTERN.fullmatch(condition):
            raise PydanticCustomError(
                "invalid_condition",
                "'{wrong_value}' is not 'full' or 'sel<k>'.",
                dict(wrong_value=condition),
            )
        return condition

    @property
    def key(self) -> tuple[str, str, Method, str]:
        return (self.movie_id, self.language, self.method, self.condition)

    @property
    def delta_percent(self) -> float | None:
        """The relative COMET change over the baseline, in percent. `None` for a zero baseline."""
        return relative_change(self.metrics.comet, self.baseline.comet)


class LanguageSummary(BaseModel):
    """The average COMET change for one language, method and condition across movies."""

    language: str
    method: Method
    condition: str
    delta_percent: float | None
    movies: int = Field(..., ge=1)

    model_config = ConfigDict(frozen=True)

    @property
    def display(self) -> str:
        return format_delta(self.delta_percent)


class GainCell(BaseModel):
    """
    One cell of the gain matrix.

    `delta` is `None` when either method has no result for the condition.
    """

    movie_id: str
    language: str
    delta: float | None = None
    best_method: Method | None = None
    missing: tuple[Method, ...] = ()

    model_config = ConfigDict(frozen=True)


RESULTS_ADAPTER = TypeAdapter(list[RunResult])


def relative_change(value: float, base: float) -> float | None:
    """`100 * (value - base) / base`, or `None` when `base` is zero."""
    if base == 0:
        return None
    return 100 * (value - base) / base


def format_delta(value: float | None) -> str:
    """A signed one-decimal percentage. Values that round to zero print as `0.0%`, `None` prints empty."""
    if value is None:
        return ""
    rounded = round(value, 1)
    if rounded == 0:
        return "0.0%"
    return f"{rounded:+.1f}%"


def check_unique(results: Iterable[RunResult]) -> list[RunResult]:
    """Returns `results` as a list, rejecting repeated (movie, language, method, condition) keys."""
    seen = set()
    unique = []
    for result in results:
        if result.key in seen:
            raise ScoringError(f"duplicate result for {result.key}")
        seen.add(result.key)
        unique.append(result)
    return unique


def build_language_summary(
    results: Iterable[RunResult],
    rule: DeltaRule = DeltaRule.MEAN_OF_RATIOS,
    languages: Iterable[str] | None = None,
) -> list[LanguageSummary]:
    """
    Averages COMET gains per (language, method, condition) over the movies that have that language.

    Parameters:
        results (Iterable[RunResult]): the run results.
        rule (DeltaRule): (optional) `mean_of_ratios` averages per-movie relative deltas;
            `ratio_of_means` compares mean COMET with mean baseline COMET. Defaults to `mean_of_ratios`.
        languages (Iterable[str] | None): (optional) the expected languages and their order.
            Languages without results are omitted with a warning.
    """
    results = check_unique(results)

    groups: dict[tuple[str, Method, str], list[RunResult]] = {}
    for result in results:
        groups.setdefault((result.language, result.method, result.condition), []).append(result)

    order = list(dict.fromkeys(languages)) if languages is not None else []
    for result in results:
        if result.language not in order and languages is None:
            order.append(result.language)

    present = {language for language, _, _ in groups}
    for language in order:
        if language not in present:
            logger.warning(f"No results for language '{language}', omitted from the summary")

    summaries = []
    for (language, method, condition), members in groups.items():
        if language not in order:
            continue

        if rule == DeltaRule.RATIO_OF_MEANS:
            delta = relative_change(
                fmean(r.metrics.comet for r in members), fmean(r.baseline.comet for r in members)
            )
        else:
            ratios = [r.delta_percent for r in members]
            delta = None if None in ratios else fmean(ratios)

        if delta is None:
            logger.warning(
                f"Zero baseline COMET for {language}/{method.value}/{condition}, gain left empty"
            )

        summaries.append(
            LanguageSummary(
                language=language,
                method=method,
                condition=condition,
                delta_percent=delta,
                movies=len(members),
            )
        )

    methods = list(Method)
    return sorted(
        summaries,
        key=lambda s: (order.index(s.language), methods.index(s.method), condition_sort_key(s.condition)),
    )


def build_gain_matrix(results: Iterable[RunResult], condition: str = "sel30") -> list[GainCell]:
    """
    The best absolute COMET gain per (movie, language) under `condition`, over both methods.

    Cells missing a method are kept with `delta=None` and the missing methods listed.
    """
    results = check_unique(results)

    by_cell: dict[tuple[str, str], dict[Method, RunResult]] = {}
    for result in results:
        cell = by_cell.setdefault((result.movie_id, result.language), {})
        if result.condition == condition:
            cell[result.method] = result

    cells = []
    for (movie_id, language), found in sorted(by_cell.items()):
        missing = tuple(method for method in Method if method not in found)
        if missing:
            logger.warning(
                f"Gain matrix cell {movie_id}/{language} lacks {', '.join(m.value for m in missing)}"
            )
            cells.append(GainCell(movie_id=movie_id, language=language, missing=missing))
            continue

        gains = {
            method: result.metrics.comet - result.baseline.comet
            for method, result in found.items()
        }
        best = max(Method, key=lambda method: gains[method])
        cells.append(
            GainCell(movie_id=movie_id, language=language, delta=gains[best], best_method=best)
        )

    return cells


def gain_matrix_csv(cells: Iterable[GainCell]) -> str:
    """The gain matrix as CSV with header `movie,language,delta`. Missing cells have an empty delta."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(GAIN_HEADER)
    for cell in cells:
        delta = "" if cell.delta is None else f"{cell.delta:.4f}"
        writer.writerow([cell.movie_id, cell.language, delta])
    return buffer.getvalue()


def _conditions(results: list[RunResult]) -> list[str]:
    found = {result.condition for result in results} | {FULL}
    return sorted(found, key=condition_sort_key)


def table_columns(conditions: list[str]) -> list[str]:
    """Baseline triple first, then each method's triple per condition."""
    columns = ["movie", "language", *(f"baseline_{metric}" for metric in METRICS)]
    for method in Method:
        for condition in conditions:
            columns.extend(f"{method.value}_{condition}_{metric}" for metric in METRICS)
    return columns


def _format_metric(metric: str, value: float | None) -> str:
    if value is None:
        return ""
    return f"{value:.4f}" if metric == "comet" else f"{value:.2f}"


def table_rows(results: list[RunResult], conditions: list[str]) -> list[list[str]]:
    """One row per (movie, language), sorted, with empty cells for missing results."""
    grouped: dict[tuple[str, str], dict[tuple[Method, str], RunResult]] = {}
    for result in results:
        grouped.setdefault((result.movie_id, result.language), {})[
            (result.method, result.condition)
        ] = result

    rows = []
    for (movie_id, language), cell in sorted(grouped.items()):
        baseline = next(iter(cell.values())).baseline
        row = [movie_id, language]
        row.extend(_format_metric(metric, getattr(baseline, metric)) for metric in METRICS)

        for method in Method:
            for condition in conditions:
                result = cell.get((method, condition))
                row.extend(
                    _format_metric(metric, getattr(result.metrics, metric) if result else None)
                    for metric in METRICS
                )
        rows.append(row)

    return rows


def render_tables(results: Iterable[RunResult], format: ReportFormat) -> str:
    """
    Renders the per-movie metric table.

    Columns mirror the results layout: the baseline triple, then each method's triple for
    `full` and every selective condition present. Rows are sorted by (movie, language).
    `json` renders the results themselves and can be read back with `load_results`.
    """
    results = check_unique(results)
    format = ReportFormat(format)

    if format == ReportFormat.JSON:
        ordered = sorted(
            results,
            key=lambda r: (r.movie_id, r.language, list(Method).index(r.method), condition_sort_key(r.condition)),
        )
        return json.dumps([r.model_dump(mode="json") for r in ordered], indent=2) + "\n"

    conditions = _conditions(results)
    columns = table_columns(conditions)
    rows = table_rows(results, conditions)

    if format == ReportFormat.TSV:
        return "".join("\t".join(line) + "\n" for line in [columns, *rows])

    lines = [
        "| " + " | ".join(columns) + " |",
        "|" + "|".join("---" for _ in columns) + "|",
    ]
    lines.extend("| " + " | ".join(cell or "-" for cell in row) + " |" for row in rows)
    return "\n".join(lines) + "\n"


def render_language_summary(
    summaries: Iterable[LanguageSummary],
    format: ReportFormat = ReportFormat.MARKDOWN,
) -> str:
    """Renders the language x (method, condition) table of signed percentages."""
    summaries = list(summaries)
    format = ReportFormat(format)

    if format == ReportFormat.JSON:
        rows = [
            {**s.model_dump(mode="json"), "display": s.display}
            for s in summaries
        ]
        return json.dumps(rows, indent=2) + "\n"

    columns = sorted(
        {(s.method, s.condition) for s in summaries},
        key=lambda c: (list(Method).index(c[0]), condition_sort_key(c[1])),
    )
    languages = list(dict.fromkeys(s.language for s in summaries))
    cells = {(s.language, s.method, s.condition): s.display for s in summaries}

    header = ["language", *(f"{method.value} {condition}" for method, condition in columns)]
    rows = [
        [language_name(lang), *(cells.get((lang, m, c), "") for m, c in columns)]
        for lang in languages
    ]

    if format == ReportFormat.TSV:
        return "".join("\t".join(line) + "\n" for line in [header, *rows])

    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines.extend("| " + " | ".join(cell or "-" for cell in row) + " |" for row in rows)
    return "\n".join(lines) + "\n"


def _read_document(source: str | Path) -> list | dict:
    if isinstance(source, Path):
        if not source.is_file():
            raise InputNotFoundError(f"results file not found: {source}")
        source = source.read_text(encoding="utf-8")
    return json.loads(source)


def results_document(results: Iterable[RunResult], artifact: str, config_hash: str) -> str:
    """The results file written by `evaluate`: a `_meta` stamp plus the results."""
    payload = {
        META_KEY: {"artifact": artifact, "config_hash": config_hash},
        "results": json.loads(render_tables(results, ReportFormat.JSON)),
    }
    return json.dumps(payload, indent=2) + "\n"


def results_meta(source: str | Path) -> dict | None:
    """The `_meta` stamp of a results document, if it has one."""
    document = _read_document(source)
    return document.get(META_KEY) if isinstance(document, dict) else None


def load_results(source: str | Path) -> list[RunResult]:
    """Reads results rendered as JSON, or a results document, from a string or a file path."""
    document = _read_document(source)
    if isinstance(document, dict):
        document = document.get("results", [])

    return check_unique(RESULTS_ADAPTER.validate_python(document))


def _parse_value(raw: str | None, where: str) -> float | None:
    if raw is None or raw.strip() == "":
        return None
    try:
        return float(raw)
    except ValueError as err:
        raise ScoreFormatError(f"{where}: '{raw}' is not a number") from err


def _read_tsv(path: Path) -> list[dict[str, str]]:
    path = Path(path)
    if not path.is_file():
        raise InputNotFoundError(f"results table not found: {path}")

    reader = csv.DictReader(io.StringIO(path.read_text(encoding="utf-8")), delimiter="\t")
    for required in ("movie", "language", "baseline_comet"):
        if required not in (reader.fieldnames or []):
            raise ScoreFormatError(f"{path}: missing column '{required}'")
    return list(reader)


def _table_triples(path: Path) -> dict[tuple[str, str], dict]:
    """Maps (movie, language) to the baseline triple and each (method, condition) triple."""
    table: dict[tuple[str, str], dict] = {}
    for line_no, row in enumerate(_read_tsv(path), start=2):
        where = f"{path}:{line_no}"
        cell = table.setdefault((row["movie"], row["language"]), {})

        cell["baseline"] = {
            metric: _parse_value(row.get(f"baseline_{metric}"), where) for metric in METRICS
        }
        for column, raw in row.items():
            match = COLUMN_PATTERN.fullmatch(column or "")
            if not match:
                continue
            value = _parse_value(raw, where)
            if value is None:
                continue
            key = (match["method"], match["condition"])
            cell.setdefault(key, {})[match["metric"]] = value

    return table


def ingest_result_tables(main_tsv: Path, selective_tsv: Path | None = None) -> list[RunResult]:
    """
    Builds run results from published-style result tables.

    `main_tsv` holds the baseline triple and per-method triples (`<method>_<condition>_<metric>`
    columns). `selective_tsv` holds selective COMET columns; where both tables give a selective
    COMET, the selective table wins and the main table's BLEU/chrF++ are kept.
    """
    main = _table_triples(main_tsv)
    if selective_tsv is not None:
        for cell_key, cell in _table_triples(selective_tsv).items():
            target = main.setdefault(cell_key, {"baseline": cell["baseline"]})
            for key, triple in cell.items():
                if key == "baseline":
                    continue
                target.setdefault(key, {}).update(triple)

    results = []
    for (movie_id, language), cell in sorted(main.items()):
        if cell["baseline"].get("comet") is None:
            raise ScoreFormatError(f"no baseline COMET for {movie_id}/{language}")
        baseline = MetricTriple(**cell["baseline"])

        for key, triple in cell.items():
            if key == "baseline" or triple.get("comet") is None:
                continue
            method, condition = key
            results.append(
                RunResult(
                    movie_id=movie_id,
                    language=language,
                    method=Method(method),
                    condition=condition,
                    metrics=MetricTriple(**triple),
                    baseline=baseline,
                )
            )

    return check_unique(results)
