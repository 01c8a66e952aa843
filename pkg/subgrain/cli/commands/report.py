from pathlib import Path

import typer

from subgrain.cli.constants import StageSuccessCodes, console
from subgrain.cli.constants.display import language_summary_table
from subgrain.cli.constants.enums import Artifact, DeltaRule, ReportFormat
from subgrain.core.logger import set_loggers
from subgrain.exceptions import ArtifactMismatchError
from subgrain.report import (
    RunResult,
    build_gain_matrix,
    build_language_summary,
    check_unique,
    gain_matrix_csv,
    ingest_result_tables,
    load_results,
    render_language_summary,
    render_tables,
    results_meta,
)


class Report:
    """Writes the metric tables, language summary and gain matrix for the `report` command."""

    def __init__(
        self,
        output_dir: Path,
        results_path: Path | None = None,
        results_hash: str | None = None,
        main_table: Path | None = None,
        selective_table: Path | None = None,
        formats: list[ReportFormat] | None = None,
        condition: str = "sel30",
        rule: DeltaRule = DeltaRule.MEAN_OF_RATIOS,
        languages: list[str] | None = None,
        no_output: bool = False,
        test_logging: bool = False,
    ) -> None:
        self.output_dir = Path(output_dir)
        self.results_path = results_path
        self.results_hash = results_hash
        self.main_table = main_table
        self.selective_table = selective_table
        self.formats = formats or list(ReportFormat)
        self.condition = condition
        self.rule = DeltaRule(rule)
        self.languages = languages
        self.no_output = no_output

        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.logger = set_loggers(Path(self.output_dir, "logs"), testing=test_logging)

    def collect(self) -> list[RunResult]:
        """Gathers results from the evaluate stage and any external tables."""
        results = []

        if self.results_path is not None and self.results_path.is_file():
            meta = results_meta(self.results_path) or {}
            if meta.get("artifact") != Artifact.RESULTS or (
                self.results_hash is not None and meta.get("config_hash") != self.results_hash
            ):
                raise ArtifactMismatchError(
                    f"{self.results_path} was produced by a different configuration. Re-run `evaluate`."
                )
            results.extend(load_results(self.results_path))
        elif self.results_path is not None:
            self.logger.stdout.warning(f"{self.results_path} not found, reporting external tables only")

        if self.main_table is not None:
            results.extend(ingest_result_tables(self.main_table, self.selective_table))

        return check_unique(results)

    def write(self, name: str, text: str) -> Path:
        path = Path(self.output_dir, name)
        path.write_text(text, encoding="utf-8")
        self.logger.stdout.info(f"wrote {path}")
        return path

    def run(self) -> None:
        results = self.collect()
        summaries = build_language_summary(results, rule=self.rule, languages=self.languages)

        for format in self.formats:
            self.write(f"results{format.suffix}", render_tables(results, format))
            self.write(
                f"language_summary{format.suffix}", render_language_summary(summaries, format)
            )

        self.write("gain_matrix.csv", gain_matrix_csv(build_gain_matrix(results, self.condition)))

        if not self.no_output and summaries:
            lines = render_language_summary(summaries, ReportFormat.TSV).splitlines()
            header, *rows = [line.split("\t") for line in lines]
            console.print(language_summary_table(rows, header))

        raise typer.Exit(code=StageSuccessCodes.REPORTED)
