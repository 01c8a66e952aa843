from pathlib import Path
from typing import Annotated

import typer
from pydantic import ValidationError

from subgrain.cli.commands.contextualize import Contextualize
from subgrain.cli.commands.drift import Drift
from subgrain.cli.commands.evaluate import Evaluate
from subgrain.cli.commands.prepare import Prepare
from subgrain.cli.commands.report import Report
from subgrain.cli.commands.translate import Translate
from subgrain.cli.constants import console
from subgrain.cli.constants.enums import DeltaRule, ReportFormat
from subgrain.cli.constants.message import MSG_MAPPER, MessageHandler
from subgrain.core.config import PipelineConfig, load_config
from subgrain.exceptions import ConfigNotFoundError, InvalidConfigError, SubgrainError
from subgrain.schema import Method, Variant
from subgrain.timeline import DriftModel


prepare_command = typer.style("prepare", typer.colors.YELLOW)
report_command = typer.style("report", typer.colors.YELLOW)

app = typer.Typer(
    help=f"Welcome to Subgrain! Start a run with {prepare_command} and finish it with {report_command}.",
    rich_markup_mode="rich",
    pretty_exceptions_enable=True,
)

msg_handler = MessageHandler(console, MSG_MAPPER)


ConfigOption = Annotated[
    Path | None,
    typer.Option(
        "--config",
        "-c",
        help="The run config. Defaults to the nearest subgrain.config.json",
        show_default=False,
    ),
]
SeedOption = Annotated[
    int | None,
    typer.Option("--seed", help="Overrides the config 'seed'", show_default=False),
]
WindowOption = Annotated[
    int | None,
    typer.Option(
        "--window-half-ms",
        help="Overrides the config 'window_half_ms'",
        min=1,
        show_default=False,
    ),
]
HideOutputOption = Annotated[
    bool,
    typer.Option("--hide-output", "-ho", help="Suppress console output", is_eager=True),
]


def _config(
    path: Path | None,
    seed: int | None = None,
    window_half_ms: int | None = None,
    **overrides,
) -> PipelineConfig:
    config = load_config(path)
    try:
        return config.with_overrides(seed=seed, window_half_ms=window_half_ms, **overrides)
    except ValidationError as err:
        raise InvalidConfigError(f"invalid override: {err}") from err


def _run(build, hide_output: bool) -> None:
    """Runs a stage and maps its outcome to a message panel and exit status."""
    try:
        build().run()

    except typer.Exit as e:
        msg_handler.msg(e, no_output=hide_output)

    except SubgrainError as err:
        msg_handler.msg(typer.Exit(code=err.code), detail=str(err))


@app.command("prepare")
def prepare(
    config: ConfigOption = None,
    seed: SeedOption = None,
    window_half_ms: WindowOption = None,
    hide_output: HideOutputOption = False,
) -> None:
    """Parses, normalizes and pairs the subtitles and loads the frame timeline."""
    _run(
        lambda: Prepare(_config(config, seed, window_half_ms), no_output=hide_output),
        hide_output,
    )


@app.command("contextualize")
def contextualize(
    method: Annotated[
        Method,
        typer.Option("--method", "-m", help="The visual context method", show_choices=True),
    ],
    config: ConfigOption = None,
    seed: SeedOption = None,
    window_half_ms: WindowOption = None,
    hide_output: HideOutputOption = False,
) -> None:
    """Builds one visual context per segment with <METHOD>. Cached contexts are reused."""
    _run(
        lambda: Contextualize(
            _config(config, seed, window_half_ms), method, no_output=hide_output
        ),
        hide_output,
    )


@app.command("translate")
def translate(
    variant: Annotated[
        Variant,
        typer.Option("--variant", "-v", help="The translation variant", show_choices=True),
    ],
    config: ConfigOption = None,
    seed: SeedOption = None,
    window_half_ms: WindowOption = None,
    hide_output: HideOutputOption = False,
) -> None:
    """Translates every segment with <VARIANT>. Finished segments are reused."""
    _run(
        lambda: Translate(_config(config, seed, window_half_ms), variant, no_output=hide_output),
        hide_output,
    )


@app.command("evaluate")
def evaluate(
    k: Annotated[
        list[float] | None,
        typer.Option("--k", help="A selective budget in percent. Repeatable", show_default=False),
    ] = None,
    config: ConfigOption = None,
    seed: SeedOption = None,
    window_half_ms: WindowOption = None,
    hide_output: HideOutputOption = False,
) -> None:
    """Computes BLEU, chrF++ and COMET for every variant and selective budget."""
    _run(
        lambda: Evaluate(
            _config(config, seed, window_half_ms, k_list=k or None), no_output=hide_output
        ),
        hide_output,
    )


@app.command("report")
def report(
    formats: Annotated[
        list[ReportFormat] | None,
        typer.Option("--format", "-f", help="Table formats to write. Repeatable", show_default=False),
    ] = None,
    condition: Annotated[
        str, typer.Option("--condition", help="The gain matrix condition")
    ] = "sel30",
    rule: Annotated[
        DeltaRule,
        typer.Option(
            "--rule",
            help="How per-movie gains are averaged. 'ratio_of_means' pools COMET across movies first and matches published tables; the default can differ by a few tenths of a percent",
            show_choices=True,
        ),
    ] = DeltaRule.MEAN_OF_RATIOS,
    main_table: Annotated[
        Path | None,
        typer.Option("--main-table", help="An external per-movie results TSV", show_default=False),
    ] = None,
    selective_table: Annotated[
        Path | None,
        typer.Option("--selective-table", help="An external selective COMET TSV", show_default=False),
    ] = None,
    output: Annotated[
        Path | None,
        typer.Option("--output", "-o", help="The report folder. Defaults to <workdir>/report", show_default=False),
    ] = None,
    config: ConfigOption = None,
    seed: SeedOption = None,
    window_half_ms: WindowOption = None,
    hide_output: HideOutputOption = False,
) -> None:
    """Writes the metric tables, language-wise gains and the gain matrix."""

    def build() -> Report:
        try:
            run_config = _config(config, seed, window_half_ms)
        except ConfigNotFoundError:
            if main_table is None:
                raise
            run_config = None

        if run_config is None:
            return Report(
                output or Path("report"),
                main_table=main_table,
                selective_table=selective_table,
                formats=formats,
                condition=condition,
                rule=rule,
                no_output=hide_output,
            )

        return Report(
            output or Path(run_config.workdir, "report"),
            results_path=run_config.results_path(),
            results_hash=run_config.results_hash(),
            main_table=main_table,
            selective_table=selective_table,
            formats=formats,
            condition=condition,
            rule=rule,
            languages=None if main_table else run_config.languages,
            no_output=hide_output,
        )

    _run(build, hide_output)


@app.command("drift")
def drift(
    rate: Annotated[
        float, typer.Option("--rate", help="Drift in seconds per hour of movie time")
    ] = 0.0,
    offset: Annotated[int, typer.Option("--offset", help="A constant shift in ms")] = 0,
    jitter: Annotated[
        int, typer.Option("--jitter", help="Half-width of uniform jitter in ms", min=0)
    ] = 0,
    output: Annotated[
        Path | None,
        typer.Option("--output", "-o", help="Defaults to <workdir>/timeline.drifted.jsonl", show_default=False),
    ] = None,
    config: ConfigOption = None,
    seed: SeedOption = None,
    hide_output: HideOutputOption = False,
) -> None:
    """Writes the frame timeline with synthetic drift applied."""
    _run(
        lambda: Drift(
            _config(config, seed),
            DriftModel(offset_ms=offset, rate_s_per_hour=rate, jitter_ms=jitter),
            output=output,
            no_output=hide_output,
        ),
        hide_output,
    )


if __name__ == "__main__":
    app()
