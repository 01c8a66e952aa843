from enum import Enum
import textwrap

import typer
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel

from subgrain.cli.constants import (
    ERROR_GUIDE_URL,
    FAIL,
    GITHUB_ISSUES_URL,
    MAGIC,
    ROOT_COMMAND,
    PipelineErrorCodes,
    StageSuccessCodes,
)


MORE_HELP_INFO = f"""
[dark_goldenrod]Need more help?[/dark_goldenrod]
  Check our [bright_blue][link={ERROR_GUIDE_URL}]Error Message Guide[/link][/bright_blue].

[red]Really stuck?[/red]
  Report the issue [bright_blue][link={GITHUB_ISSUES_URL}]on GitHub[/link][/bright_blue].
"""

MISSING_CONFIG = f"""
Is there a [magenta]subgrain.config.json[/magenta] in this directory or a parent,
or did you pass one with [yellow]{ROOT_COMMAND} <command> --config <path>[/yellow]?
"""

INVALID_CONFIG = """
The configuration file failed validation. Check the keys and values named below.
"""

MISSING_INPUT = f"""
An input file is missing. Check the [magenta]paths[/magenta] section of your config,
or run the upstream stage first ([yellow]{ROOT_COMMAND} prepare[/yellow]).
"""

PARSE_FAILED = """
An input file could not be parsed. The file and line are named below.
"""

EMPTY_CORPUS = """
No subtitle pairs survived parsing, filtering and pairing.
"""

BACKEND_FAILED = """
A model backend failed. Check the endpoint, the API key variable and the server logs.
"""

SCORES_INVALID = """
A segment score file is malformed. Each line must be [cyan]{"idx": int, "variant": str, "score": float}[/cyan].
"""

SCORES_MISSING = """
Segment scores are missing for a required variant or segment.
"""

ARTIFACT_MISMATCH = """
An artifact was produced with a different configuration. Re-run the upstream stage.
"""

STAGE_INCOMPLETE = """
Some segments did not complete. Finished segments were saved; re-run the command to resume.
"""

UNKNOWN_ERROR = f"""
{FAIL} 🥴 Well this is awkward... We didn't account for this! 🥴 {FAIL}

You've encountered something unexpected 🤯. Please report this issue on [bright_blue][link={GITHUB_ISSUES_URL}]GitHub[/link][/bright_blue].
"""


def error_msg_with_checks(title: str, desc: str) -> str:
    """Formats error messages that have a title and a list of checks."""
    return textwrap.dedent(f"\n{FAIL} [bright_red]{title}[/bright_red] {FAIL}\n") + desc


def success_msg_with_checks(title: str, desc: str, icon: str = MAGIC) -> str:
    """Formats success messages that have a title and a list of checks."""
    return (
        textwrap.dedent(f"\n{icon} [bright_green]{title}[/bright_green] {icon}\n")
        + desc
    )


SUCCESS_MSG_MAP = {
    StageSuccessCodes.TEST_SUCCESS: success_msg_with_checks("Test", desc=""),
    StageSuccessCodes.PREPARED: success_msg_with_checks(
        "Inputs prepared!", desc=f"\nNext: [yellow]{ROOT_COMMAND} contextualize --method <>[/yellow]\n"
    ),
    StageSuccessCodes.CONTEXTUALIZED: success_msg_with_checks(
        "Visual contexts built!", desc=f"\nNext: [yellow]{ROOT_COMMAND} translate --variant <>[/yellow]\n"
    ),
    StageSuccessCodes.TRANSLATED: success_msg_with_checks(
        "Translations written!", desc=f"\nNext: [yellow]{ROOT_COMMAND} evaluate[/yellow]\n"
    ),
    StageSuccessCodes.EVALUATED: success_msg_with_checks(
        "Evaluation complete!", desc=f"\nNext: [yellow]{ROOT_COMMAND} report[/yellow]\n"
    ),
    StageSuccessCodes.REPORTED: success_msg_with_checks("Reports written!", desc=""),
    StageSuccessCodes.DRIFTED: success_msg_with_checks(
        "Drifted timeline written!",
        desc="\nPoint [magenta]paths.frames[/magenta] at it to run a misalignment experiment.\n",
    ),
}

ERROR_MSG_MAP = {
    PipelineErrorCodes.TEST_ERROR: error_msg_with_checks("Test", desc=""),
    PipelineErrorCodes.CONFIG_NOT_FOUND: error_msg_with_checks("Config not found!", MISSING_CONFIG),
    PipelineErrorCodes.INVALID_CONFIG: error_msg_with_checks("Invalid config!", INVALID_CONFIG),
    PipelineErrorCodes.INPUT_NOT_FOUND: error_msg_with_checks("Input not found!", MISSING_INPUT),
    PipelineErrorCodes.PARSE_ERROR: error_msg_with_checks("Parse error!", PARSE_FAILED),
    PipelineErrorCodes.EMPTY_CORPUS: error_msg_with_checks("Empty corpus!", EMPTY_CORPUS),
    PipelineErrorCodes.BACKEND_FAILURE: error_msg_with_checks("Backend failure!", BACKEND_FAILED),
    PipelineErrorCodes.SCORES_INVALID: error_msg_with_checks("Invalid scores!", SCORES_INVALID),
    PipelineErrorCodes.SCORES_MISSING: error_msg_with_checks("Missing scores!", SCORES_MISSING),
    PipelineErrorCodes.ARTIFACT_MISMATCH: error_msg_with_checks(
        "Artifact mismatch!", ARTIFACT_MISMATCH
    ),
    PipelineErrorCodes.STAGE_INCOMPLETE: error_msg_with_checks(
        "Stage incomplete!", STAGE_INCOMPLETE
    ),
}

MSG_MAPPER = {
    **SUCCESS_MSG_MAP,
    **ERROR_MSG_MAP,
}


class MessageHandler:
    """Handles all the error and success messages for the CLI."""

    def __init__(self, console: Console, msg_mapper: dict[Enum, str]) -> None:
        self.console = console
        self.msg_mapper = msg_mapper

    @staticmethod
    def __error_msg(msg: str, e: typer.Exit, detail: str) -> Panel:
        """Handles error messages and returns a panel with their information."""
        err_str = "[cyan]Error code[/cyan]"
        error_code = f"\n{err_str}: {e.exit_code.value}\n"
        details = f"\n[yellow]Details[/yellow]: {escape(detail)}\n" if detail else ""

        return Panel(
            msg + details + MORE_HELP_INFO + error_code,
            expand=False,
            border_style="bright_red",
        )

    @staticmethod
    def __success_msg(msg: str, e: typer.Exit) -> Panel:
        """Handles success messages and returns a panel with their information."""
        return Panel(msg, expand=False, border_style="bright_green")

    def msg(self, e: typer.Exit, detail: str = "", no_output: bool = False) -> None:
        """
        Prints a success or error panel for the code received.

        Error codes end the process with their enum value as the exit status.
        """
        msg = UNKNOWN_ERROR
        try:
            if e.exit_code not in self.msg_mapper.keys():
                e.exit_code = PipelineErrorCodes.UNKNOWN_ERROR

            msg = textwrap.dedent(self.msg_mapper.get(e.exit_code, UNKNOWN_ERROR))

        except (AttributeError, TypeError):
            e.exit_code = PipelineErrorCodes.UNKNOWN_ERROR

        is_error = isinstance(e.exit_code, PipelineErrorCodes)

        if msg != "" and not (no_output and not is_error):
            panel = self.__error_msg(msg, e, detail) if is_error else self.__success_msg(msg, e)
            self.console.print(panel)

        if is_error:
            raise typer.Exit(code=e.exit_code.value)
