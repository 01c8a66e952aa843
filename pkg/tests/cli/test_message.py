import pytest
import typer
from unittest.mock import MagicMock

from rich.console import Console
from rich.panel import Panel

from subgrain.cli.constants import PipelineErrorCodes, StageSuccessCodes
from subgrain.cli.constants.message import ERROR_MSG_MAP, MSG_MAPPER, SUCCESS_MSG_MAP, MessageHandler


UNKNOWN_ERROR = "We didn't account for this!"


@pytest.fixture
def console() -> Console:
    return Console()


@pytest.fixture
def msg_mapper() -> dict:
    return MSG_MAPPER


class TestMessageHandler:
    @pytest.fixture
    def message_handler(self, console, msg_mapper) -> MessageHandler:
        return MessageHandler(console=console, msg_mapper=msg_mapper)

    @staticmethod
    def test_msg_success(message_handler: MessageHandler, console: Console):
        console.print = MagicMock()
        exit_code = MagicMock(exit_code=StageSuccessCodes.TEST_SUCCESS)

        message_handler.msg(exit_code)

        console.print.assert_called_once()
        panel = console.print.call_args[0][0]
        assert isinstance(panel, Panel)
        assert "Test" in panel.renderable
        assert panel.border_style == "bright_green"

    @staticmethod
    def test_msg_success_hidden(message_handler: MessageHandler, console: Console):
        console.print = MagicMock()
        message_handler.msg(MagicMock(exit_code=StageSuccessCodes.PREPARED), no_output=True)

        console.print.assert_not_called()

    @staticmethod
    def test_msg_error(message_handler: MessageHandler, console: Console):
        console.print = MagicMock()
        exit_code = MagicMock(exit_code=PipelineErrorCodes.TEST_ERROR)

        with pytest.raises(typer.Exit) as exc:
            message_handler.msg(exit_code, detail="source.srt:4: bad [type=missing]")

        assert exc.value.exit_code == PipelineErrorCodes.TEST_ERROR.value
        panel = console.print.call_args[0][0]
        assert "Test" in panel.renderable
        assert "Details" in panel.renderable
        assert "source.srt:4" in panel.renderable
        assert panel.border_style == "bright_red"

    @staticmethod
    def test_msg_error_shown_when_hidden(message_handler: MessageHandler, console: Console):
        console.print = MagicMock()

        with pytest.raises(typer.Exit):
            message_handler.msg(MagicMock(exit_code=PipelineErrorCodes.INPUT_NOT_FOUND), no_output=True)

        console.print.assert_called_once()

    @staticmethod
    def test_msg_unknown_error(message_handler: MessageHandler, console: Console):
        console.print = MagicMock()
        exit_code = MagicMock(exit_code=PipelineErrorCodes.UNKNOWN_ERROR)

        with pytest.raises(typer.Exit) as exc:
            message_handler.msg(exit_code)

        assert exc.value.exit_code == 1
        panel = console.print.call_args[0][0]
        assert UNKNOWN_ERROR in panel.renderable
        assert panel.border_style == "bright_red"

    @staticmethod
    def test_msg_unmapped_code(message_handler: MessageHandler, console: Console):
        console.print = MagicMock()

        with pytest.raises(typer.Exit) as exc:
            message_handler.msg(MagicMock(exit_code=12345))

        assert exc.value.exit_code == 1
        assert UNKNOWN_ERROR in console.print.call_args[0][0].renderable


class TestMessageMaps:
    @staticmethod
    def test_every_success_code_mapped():
        assert set(SUCCESS_MSG_MAP) == set(StageSuccessCodes)

    @staticmethod
    def test_every_error_code_mapped():
        assert set(ERROR_MSG_MAP) == set(PipelineErrorCodes) - {PipelineErrorCodes.UNKNOWN_ERROR}
