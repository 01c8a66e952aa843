import typer

from subgrain.cli.constants import StageSuccessCodes, console
from subgrain.core.config import PipelineConfig
from subgrain.core.logger import set_loggers


class PipelineStage:
    """Shared plumbing for the stage commands: work directory, stage loggers and console output."""

    success_code: StageSuccessCodes = StageSuccessCodes.TEST_SUCCESS

    def __init__(
        self,
        config: PipelineConfig,
        no_output: bool = False,
        test_logging: bool = False,
    ) -> None:
        self.config = config
        self.no_output = no_output

        self.config.workdir.mkdir(parents=True, exist_ok=True)
        self.logger = set_loggers(self.config.log_folder, testing=test_logging)

    def show(self, renderable) -> None:
        if not self.no_output:
            console.print(renderable)

    def complete(self) -> None:
        """Ends the stage with its success code."""
        raise typer.Exit(code=self.success_code)
