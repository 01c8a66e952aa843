from pathlib import Path

from subgrain.backends import get_backend
from subgrain.cli.commands.base import PipelineStage
from subgrain.cli.constants import StageSuccessCodes
from subgrain.core.config import PipelineConfig
from subgrain.core.utils import write_jsonl
from subgrain.timeline import DriftModel, apply_drift, load_frames, timeline_to_jsonl


DRIFTED_FILENAME = "timeline.drifted.jsonl"


class Drift(PipelineStage):
    """
    Re-emits the frame timeline with synthetic drift for the `drift` command.

    The output uses the frame input format, so it can replace `paths.frames` in a new run.
    """

    success_code = StageSuccessCodes.DRIFTED

    def __init__(
        self,
        config: PipelineConfig,
        model: DriftModel,
        output: Path | None = None,
        no_output: bool = False,
        test_logging: bool = False,
    ) -> None:
        super().__init__(config, no_output=no_output, test_logging=test_logging)
        self.model = model
        self.output = Path(output) if output is not None else Path(config.workdir, DRIFTED_FILENAME)

    def run(self) -> None:
        describe = self.config.backends.describe
        describer = get_backend(describe) if describe is not None else None

        timeline = load_frames(self.config.paths.frames, describer)
        drifted = apply_drift(timeline, self.model, seed=self.config.seed)
        write_jsonl(self.output, timeline_to_jsonl(drifted, cleaned=False))

        self.logger.stdout.info(
            f"drifted {len(drifted.frames)} frames with {self.model.model_dump()} (seed {self.config.seed}) to {self.output}"
        )
        self.show(f"Drifted {len(drifted.frames)} frames -> [yellow]{self.output}[/yellow]")
        self.complete()
