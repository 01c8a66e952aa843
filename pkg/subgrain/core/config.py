"""
The run configuration: one JSON file per movie, validated into a `PipelineConfig`.
"""

import json
from pathlib import Path
from typing import Any, Self

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)
from pydantic_core import PydanticCustomError

from subgrain.backends.profile import BackendProfile
from subgrain.cli.conf.checks import subgrain_config_path
from subgrain.cli.constants import (
    CONFIG_FILENAME,
    DEFAULT_FPS,
    DEFAULT_K_LIST,
    DEFAULT_MAX_WORDS,
    DEFAULT_MIN_WORDS,
    LOG_FOLDER_NAME,
    WINDOW_HALF_MS,
    language_name,
)
from subgrain.core.utils import file_digest, stable_hash
from subgrain.exceptions import ConfigNotFoundError, InvalidConfigError
from subgrain.schema import Method, Role, Variant
from subgrain.timeline import DriftModel


class PathsConfig(BaseModel):
    """
    Input and output locations. Relative paths resolve against the config file's folder.

    Parameters:
        srt_source (Path): the English SubRip file.
        srt_reference_per_language (dict[str, Path]): one reference SubRip file per language code.
        frames (Path): a frame-description JSONL file or a folder of `frame_<seconds>.jpg` images.
        workdir (Path): (optional) where artifacts are written. Defaults to `work`.
        segment_scores (dict[str, Path]): (optional) per-language segment score files for `evaluate`.
    """

    srt_source: Path
    srt_reference_per_language: dict[str, Path]
    frames: Path
    workdir: Path = Path("work")
    segment_scores: dict[str, Path] = Field(default_factory=dict)

    def resolve(self, base: Path) -> "PathsConfig":
        def fix(path: Path) -> Path:
            return path if path.is_absolute() else Path(base, path)

        return PathsConfig(
            srt_source=fix(self.srt_source),
            srt_reference_per_language={
                lang: fix(path) for lang, path in self.srt_reference_per_language.items()
            },
            frames=fix(self.frames),
            workdir=fix(self.workdir),
            segment_scores={lang: fix(path) for lang, path in self.segment_scores.items()},
        )


class FilterConfig(BaseModel):
    """Word-count bounds applied to subtitle segments. `max_words=None` disables the upper bound."""

    min_words: int = Field(DEFAULT_MIN_WORDS, ge=1)
    max_words: int | None = DEFAULT_MAX_WORDS

    @model_validator(mode="after")
    def validate_bounds(self) -> Self:
        if self.max_words is not None and self.max_words < self.min_words:
            raise PydanticCustomError(
                "invalid_filter",
                "'max_words' ({max_words}) must be at least 'min_words' ({min_words}).",
                dict(min_words=self.min_words, max_words=self.max_words),
            )
        return self


class SelectiveConfig(BaseModel):
    """The oracle selective budgets, as percentages of the corpus."""

    k_list: list[float] = Field(default_factory=lambda: list(DEFAULT_K_LIST))

    @field_validator("k_list")
    def validate_k_list(cls, k_list: list[float]) -> list[float]:
        for k in k_list:
            if not 0 < k <= 100:
                raise PydanticCustomError(
                    "invalid_k",
                    "'{wrong_value}' is outside (0, 100].",
                    dict(wrong_value=k),
                )
        return sorted(set(k_list))


class BackendsConfig(BaseModel):
    """One backend profile per model role. The describer is only needed for image folders."""

    describe: BackendProfile | None = None
    summarize: BackendProfile
    translate: BackendProfile

    @model_validator(mode="before")
    @classmethod
    def inject_roles(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data

        data = dict(data)
        for role in Role:
            section = data.get(role.value)
            if isinstance(section, dict):
                data[role.value] = {"role": role.value, **section}
        return data


class PipelineConfig(BaseModel):
    """
    The settings for one movie run.

    Parameters:
        movie_id (str): the movie identifier.
        duration_ms (int | None): (optional) the movie length. Clamps context windows and frame totals.
        languages (list[str]): target language codes, e.g. `hin`, `ben`.
        methods (list[Method]): (optional) the visual context methods. Defaults to both.
        paths (PathsConfig): input and output locations.
        window_half_ms (int): (optional) the half-width of attribute windows. Defaults to `150000`.
        fps (float): (optional) the frame sampling rate. Defaults to `1.0`.
        filter (FilterConfig): (optional) word-count bounds.
        backends (BackendsConfig): the model backends.
        selective (SelectiveConfig): (optional) the selective budgets.
        drift (DriftModel | None): (optional) synthetic drift applied to frame timestamps.
        seed (int): (optional) seeds drift jitter and mock digests. Defaults to `0`.
    """

    movie_id: str
    duration_ms: int | None = Field(None, gt=0)
    languages: list[str] = Field(..., min_length=1)
    methods: list[Method] = Field(default_factory=lambda: list(Method))
    paths: PathsConfig
    window_half_ms: int = Field(WINDOW_HALF_MS, gt=0)
    fps: float = Field(DEFAULT_FPS, gt=0)
    filter: FilterConfig = FilterConfig()
    backends: BackendsConfig
    selective: SelectiveConfig = SelectiveConfig()
    drift: DriftModel | None = None
    seed: int = 0

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="before")
    @classmethod
    def share_seed(cls, data: Any) -> Any:
        """Backend sections without their own `seed` take the run seed."""
        if not isinstance(data, dict) or not isinstance(data.get("backends"), dict):
            return data

        data = dict(data)
        backends = dict(data["backends"])
        for role in Role:
            section = backends.get(role.value)
            if isinstance(section, dict):
                backends[role.value] = {"seed": data.get("seed", 0), **section}
        data["backends"] = backends
        return data

    @model_validator(mode="after")
    def validate_references(self) -> Self:
        missing = [
            lang for lang in self.languages if lang not in self.paths.srt_reference_per_language
        ]
        if missing:
            raise PydanticCustomError(
                "missing_reference",
                "No reference subtitles configured for: {missing}.",
                dict(missing=", ".join(missing)),
            )
        return self

    @property
    def workdir(self) -> Path:
        return self.paths.workdir

    @property
    def log_folder(self) -> Path:
        return Path(self.paths.workdir, LOG_FOLDER_NAME)

    def language_name(self, code: str) -> str:
        return language_name(code)

    def variants(self) -> list[Variant]:
        return [Variant.BASELINE, *(method.variant for method in self.methods)]

    def corpus_path(self, language: str) -> Path:
        return Path(self.workdir, f"corpus_{language}.jsonl")

    def timeline_path(self) -> Path:
        return Path(self.workdir, "timeline.jsonl")

    def contexts_path(self, method: Method, language: str) -> Path:
        return Path(self.workdir, f"contexts_{method.value}_{language}.jsonl")

    def translations_path(self, variant: Variant, language: str) -> Path:
        return Path(self.workdir, f"translations_{variant.value}_{language}.jsonl")

    def results_path(self) -> Path:
        return Path(self.workdir, "results.json")

    def stats_path(self) -> Path:
        return Path(self.workdir, "stats.json")

    def with_overrides(self, **overrides: Any) -> "PipelineConfig":
        """Returns a copy with CLI flag overrides applied. `None` values are ignored."""
        data = self.model_dump(mode="json", by_alias=True)

        for key, value in overrides.items():
            if value is None:
                continue
            if key == "k_list":
                data["selective"]["k_list"] = list(value)
            elif key == "seed":
                data["seed"] = value
                for section in data["backends"].values():
                    if section is not None:
                        section["seed"] = value
            elif key == "drift":
                data["drift"] = value.model_dump() if isinstance(value, DriftModel) else value
            else:
                data[key] = value

        return PipelineConfig.model_validate(data)

    # Stage fingerprints: each covers the settings and input file contents its artifact depends on.
    def corpus_hash(self, language: str) -> str:
        return stable_hash(
            {
                "movie_id": self.movie_id,
                "source": str(self.paths.srt_source),
                "source_digest": file_digest(self.paths.srt_source),
                "reference": str(self.paths.srt_reference_per_language[language]),
                "reference_digest": file_digest(self.paths.srt_reference_per_language[language]),
                "filter": self.filter.model_dump(),
                "language": language,
            }
        )

    def timeline_hash(self) -> str:
        describe = self.backends.describe
        return stable_hash(
            {
                "frames": str(self.paths.frames),
                "frames_digest": file_digest(self.paths.frames),
                "drift": self.drift.model_dump() if self.drift else None,
                "seed": self.seed if self.drift else None,
                "describe": describe.fingerprint() if describe else None,
            }
        )

    def contexts_hash(self, method: Method, language: str) -> str:
        return stable_hash(
            {
                "corpus": self.corpus_hash(language),
                "timeline": self.timeline_hash(),
                "method": method.value,
                "window_half_ms": self.window_half_ms if method == Method.ATTR_VC else None,
                "duration_ms": self.duration_ms,
                "summarize": self.backends.summarize.fingerprint(),
            }
        )

    def translations_hash(self, variant: Variant, language: str) -> str:
        upstream = (
            self.corpus_hash(language)
            if variant == Variant.BASELINE
            else self.contexts_hash(Method(variant.value), language)
        )
        return stable_hash(
            {
                "upstream": upstream,
                "variant": variant.value,
                "translate": self.backends.translate.fingerprint(),
            }
        )

    def results_hash(self) -> str:
        return stable_hash(
            {
                "translations": {
                    lang: [self.translations_hash(v, lang) for v in self.variants()]
                    for lang in self.languages
                },
                "scores": {
                    lang: [str(p), file_digest(p)] for lang, p in self.paths.segment_scores.items()
                },
            }
        )


def load_config(path: Path | None = None) -> PipelineConfig:
    """
    Loads and validates a config file. Without a `path`, searches upwards for `subgrain.config.json`.

    Raises:
        ConfigNotFoundError: no config file was found.
        InvalidConfigError: the file is not valid JSON or fails validation.
    """
    path = Path(path) if path is not None else subgrain_config_path()
    if path is None or not path.is_file():
        raise ConfigNotFoundError(f"config file not found: {path or CONFIG_FILENAME}")

    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        config = PipelineConfig.model_validate(data)
    except json.JSONDecodeError as err:
        raise InvalidConfigError(f"{path}:{err.lineno}: {err.msg}") from err
    except ValidationError as err:
        raise InvalidConfigError(f"{path}: {err}") from err

    paths = config.paths.resolve(path.resolve().parent)
    return config.model_copy(update={"paths": paths})
