"""
Backend profiles and decoding parameters. Settings come from the `backends.<role>` config sections.
"""

import os
from enum import StrEnum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_core import PydanticCustomError

from subgrain.cli.constants import API_KEY_ENV_PREFIX
from subgrain.schema import Role


MOCK_PREFIX = "mock:"
MOCK_NAMES = ("echo", "hash", "scripted")


class TransportMode(StrEnum):
    """How prompts travel to the server."""

    CHAT = "chat"
    RAW = "raw"


class DecodingParams(BaseModel):
    """
    Decoding settings forwarded to the model server.

    Parameters:
        max_new_tokens (int): the generation budget.
        greedy (bool): (optional) disables sampling. Defaults to `True`.
        repetition_penalty (float): (optional) must be at least `1.0`. Defaults to `1.0`.
        temperature (float): (optional) defaults to `1.0`.
        top_p (float): (optional) defaults to `1.0`.
    """

    max_new_tokens: int = Field(..., gt=0)
    greedy: bool = True
    repetition_penalty: float = Field(1.0, ge=1.0)
    temperature: float = 1.0
    top_p: float = 1.0

    model_config = ConfigDict(frozen=True)


ROLE_DEFAULTS: dict[Role, DecodingParams] = {
    Role.TRANSLATE: DecodingParams(max_new_tokens=100, repetition_penalty=1.1),
    Role.SUMMARIZE: DecodingParams(max_new_tokens=256),
    Role.DESCRIBE: DecodingParams(max_new_tokens=256),
}


class RetryPolicy(BaseModel):
    """Retry settings for transient failures."""

    attempts: int = Field(3, ge=1)
    backoff_ms: int = Field(500, ge=0)

    model_config = ConfigDict(frozen=True)


class ScriptRule(BaseModel):
    """A scripted mock answer returned when the prompt contains `contains`."""

    contains: str
    response: str

    model_config = ConfigDict(frozen=True)


class BackendProfile(BaseModel):
    """
    Everything needed to reach one model role.

    Parameters:
        role (Role): the model role.
        endpoint (str): an `http(s)://` URL or `mock:<name>` with name in `echo`, `hash`, `scripted`.
        model_name (str): (optional) the model name sent to the server. Config key `model`.
        params (DecodingParams): (optional) decoding settings. Role defaults fill anything omitted.
        max_concurrency (int): (optional) the in-flight request limit. Defaults to `4`.
        timeout_ms (int): (optional) the request timeout. Defaults to `60000`.
        retry (RetryPolicy): (optional) retry settings for transient failures.
        mode (TransportMode): (optional) `chat` sends messages, `raw` sends the pre-formatted prompt.
        script (tuple[ScriptRule, ...]): (optional) ordered rules for `mock:scripted`.
        seed (int): (optional) mixed into mock digests. Defaults to `0`.
    """

    role: Role
    endpoint: str
    model_name: str = Field("mock", alias="model")
    params: DecodingParams
    max_concurrency: int = Field(4, ge=1)
    timeout_ms: int = Field(60_000, gt=0)
    retry: RetryPolicy = RetryPolicy()
    mode: TransportMode = TransportMode.CHAT
    script: tuple[ScriptRule, ...] = ()
    seed: int = 0

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @model_validator(mode="before")
    @classmethod
    def fold_decoding_keys(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data

        data = dict(data)
        try:
            role = Role(data.get("role"))
        except ValueError:
            return data

        params = ROLE_DEFAULTS[role].model_dump()
        given = data.get("params") or {}
        params.update(given.model_dump() if isinstance(given, DecodingParams) else given)

        for key in DecodingParams.model_fields:
            if key in data:
                params[key] = data.pop(key)

        data["params"] = params
        return data

    @field_validator("endpoint")
    def validate_endpoint(cls, endpoint: str) -> str:
        if endpoint.startswith(MOCK_PREFIX):
            if endpoint.removeprefix(MOCK_PREFIX) not in MOCK_NAMES:
                raise PydanticCustomError(
                    "invalid_mock",
                    "Unknown mock backend '{wrong_value}'. Options: mock:echo, mock:hash, mock:scripted.",
                    dict(wrong_value=endpoint),
                )
            return endpoint

        if not endpoint.startswith(("http://", "https://")):
            raise PydanticCustomError(
                "invalid_endpoint",
                "'{wrong_value}' is not an http(s) URL or a mock backend.",
                dict(wrong_value=endpoint),
            )
        return endpoint

    @property
    def is_mock(self) -> bool:
        return self.endpoint.startswith(MOCK_PREFIX)

    @property
    def mock_name(self) -> str | None:
        return self.endpoint.removeprefix(MOCK_PREFIX) if self.is_mock else None

    @property
    def api_key(self) -> str | None:
        """The API key from `SUBGRAIN_API_KEY_<ROLE>`, if set."""
        return os.environ.get(f"{API_KEY_ENV_PREFIX}{self.role.value.upper()}")

    def fingerprint(self) -> dict:
        """The settings that change model output. Excludes transport tuning."""
        return self.model_dump(
            mode="json", exclude={"max_concurrency", "timeout_ms", "retry"}
        )
