"""
Model backends for the three roles (describe, summarize, translate).

Backends are cached per profile so every caller sharing a profile shares its concurrency limit.
"""

import threading
from pathlib import Path

from subgrain.backends.base import Backend
from subgrain.backends.http import ChatCompletionBackend
from subgrain.backends.mock import MockBackend
from subgrain.backends.profile import (
    ROLE_DEFAULTS,
    BackendProfile,
    DecodingParams,
    RetryPolicy,
    ScriptRule,
    TransportMode,
)


_BACKENDS: dict[str, Backend] = {}
_LOCK = threading.Lock()


def get_backend(profile: BackendProfile) -> Backend:
    """Returns the shared backend for `profile`, creating it on first use."""
    key = profile.model_dump_json()
    with _LOCK:
        if key not in _BACKENDS:
            backend_cls = MockBackend if profile.is_mock else ChatCompletionBackend
            _BACKENDS[key] = backend_cls(profile)
        return _BACKENDS[key]


def clear_backends() -> None:
    """Drops every cached backend."""
    with _LOCK:
        _BACKENDS.clear()


def complete(
    profile: BackendProfile,
    system_text: str,
    user_text: str,
    raw_text: str | None = None,
) -> str:
    """Sends one prompt to the backend serving `profile` and returns its text."""
    return get_backend(profile).complete(system_text, user_text, raw_text)


def describe_frame(profile: BackendProfile, image_path: Path) -> str:
    """Returns the description of one frame image."""
    return get_backend(profile).describe_frame(image_path)


__all__ = [
    "Backend",
    "BackendProfile",
    "ChatCompletionBackend",
    "DecodingParams",
    "MockBackend",
    "ROLE_DEFAULTS",
    "RetryPolicy",
    "ScriptRule",
    "TransportMode",
    "clear_backends",
    "complete",
    "describe_frame",
    "get_backend",
]
