import threading
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path

from subgrain.backends.profile import BackendProfile
from subgrain.core.logger import BaseLogger
from subgrain.exceptions import (
    BackendHardError,
    EmptyOutputError,
    EmptyPromptError,
    InputNotFoundError,
    RetriableBackendError,
)
from subgrain.schema import Role


logger = BaseLogger("subgrain.backends")


class Backend(ABC):
    """
    A model backend bound to one profile.

    Safe for concurrent use. A bounded semaphore keeps in-flight requests at or below
    `profile.max_concurrency`; transient failures are retried `profile.retry.attempts` times.
    """

    def __init__(self, profile: BackendProfile) -> None:
        self.profile = profile
        self._slots = threading.BoundedSemaphore(profile.max_concurrency)
        self._lock = threading.Lock()

        self.calls = 0
        self.in_flight = 0
        self.peak_in_flight = 0

    @contextmanager
    def _slot(self):
        with self._slots:
            with self._lock:
                self.calls += 1
                self.in_flight += 1
                self.peak_in_flight = max(self.peak_in_flight, self.in_flight)
            try:
                yield
            finally:
                with self._lock:
                    self.in_flight -= 1

    def _with_retry(self, request, label: str) -> str:
        retry = self.profile.retry
        for attempt in range(1, retry.attempts + 1):
            try:
                with self._slot():
                    return request()
            except RetriableBackendError as err:
                if attempt == retry.attempts:
                    raise BackendHardError(
                        f"{label} failed after {retry.attempts} attempts: {err}"
                    ) from err

                logger.warning(f"{label} attempt {attempt} failed ({err}), retrying")
                time.sleep(retry.backoff_ms * attempt / 1000)

    def complete(self, system_text: str, user_text: str, raw_text: str | None = None) -> str:
        """
        Returns the model completion for a prompt.

        Parameters:
            system_text (str): the system block.
            user_text (str): the user block.
            raw_text (str | None): (optional) the fully formatted prompt, used by `raw` transport.

        Raises:
            BackendHardError: non-2xx answers, or transient failures that outlived their retries.
            EmptyPromptError: every prompt part is empty.
            EmptyOutputError: an empty completion.
        """
        if not (system_text or user_text or raw_text):
            raise EmptyPromptError(f"{self.profile.role.value}: cannot complete an empty prompt")

        label = f"{self.profile.role.value}@{self.profile.endpoint}"
        text = self._with_retry(lambda: self._complete(system_text, user_text, raw_text), label)

        if not text or not text.strip():
            raise EmptyOutputError(f"{label} returned an empty completion")
        return text.strip()

    def describe_frame(self, image_path: Path) -> str:
        """Returns one description for the image at `image_path`."""
        if self.profile.role != Role.DESCRIBE:
            raise ValueError(f"'{self.profile.role.value}' backends cannot describe frames.")

        image_path = Path(image_path)
        if not image_path.is_file():
            raise InputNotFoundError(f"frame image not found: {image_path}")

        label = f"describe@{self.profile.endpoint}"
        text = self._with_retry(lambda: self._describe(image_path), label)

        if not text or not text.strip():
            raise EmptyOutputError(f"{label} returned an empty description for {image_path.name}")
        return text.strip()

    def describe_many(self, image_paths: list[Path]) -> list[str]:
        """Describes a batch of images. Results keep the input order."""
        with ThreadPoolExecutor(max_workers=self.profile.max_concurrency) as pool:
            return list(pool.map(self.describe_frame, image_paths))

    @abstractmethod
    def _complete(self, system_text: str, user_text: str, raw_text: str | None) -> str:
        pass

    @abstractmethod
    def _describe(self, image_path: Path) -> str:
        pass
