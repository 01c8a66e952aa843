import base64
from pathlib import Path

import requests

from subgrain.backends.base import Backend
from subgrain.backends.profile import TransportMode
from subgrain.exceptions import BackendHardError, RetriableBackendError


BODY_EXCERPT_CHARS = 200
DESCRIBE_INSTRUCTION = "Describe this movie frame in one or two sentences."


class ChatCompletionBackend(Backend):
    """
    A JSON-over-HTTP client for chat-completion style servers.

    `chat` mode posts `messages` (system + user); `raw` mode posts the pre-formatted `prompt`.
    Decoding parameters are forwarded unchanged.
    """

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.profile.api_key:
            headers["Authorization"] = f"Bearer {self.profile.api_key}"
        return headers

    def _decoding(self) -> dict:
        params = self.profile.params
        return {
            "max_tokens": params.max_new_tokens,
            **params.model_dump(),
        }

    def payload(self, system_text: str, user_text: str, raw_text: str | None = None) -> dict:
        """Returns the JSON body sent for a prompt."""
        body = {"model": self.profile.model_name, **self._decoding()}

        if self.profile.mode == TransportMode.RAW:
            body["prompt"] = raw_text if raw_text is not None else f"{system_text}\n{user_text}"
        else:
            body["messages"] = [
                {"role": "system", "content": system_text},
                {"role": "user", "content": user_text},
            ]
        return body

    def _post(self, body: dict) -> dict:
        try:
            response = requests.post(
                self.profile.endpoint,
                json=body,
                headers=self._headers(),
                timeout=self.profile.timeout_ms / 1000,
            )
        except (requests.Timeout, requests.ConnectionError) as err:
            raise RetriableBackendError(f"{type(err).__name__}: {err}") from err

        if not response.ok:
            raise BackendHardError(
                f"HTTP {response.status_code} from {self.profile.endpoint}: "
                f"{response.text[:BODY_EXCERPT_CHARS]}"
            )

        try:
            return response.json()
        except ValueError as err:
            raise BackendHardError(
                f"Non-JSON response from {self.profile.endpoint}: {response.text[:BODY_EXCERPT_CHARS]}"
            ) from err

    def _extract(self, data: dict) -> str:
        try:
            choice = data["choices"][0]
            if self.profile.mode == TransportMode.RAW and "text" in choice:
                return choice["text"] or ""
            return choice["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as err:
            raise BackendHardError(f"Unexpected response shape: {str(data)[:BODY_EXCERPT_CHARS]}") from err

    def _complete(self, system_text: str, user_text: str, raw_text: str | None) -> str:
        return self._extract(self._post(self.payload(system_text, user_text, raw_text)))

    def _describe(self, image_path: Path) -> str:
        encoded = base64.b64encode(image_path.read_bytes()).decode("ascii")
        body = {
            "model": self.profile.model_name,
            **self._decoding(),
            "messages": [
                {
                    "role": "user",
                    "content": [
                        {"type": "text", "text": DESCRIBE_INSTRUCTION},
                        {
                            "type": "image_url",
                            "image_url": {"url": f"data:image/jpeg;base64,{encoded}"},
                        },
                    ],
                }
            ],
        }
        data = self._post(body)
        try:
            return data["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as err:
            raise BackendHardError(f"Unexpected response shape: {str(data)[:BODY_EXCERPT_CHARS]}") from err
