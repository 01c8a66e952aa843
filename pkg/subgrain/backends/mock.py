import hashlib
from pathlib import Path

from subgrain.backends.base import Backend
from subgrain.timeline import FRAME_IMAGE


class MockBackend(Backend):
    """
    A deterministic offline backend.

    - `mock:echo` answers `ECHO:<user_text>`.
    - `mock:hash` answers a digest of (seed, role, prompt).
    - `mock:scripted` answers the first rule whose `contains` appears in the prompt, else the digest.
    """

    def _digest(self, *parts: str) -> str:
        payload = "\x1f".join([str(self.profile.seed), self.profile.role.value, *parts])
        digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()
        return f"MOCK-{self.profile.role.value}-{digest[:16]}"

    def _complete(self, system_text: str, user_text: str, raw_text: str | None) -> str:
        name = self.profile.mock_name

        if name == "echo":
            return f"ECHO:{user_text}"

        if name == "scripted":
            prompt = "\n".join([system_text, user_text, raw_text or ""])
            for rule in self.profile.script:
                if rule.contains in prompt:
                    return rule.response

        return self._digest(system_text, user_text)

    def _describe(self, image_path: Path) -> str:
        match = FRAME_IMAGE.fullmatch(image_path.name)
        label = match.group(1) if match else image_path.stem
        return f"mock description of frame {label}"
