import shutil
from pathlib import Path

import pytest

from subgrain.backends import clear_backends
from subgrain.timedtext import SubtitleSegment, TimeSpan


FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def segment():
    def _segment(index: int, start_ms: int, end_ms: int, text: str = "hello there") -> SubtitleSegment:
        return SubtitleSegment(
            index=index,
            span=TimeSpan(start_ms=start_ms, end_ms=end_ms),
            text=text,
            raw_text=text,
        )

    return _segment


@pytest.fixture
def movie_dir(tmp_path: Path) -> Path:
    """A writable copy of the synthetic movie fixture."""
    target = Path(tmp_path, "movie")
    shutil.copytree(Path(FIXTURES, "movie"), target)
    return target


@pytest.fixture(autouse=True)
def reset_backends():
    clear_backends()
    yield
    clear_backends()
