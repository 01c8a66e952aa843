from enum import Enum

from rich.console import Console


console = Console()

# Core URLs
GITHUB_ROOT = "https://github.com/subgrain/subgrain"
GITHUB_ISSUES_URL = f"{GITHUB_ROOT}/issues"
ERROR_GUIDE_URL = f"{GITHUB_ROOT}#troubleshooting"

ROOT_COMMAND = "subgrain"
CONFIG_FILENAME = "subgrain.config.json"
API_KEY_ENV_PREFIX = "SUBGRAIN_API_KEY_"

LOG_FOLDER_NAME = "logs"

# Custom print emoji's
FAIL = "[red]❌[/red]"
MAGIC = ":sparkles:"

# Pipeline defaults
WINDOW_HALF_MS = 150_000
ATTR_CHAR_LIMIT = 3000
GAP_CHAR_LIMIT = 2500
DEFAULT_FPS = 1.0
DEFAULT_K_LIST = [20.0, 30.0]
DEFAULT_MIN_WORDS = 1
DEFAULT_MAX_WORDS = 40

LANGUAGE_NAMES = {
    "hin": "Hindi",
    "ben": "Bengali",
    "tel": "Telugu",
    "tam": "Tamil",
    "kan": "Kannada",
}


def language_name(code: str) -> str:
    """Returns the display name for a language code. Unknown codes pass through unchanged."""
    return LANGUAGE_NAMES.get(code, code)


class StageSuccessCodes(Enum):
    TEST_SUCCESS = -2
    PREPARED = 10
    CONTEXTUALIZED = 11
    TRANSLATED = 12
    EVALUATED = 13
    REPORTED = 14
    DRIFTED = 15


class PipelineErrorCodes(Enum):
    TEST_ERROR = 99
    UNKNOWN_ERROR = 1
    CONFIG_NOT_FOUND = 2
    INVALID_CONFIG = 3
    INPUT_NOT_FOUND = 4
    PARSE_ERROR = 5
    EMPTY_CORPUS = 6
    BACKEND_FAILURE = 7
    SCORES_INVALID = 8
    SCORES_MISSING = 9
    ARTIFACT_MISMATCH = 10
    STAGE_INCOMPLETE = 11
