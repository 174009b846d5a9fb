from pathlib import Path

import pytest
from dotenv import load_dotenv
from loguru import logger

from chtwsim.config import get_settings
from chtwsim.models import CHTWSystem

from tests.factories import chain_system, feedback_point_system

# Load .env file before any tests run
env_path = Path(__file__).parent.parent / ".env"
if env_path.exists():
    load_dotenv(env_path)

GALLERY = Path(__file__).parent.parent / "scenarios"
MODELS = GALLERY / "models"


@pytest.fixture(autouse=True)
def reset_logging_and_settings():
    """The CLI installs loguru sinks on the runner's streams and caches settings; undo both."""
    get_settings.cache_clear()
    yield
    logger.remove()
    logger.disable("chtwsim")
    get_settings.cache_clear()


@pytest.fixture
def gallery() -> Path:
    return GALLERY


@pytest.fixture
def models_dir() -> Path:
    return MODELS


@pytest.fixture
def feedback() -> CHTWSystem:
    return feedback_point_system()


@pytest.fixture
def chain() -> CHTWSystem:
    return chain_system()


@pytest.fixture
def write_model(tmp_path):
    def _write(text: str, name: str = "model.chtw") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
