__version__ = "0.1.0"

from loguru import logger

from .models import CHTWSystem
from .dsl import parse, parse_file, serialize
from .services import Simulator, run, step, validate_system

# Library logging stays silent until an application (the CLI) enables it.
logger.disable("chtwsim")

__all__ = [
    "CHTWSystem",
    "Simulator",
    "parse",
    "parse_file",
    "serialize",
    "run",
    "step",
    "validate_system",
    "__version__",
]
