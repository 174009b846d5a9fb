from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional

import yaml
from loguru import logger
from pydantic import BaseModel, Field, ValidationError

from ..config import get_settings
from ..dsl.parser import ModelDocument, parse_file
from ..models.system import CHTWSystem


class Scenario(BaseModel):
    name: str
    description: str
    model: str
    steps: int = Field(10, ge=0)
    tags: List[str] = Field(default_factory=list)


class ScenarioCatalog:
    """Scenario descriptors (`*.yaml`) pointing at `.chtw` models, relative to the catalog directory."""

    def __init__(self, scenarios_path: Optional[Path | str] = None):
        if scenarios_path is None:
            scenarios_path = get_settings().scenarios_path
        self.scenarios_path = Path(scenarios_path)
        self._scenarios: Dict[str, Scenario] = {}
        self._load_scenarios()

    def _load_scenarios(self) -> None:
        if not self.scenarios_path.exists():
            logger.warning("Scenario directory not found at {}", self.scenarios_path)
            return

        for yaml_file in sorted(self.scenarios_path.glob("*.yaml")):
            try:
                with open(yaml_file, "r", encoding="utf-8") as f:
                    scenario = Scenario(**yaml.safe_load(f))
                self._scenarios[scenario.name] = scenario
            except (OSError, yaml.YAMLError, TypeError, ValidationError) as e:
                logger.warning("Failed to load scenario {}: {}", yaml_file, e)

    def get_scenario(self, name: str) -> Optional[Scenario]:
        return self._scenarios.get(name)

    def list_scenarios(self) -> List[str]:
        return list(self._scenarios.keys())

    def model_path(self, name: str) -> Path:
        scenario = self._scenarios.get(name)
        if scenario is None:
            raise KeyError(f"Unknown scenario {name!r}")
        return self.scenarios_path / scenario.model

    def load_document(self, name: str) -> ModelDocument:
        return parse_file(self.model_path(name))

    def load_system(self, name: str) -> CHTWSystem:
        return self.load_document(name).system
