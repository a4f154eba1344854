"""
Model Library - Catalog of the bundled example models

- Model files live in config/models/ (.bp protocols, .vass, .minsky)
- config/models/catalog.json names each model, its kind, and the targets
  the examples are usually asked about
- Add a model by dropping the file and a catalog entry; no code change

Usage:
    from utils.model_library import ModelLibrary

    library = ModelLibrary()
    p = library.protocol("P_prime")      # Protocol
    library.targets("P_prime")           # ["q5"]
"""

import json
from pathlib import Path
from typing import Dict, List, Optional

from infra.logging_setup import get_logger
from minsky_gen import MinskyMachine, load_minsky
from protocol_model import Protocol, load_protocol
from vass import Vass, load_vass

logger = get_logger("model_library")

# Path setup
SCRIPT_DIR = Path(__file__).parent
PROJECT_ROOT = SCRIPT_DIR.parent.parent
MODELS_DIR = PROJECT_ROOT / "config" / "models"

KINDS = ("protocol", "vass", "minsky")


class UnknownModelError(KeyError):
    """No catalog entry with that name (or of that kind)."""


class ModelLibrary:
    """
    Catalog-driven access to the bundled models.

    Attributes:
        models_dir: Directory holding catalog.json and the model files
        catalog: name -> {file, kind, description, targets}
    """

    def __init__(self, models_dir: Optional[Path] = None):
        self.models_dir = Path(models_dir) if models_dir else MODELS_DIR
        self.catalog_path = self.models_dir / "catalog.json"
        self.catalog: Dict[str, Dict] = {}
        self._load_catalog()

    def _load_catalog(self):
        if not self.catalog_path.exists():
            logger.warning("model catalog not found: %s", self.catalog_path)
            return
        with open(self.catalog_path, "r", encoding="utf-8") as f:
            self.catalog = json.load(f).get("models", {})

    def names(self, kind: Optional[str] = None) -> List[str]:
        return [n for n, entry in self.catalog.items() if kind is None or entry.get("kind") == kind]

    def entry(self, name: str, kind: Optional[str] = None) -> Dict:
        entry = self.catalog.get(name)
        if entry is None or (kind is not None and entry.get("kind") != kind):
            raise UnknownModelError(f"no {kind or 'model'} named {name!r} in {self.catalog_path}")
        return entry

    def path(self, name: str) -> Path:
        return self.models_dir / self.entry(name)["file"]

    def targets(self, name: str) -> List[str]:
        return list(self.entry(name).get("targets", []))

    def description(self, name: str) -> str:
        return self.entry(name).get("description", name)

    def protocol(self, name: str) -> Protocol:
        self.entry(name, "protocol")
        return load_protocol(self.path(name))

    def vass(self, name: str) -> Vass:
        self.entry(name, "vass")
        return load_vass(self.path(name))

    def machine(self, name: str) -> MinskyMachine:
        self.entry(name, "minsky")
        return load_minsky(self.path(name))


_library: Optional[ModelLibrary] = None


def get_model_library() -> ModelLibrary:
    """Shared library over the default models directory."""
    global _library
    if _library is None:
        _library = ModelLibrary()
    return _library


def load_example(name: str):
    """Load a bundled model of any kind by catalog name."""
    library = get_model_library()
    kind = library.entry(name).get("kind")
    if kind == "protocol":
        return library.protocol(name)
    if kind == "vass":
        return library.vass(name)
    if kind == "minsky":
        return library.machine(name)
    raise UnknownModelError(f"model {name!r} has unknown kind {kind!r}")
