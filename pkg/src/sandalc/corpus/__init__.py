"""Bundled example models exercising the full pipeline."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

MODEL_NAMES = (
    "pingpong",
    "2pc_nofault",
    "2pc_timeout",
    "2pc_drop",
    "2pc_shutdown",
    "2pc_allfaults",
)


def corpus() -> dict[str, Path]:
    """Map model name to the path of its bundled .sandal file."""
    root = resources.files(__package__)
    return {name: Path(str(root / f"{name}.sandal")) for name in MODEL_NAMES}


def corpus_source(name: str) -> str:
    return (resources.files(__package__) / f"{name}.sandal").read_text()
