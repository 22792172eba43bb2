"""Prompt and preamble templates, loaded from editable files in this package.

Pointing ``CUTROOM_TEMPLATE_DIR`` at a directory overrides individual files by
name, so deployments can tune prompts without touching the package.
"""

from __future__ import annotations

import os
from functools import lru_cache
from importlib import resources
from pathlib import Path

import yaml


@lru_cache(maxsize=None)
def _read(name: str, override_dir: str | None) -> str:
    if override_dir:
        candidate = Path(override_dir) / name
        if candidate.exists():
            return candidate.read_text(encoding="utf-8").rstrip("\n")
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8").rstrip("\n")


def load_template(name: str) -> str:
    return _read(name, os.environ.get("CUTROOM_TEMPLATE_DIR"))


@lru_cache(maxsize=None)
def _synonyms(override_dir: str | None) -> dict[str, str]:
    raw = yaml.safe_load(_read("synonyms.yaml", override_dir)) or {}
    return {str(k).lower(): str(v) for k, v in raw.items()}


def load_synonyms() -> dict[str, str]:
    """Lowercased phrase -> canonical action name."""
    return dict(_synonyms(os.environ.get("CUTROOM_TEMPLATE_DIR")))
