#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
loader.py
=========
Read a scenario file and validate it before anything is computed.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from shared.errors import ScenarioSchemaError

from .schema import validate_scenario

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScenarioFile:
    kind: str
    name: str
    document: dict[str, Any]
    source: Path | None = None


def scenario_from_document(doc: Any, source: Path | None = None) -> ScenarioFile:
    validate_scenario(doc)
    name = doc.get("name") or (source.stem if source is not None else doc["kind"])
    return ScenarioFile(kind=doc["kind"], name=name, document=doc, source=source)


def load_scenario(path: str | Path) -> ScenarioFile:
    """Parse and validate *path*; unreadable or malformed files raise ScenarioSchemaError."""
    path = Path(path)
    log.info("Loading scenario from %s", path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as exc:
        raise ScenarioSchemaError([f"cannot read {path}: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ScenarioSchemaError([f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})"]) from exc
    scenario = scenario_from_document(doc, source=path)
    log.debug("Scenario %r (kind=%s) validated", scenario.name, scenario.kind)
    return scenario
