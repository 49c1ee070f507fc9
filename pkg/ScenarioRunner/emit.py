#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
emit.py
=======
Deterministic serialization of result documents.

JSON output has sorted keys and every float rounded to 15 significant
digits (−0.0 written as 0.0), so two runs of the same scenario are
byte-identical. CSV output is the document's ``table`` rendered with pandas.
"""
from __future__ import annotations

import io
import json
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from shared.errors import OutputError

from .schema import KINDS

log = logging.getLogger(__name__)

FORMATS = ("json", "csv")
_FLOAT_FORMAT = ".15g"
_REQUIRED_KEYS = ("scenario", "kind", "status", "tolerance", "result", "table")


def _round(x: float) -> float:
    if not math.isfinite(x):
        raise OutputError(f"non-finite number {x!r} in result document")
    r = float(format(x, _FLOAT_FORMAT))
    return 0.0 if r == 0.0 else r


def canonical(obj: Any) -> Any:
    """Plain JSON types only: tuples → lists, numpy → Python, complex → [re, im]."""
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return canonical(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_round(obj.real), _round(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def to_json(doc: dict[str, Any]) -> str:
    return json.dumps(canonical(doc), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def to_csv(doc: dict[str, Any]) -> str:
    rows = canonical(doc.get("table", []))
    if not rows:
        return ""
    df = pd.DataFrame(rows)
    buf = io.StringIO()
    df.to_csv(buf, index=False, float_format="%.15g", lineterminator="\n")
    return buf.getvalue()


def render(doc: dict[str, Any], fmt: str = "json") -> str:
    if fmt not in FORMATS:
        raise OutputError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    return to_json(doc) if fmt == "json" else to_csv(doc)


def emit(doc: dict[str, Any], fmt: str = "json", destination: str | Path | None = None) -> str:
    """Render *doc* and write it to *destination* (stdout when None). Returns the text."""
    text = render(doc, fmt)
    if destination is None:
        import sys

        sys.stdout.write(text)
        sys.stdout.flush()
        return text
    path = Path(destination)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    log.info("Result written to %s (%s, %d bytes)", path, fmt, len(text.encode("utf-8")))
    return text


def validate_result_document(doc: Any) -> list[str]:
    """Problems with a (parsed) result document; empty when it is well-formed."""
    problems: list[str] = []
    if not isinstance(doc, dict):
        return ["result document must be an object"]
    for key in _REQUIRED_KEYS:
        if key not in doc:
            problems.append(f"{key}: missing")
    if doc.get("kind") not in KINDS:
        problems.append(f"kind: {doc.get('kind')!r} is not a scenario kind")
    if doc.get("status") != "ok":
        problems.append(f"status: expected 'ok', got {doc.get('status')!r}")
    if not isinstance(doc.get("result"), dict):
        problems.append("result: expected an object")
    table = doc.get("table")
    if not isinstance(table, list) or not all(isinstance(r, dict) for r in table):
        problems.append("table: expected a list of row objects")
    elif table:
        cols = set(table[0])
        if any(set(r) != cols for r in table):
            problems.append("table: rows do not share the same columns")
        if "probability" in cols:
            bad = [r["probability"] for r in table if not (0.0 <= r["probability"] <= 1.0)]
            if bad:
                problems.append(f"table: {len(bad)} probability value(s) outside [0, 1]")
    try:
        json.dumps(doc, allow_nan=False)
    except (TypeError, ValueError) as exc:
        problems.append(f"not serializable as strict JSON: {exc}")
    return problems
