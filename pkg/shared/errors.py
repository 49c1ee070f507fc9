#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
errors.py
=========
Exception hierarchy shared by every subproject.

The CLI maps each class to its own exit code (see main.ExitCode), so the
classes carry whatever payload the summary line needs.
"""
from __future__ import annotations

from typing import Any


class ModalError(Exception):
    """Base class for every domain error raised by this project."""


class ShapeError(ModalError):
    """Dimensions do not fit together (factor list vs. matrix size, etc.)."""


class ValidationError(ModalError, ValueError):
    """A value violates its invariant (non-Hermitian, non-unitary, unnormalized...)."""


class CapacityError(ModalError):
    """A configured cap (dimension, history count, leaf count) would be exceeded."""

    def __init__(self, what: str, count: int, cap: int) -> None:
        self.what = what
        self.count = count
        self.cap = cap
        super().__init__(f"{what}: {count} exceeds cap {cap}")


class DisjointnessError(ModalError):
    """Factor sets that must be disjoint overlap."""


class CausalityError(ModalError):
    """A slice holds timelike pairs, or content or a record chain leaves its lightcone."""


class HistoryError(ModalError):
    """Bad history indices or an impossible marginalization."""


class ScenarioError(ModalError, ValueError):
    """Scenario builder parameters are inconsistent."""


class ReinterferenceError(ModalError):
    """Branch-relative histories refused because environment records overlap."""

    def __init__(self, report: dict[str, Any]) -> None:
        self.report = report
        super().__init__(
            "branch tree is not decoherent: max environment overlap "
            f"{report.get('max_overlap', float('nan')):.3e} > tol {report.get('tol', float('nan')):.1e}"
        )


class ScenarioSchemaError(ModalError):
    """A scenario document failed schema validation."""

    def __init__(self, problems: list[str]) -> None:
        self.problems = list(problems)
        super().__init__("; ".join(self.problems) or "invalid scenario")


class OutputError(ModalError):
    """The result destination cannot be written."""
