#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
config.py
=========
Numeric policy: every tolerance and cap used by the computation modules,
collected in one immutable value that is passed explicitly.

The only environment override is MODAL_MAX_DIM (loaded from .env by the
root main.py via python-dotenv).
"""
from __future__ import annotations

import os
from dataclasses import dataclass, replace
from typing import Any


# =========================
# Environment
# =========================
ENV_MAX_DIM = "MODAL_MAX_DIM"


def get_max_dim(default: int = 4096) -> int:
    """Read the total-dimension cap from the environment."""
    raw = os.getenv(ENV_MAX_DIM)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_MAX_DIM} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{ENV_MAX_DIM} must be positive, got {value}")
    return value


# =========================
# Policy
# =========================

@dataclass(frozen=True)
class NumericPolicy:
    """Tolerances and caps. Defaults follow the documented invariants."""
    hermitian_tol: float = 1e-12
    projector_tol: float = 1e-10
    unitary_tol: float = 1e-10
    trace_tol: float = 1e-10
    eig_floor: float = -1e-10
    norm_tol: float = 1e-12
    reconstruction_tol: float = 1e-9
    rank_cutoff: float = 1e-12
    degeneracy_tol: float = 1e-9
    definite_tol: float = 1e-9
    consistency_tol: float = 1e-10

    max_dim: int = 4096
    max_histories: int = 1_000_000
    max_leaves: int = 4096
    exhaustive_point_cap: int = 8
    sample_count: int = 64
    seed: int = 20240101

    parallel: bool = False
    workers: int = 4

    @classmethod
    def from_env(cls) -> "NumericPolicy":
        return cls(max_dim=get_max_dim(cls.max_dim))

    @classmethod
    def from_args(cls, args: Any) -> "NumericPolicy":
        """Build from environment, then overlay CLI flags that were given."""
        policy = cls.from_env()
        overrides: dict[str, Any] = {}
        tol = getattr(args, "tol", None)
        if tol is not None:
            overrides["consistency_tol"] = float(tol)
        if getattr(args, "parallel", False):
            overrides["parallel"] = True
        workers = getattr(args, "workers", None)
        if workers:
            overrides["workers"] = int(workers)
        return replace(policy, **overrides) if overrides else policy

    def with_overrides(self, **changes: Any) -> "NumericPolicy":
        unknown = set(changes) - set(self.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown policy fields: {sorted(unknown)}")
        return replace(self, **changes)


DEFAULT_POLICY = NumericPolicy()


def resolve(policy: NumericPolicy | None) -> NumericPolicy:
    return DEFAULT_POLICY if policy is None else policy
