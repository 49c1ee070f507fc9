"""Shared primitives for modalhistories: numeric policy, errors, logging, states and projector families."""

__version__ = "0.1.0"
