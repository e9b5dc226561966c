"""Python front end to the pchaos C++ core.

Experiment runners return the same report dictionaries the command-line tool
writes, parsed from JSON.
"""

import json

from . import _pchaos
from ._pchaos import (
    NormalizationError,
    SupportError,
    block_I2,
    block_norms,
    criterion_families,
    derive_seed,
    ou_linear_variance,
    sample_pattern,
    thm8_constants,
)

__version__ = _pchaos.version()

__all__ = [
    "NormalizationError",
    "SupportError",
    "block_I2",
    "block_norms",
    "criterion",
    "criterion_families",
    "derive_seed",
    "ou_linear_variance",
    "run_block",
    "run_hazard",
    "run_ou",
    "sample_pattern",
    "thm8_constants",
]


def criterion(family, indices=(), lam=1.0):
    """Return (verdict, report) for a named kernel family."""
    verdict, report = _pchaos.criterion(family, list(indices), lam)
    return verdict, json.loads(report)


def run_block(n, reps, seed=1, workers=1):
    return json.loads(_pchaos.run_block(n, reps, seed, workers))


def run_ou(theorem, lam, T, reps, seed=1, workers=1):
    return json.loads(_pchaos.run_ou(theorem, lam, T, reps, seed, workers))


def run_hazard(theorem, T, reps, case=1, variant="centered", tau=1.0, seed=1, workers=1):
    return json.loads(_pchaos.run_hazard(theorem, case, variant, tau, T, reps, seed, workers))
