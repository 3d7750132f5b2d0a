# Copyright 2026 The nsbesov Authors
# SPDX-License-Identifier: Apache-2.0
"""Dyadic Besov splitting and energy-class Navier-Stokes solves on the periodic box."""

from ._core import (
    Field,
    NsbesovError,
    besov_norm,
    compose_split,
    emit_experiment,
    exponents,
    ledger_defects,
    load_field,
    random_field,
    run_experiment,
)

__all__ = [
    "Field",
    "NsbesovError",
    "besov_norm",
    "compose_split",
    "emit_experiment",
    "exponents",
    "ledger_defects",
    "load_field",
    "random_field",
    "run_experiment",
]
