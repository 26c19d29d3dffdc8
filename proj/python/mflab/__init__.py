"""Exact experiments on pairs of level-one Hecke eigenforms."""

import json

from ._mflab import (
    Error,
    __version__,
    bounds,
    card_A,
    card_C,
    coefficients,
    delta,
    delta_squarefree,
    factorize,
    positivity_threshold,
    primality,
    sieve_params,
    supported_weights,
)
from . import _mflab


def _ints(obj):
    # exact integers travel as decimal strings
    if isinstance(obj, dict):
        return {k: _ints(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_ints(v) for v in obj]
    if isinstance(obj, str) and obj.lstrip("-").isdigit():
        return int(obj)
    return obj


def diff_table(k1, k2, X, sign="minus", threads=0, timeout_secs=10.0):
    """Rows p <= X with d = a1(p) -/+ a2(p) and its factorization."""
    return _ints(json.loads(_mflab.diff_table_json(k1, k2, X, sign, threads, timeout_secs)))


def run_experiment(k1=12, k2=16, X=10000, sign="minus", threads=0, timeout_secs=10.0):
    """Full experiment report as a dict, same layout as the CLI's JSON output."""
    return json.loads(_mflab.run_experiment_json(k1, k2, X, sign, threads, timeout_secs))


def congruence(k1, k2, primes=100, confirm=100):
    return json.loads(_mflab.congruence_json(k1, k2, primes, confirm))


__all__ = [
    "Error",
    "__version__",
    "bounds",
    "card_A",
    "card_C",
    "coefficients",
    "congruence",
    "delta",
    "delta_squarefree",
    "diff_table",
    "factorize",
    "positivity_threshold",
    "primality",
    "run_experiment",
    "sieve_params",
    "supported_weights",
]
