"""Doss-Sussmann scheme for scalar SDEs driven by fractional Brownian motion."""

import json

from ._core import (
    ConfigError,
    DomainError,
    NumericError,
    covariance,
    sample_path,
)
from . import _core

__all__ = [
    "ConfigError",
    "DomainError",
    "NumericError",
    "covariance",
    "sample_path",
    "simulate",
    "converge",
    "verify",
]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def simulate(config):
    """One seeded scheme run and its reference. `config` is a dict or JSON text."""
    out = _core.simulate(_text(config))
    out["constants"] = json.loads(out.pop("constants_json"))
    return out


def converge(config):
    """Convergence study over the bench grid; returns the report as a dict."""
    return json.loads(_core.converge(_text(config)))


def verify(config):
    """Lemma bound suite; returns {"passed": bool, "lemmas": [...]}."""
    return json.loads(_core.verify(_text(config)))
