"""Lieb-Robinson bounds for classical anharmonic lattice systems."""

import json as _json

from ._lrlab import (
    AssumptionError,
    Config,
    ConfigError,
    DomainError,
    IntegrationError,
    Model,
    UnsupportedError,
    chain_convolution_constant,
    chain_norm_F,
    dyson_partial_sums,
    jacobian_envelope,
    lr_rhs,
    run_lr_json,
)


def constants(model):
    """Bound constants (C0, C_V, ...) on the full lattice as a dict."""
    return _json.loads(model.constants_json())


def assumptions(model):
    """Assumption report on the full lattice as a dict."""
    return _json.loads(model.assumptions_json())


def run_lr(config):
    """Runs the lr experiment of a config and returns the report as a dict."""
    return _json.loads(run_lr_json(config))


__all__ = [
    "AssumptionError",
    "Config",
    "ConfigError",
    "DomainError",
    "IntegrationError",
    "Model",
    "UnsupportedError",
    "assumptions",
    "chain_convolution_constant",
    "chain_norm_F",
    "constants",
    "dyson_partial_sums",
    "jacobian_envelope",
    "lr_rhs",
    "run_lr",
]
