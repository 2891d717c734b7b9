"""Coupled forward-backward Boltzmann solver and Hamilton-Jacobi functional."""

from ._hjlab import (
    InitialKind,
    Regime,
    Scenario,
    ScenarioConfig,
    TerminalKind,
    ValidationError,
    __version__,
    convolution_bound_check,
    hj_residual,
    load_config,
    parse_config,
    run,
    set_threads,
    tiny_config,
)

__all__ = [
    "InitialKind",
    "Regime",
    "Scenario",
    "ScenarioConfig",
    "TerminalKind",
    "ValidationError",
    "__version__",
    "convolution_bound_check",
    "hj_residual",
    "load_config",
    "parse_config",
    "run",
    "set_threads",
    "tiny_config",
]
