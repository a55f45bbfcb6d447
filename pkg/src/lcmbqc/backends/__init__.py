"""Pattern simulators: dense statevector and exact tensor network."""

from __future__ import annotations

from ..pattern import Pattern
from . import statevector, tensornet
from .base import (
    ContractionTooLargeError,
    ExecutionConfig,
    ImpossibleOutcomeError,
    OutputState,
    ShapeMismatchError,
    SimulationError,
    SpaceExceededError,
    fidelity,
)

BACKENDS = {"statevector": statevector.run, "tensor": tensornet.run}


def run(pattern: Pattern, config: ExecutionConfig | None = None, **kwargs) -> OutputState:
    """Simulate ``pattern`` with the backend named in ``config.backend``."""
    config = config or ExecutionConfig(**kwargs)
    try:
        backend = BACKENDS[config.backend]
    except KeyError:
        raise ValueError(f"unknown backend {config.backend!r}; choose from {sorted(BACKENDS)}") from None
    return backend(pattern, config)


def run_tensor(pattern: Pattern, config: ExecutionConfig | None = None, **kwargs) -> OutputState:
    config = config or ExecutionConfig(backend="tensor", **kwargs)
    return tensornet.run(pattern, config)


__all__ = [
    "ContractionTooLargeError",
    "ExecutionConfig",
    "ImpossibleOutcomeError",
    "OutputState",
    "ShapeMismatchError",
    "SimulationError",
    "SpaceExceededError",
    "fidelity",
    "run",
    "run_tensor",
]
