"""Gradient descent with periodic random-candidate perturbations, baselines and benchmarks."""

from .benchmarks import NAMES, fixture, get_objective
from .core import (ContractViolation, EvalCounter, NonFiniteValueError, Objective, RngStream,
                   RunResult, TraceStep)
from .optimizers import (GdConfig, PgdConfig, SaConfig, SpgdConfig, preset, run, run_gd,
                         run_pgd, run_sa, run_spgd)

__all__ = [
    "NAMES", "fixture", "get_objective", "ContractViolation", "EvalCounter",
    "NonFiniteValueError", "Objective", "RngStream", "RunResult", "TraceStep", "GdConfig",
    "PgdConfig", "SaConfig", "SpgdConfig", "preset", "run", "run_gd", "run_pgd", "run_sa",
    "run_spgd",
]
