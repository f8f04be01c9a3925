"""Generators, experiment drivers, property suites and the command line."""

from .config import ExperimentConfig
from .experiments import run_theorem1_experiment, run_theorem2_experiment
from .generators import GeneratorSpec, generate
from .verify import SUITES, verify

__all__ = [
    "ExperimentConfig",
    "GeneratorSpec",
    "SUITES",
    "generate",
    "run_theorem1_experiment",
    "run_theorem2_experiment",
    "verify",
]
