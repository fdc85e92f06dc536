"""Simulation-based schedule optimisation for a three-stage batch plant.

A discrete-event plant simulator serves as the objective; GA and DE search
binary schedules, optionally assisted by an RBF surrogate (PSAF), and the
harness scores repeated runs with success-rate indicators.
"""

from .encoding import InstructionVector, decode, encode, from_starts, random_init
from .evolutionary import EAParams, Individual, RunTrace, TraceEntry, run
from .metrics import QualityReport, TrialRecord
from .plant import PRESETS, PlantConfig, SimOutcome, audit_mass, get_preset, simulate
from .problem import Problem
from .psaf import PsafParams, run_psaf

__version__ = "0.1.0"

__all__ = [
    "EAParams",
    "Individual",
    "InstructionVector",
    "PRESETS",
    "PlantConfig",
    "Problem",
    "PsafParams",
    "QualityReport",
    "RunTrace",
    "SimOutcome",
    "TraceEntry",
    "TrialRecord",
    "audit_mass",
    "decode",
    "encode",
    "from_starts",
    "get_preset",
    "random_init",
    "run",
    "run_psaf",
    "simulate",
]
