"""Certifying DQBF solver based on definition extraction."""

from .formula import DQBF, DQDimacsError, parse_dqdimacs, write_dqdimacs
from .engine import Config, InvariantError, Verdict, solve, solve_basic, solve_cegis
from .certify import Model, assemble_model, emit_model, validate_model
from .oracle import brute_solve, random_dqbf

__all__ = [
    "DQBF", "DQDimacsError", "parse_dqdimacs", "write_dqdimacs",
    "Config", "InvariantError", "Verdict", "solve", "solve_basic", "solve_cegis",
    "Model", "assemble_model", "emit_model", "validate_model",
    "brute_solve", "random_dqbf",
]
