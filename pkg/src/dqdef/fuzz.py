"""Differential fuzzing of the two engines against the expansion oracle."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .certify import check_by_enumeration, emit_model, validate_model
from .engine import Config, InvariantError, solve_basic, solve_cegis
from .formula import DQBF, write_dqdimacs
from .oracle import Profile, brute_solve, random_instance

# name -> (dqbf, seed) -> Verdict-like object with .value and .model
SolverFn = Callable[[DQBF, int], object]


def _basic(dqbf, seed):
    return solve_basic(dqbf, Config(mode="basic", seed=seed))


def _cegis(dqbf, seed):
    return solve_cegis(dqbf, Config(mode="cegis", seed=seed))


DEFAULT_SOLVERS: Dict[str, SolverFn] = {"basic": _basic, "cegis": _cegis}


@dataclass
class Divergence:
    seed: int
    reason: str
    instance: DQBF
    minimized: Optional[DQBF] = None


@dataclass
class FuzzReport:
    count: int = 0
    true: int = 0
    false: int = 0
    models_checked: int = 0
    max_validation_seconds: float = 0.0
    divergences: List[Divergence] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.divergences


def check_instance(dqbf: DQBF, solvers: Dict[str, SolverFn], seed: int = 0,
                   check_models: bool = True) -> Tuple[Optional[str], dict]:
    """Run every solver and the oracle; return a failure description or None."""
    info = {"validation_seconds": 0.0, "models": 0}
    expected = brute_solve(dqbf).value
    info["expected"] = expected
    for name, fn in solvers.items():
        try:
            verdict = fn(dqbf, seed)
        except InvariantError as exc:
            return f"{name}: invariant failure: {exc}", info
        if verdict.value != expected:
            return f"{name} says {verdict.value}, oracle says {expected}", info
        if verdict.value and check_models:
            text = emit_model(dqbf, verdict.model)
            t0 = time.perf_counter()
            report = validate_model(dqbf, text)
            info["validation_seconds"] = max(info["validation_seconds"], time.perf_counter() - t0)
            info["models"] += 1
            if not report.valid:
                return f"{name}: model rejected: {report.reason}", info
            if check_by_enumeration(dqbf, verdict.model) is not None:
                return f"{name}: model fails enumeration", info
    return None, info


def minimize(dqbf: DQBF, fails: Callable[[DQBF], bool]) -> DQBF:
    """Greedy delta reduction: drop clauses, then literals, then dependencies."""
    cur = dqbf

    def attempt(candidate):
        try:
            return fails(candidate)
        except Exception:
            return False

    changed = True
    while changed:
        changed = False
        for i in range(len(cur.matrix)):
            if i >= len(cur.matrix):
                break
            cand = _with_matrix(cur, cur.matrix[:i] + cur.matrix[i + 1:])
            if attempt(cand):
                cur, changed = cand, True
        for i, c in enumerate(cur.matrix):
            for lit in c:
                if len(c) == 1:
                    break
                smaller = tuple(l for l in c if l != lit)
                cand = _with_matrix(cur, cur.matrix[:i] + (smaller,) + cur.matrix[i + 1:])
                if attempt(cand):
                    cur, changed = cand, True
                    break
        for e in cur.existentials:
            for u in sorted(cur.deps[e]):
                deps = dict(cur.deps)
                deps[e] = cur.deps[e] - {u}
                cand = DQBF(cur.universals, cur.existentials, deps, cur.matrix, cur.num_vars)
                if attempt(cand):
                    cur, changed = cand, True
    return cur


def _with_matrix(dqbf: DQBF, matrix) -> DQBF:
    return DQBF(dqbf.universals, dqbf.existentials, dqbf.deps, tuple(matrix), dqbf.num_vars)


def fuzz(profile: Profile, seed: int, count: int, solvers: Optional[Dict[str, SolverFn]] = None,
         check_models: bool = True, stop_on_first: bool = True) -> FuzzReport:
    """Instances ``random_instance(profile, s)`` for ``s`` in ``seed .. seed+count-1``."""
    solvers = DEFAULT_SOLVERS if solvers is None else solvers
    report = FuzzReport()
    for s in range(seed, seed + count):
        dqbf = random_instance(profile, s)
        reason, info = check_instance(dqbf, solvers, s, check_models)
        report.count += 1
        report.models_checked += info["models"]
        report.max_validation_seconds = max(report.max_validation_seconds, info["validation_seconds"])
        if "expected" in info:
            if info["expected"]:
                report.true += 1
            else:
                report.false += 1
        if reason is not None:
            d = Divergence(s, reason, dqbf)
            d.minimized = minimize(dqbf, lambda f: check_instance(f, solvers, s, check_models)[0] is not None)
            report.divergences.append(d)
            if stop_on_first:
                break
    return report


def reproducer_text(d: Divergence) -> str:
    inst = d.minimized or d.instance
    header = f"c fuzz divergence at seed {d.seed}\nc {d.reason}\n"
    return header + write_dqdimacs(inst)
