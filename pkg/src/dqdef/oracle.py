"""Ground truth by full universal expansion, plus a seeded instance generator."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .formula import DQBF, Assignment, normalize_clause
from .satcore import Solver
from .synth import ArbiterRegistry, Key, make_key

DEFAULT_CAP = 14


class OracleCapError(ValueError):
    pass


class AnnotatedVar(NamedTuple):
    base: int
    annotation: Key


AnnotatedLit = Tuple[AnnotatedVar, bool]


def annotated(e: int, sigma: Mapping[int, bool], dqbf: DQBF) -> AnnotatedVar:
    return AnnotatedVar(e, make_key(sigma, dqbf.deps[e]))


def instantiate(matrix: Iterable[Sequence[int]], sigma: Mapping[int, bool], dqbf: DQBF) -> List[Tuple[AnnotatedLit, ...]]:
    """φ^σ: clauses whose universal literals σ all falsifies, existentials annotated.

    Every non-universal variable must be an existential of ``dqbf``.
    """
    uni = set(dqbf.universals)
    out = []
    for clause in matrix:
        lits = []
        for lit in clause:
            v = abs(lit)
            if v in uni:
                if sigma[v] == (lit > 0):
                    break
            else:
                lits.append((annotated(v, sigma, dqbf), lit > 0))
        else:
            out.append(tuple(lits))
    return out


def annotate_term(tau: Mapping[int, bool], rho: Mapping[int, bool], registry: ArbiterRegistry) -> List[AnnotatedLit]:
    """τ^ρ: arbiter literals whose key ρ satisfies, as annotated literals."""
    out = []
    for a_var, value in sorted(tau.items()):
        a = registry.get(a_var)
        if all(rho[v] == val for v, val in a.key):
            out.append((AnnotatedVar(a.base, a.key), bool(value)))
    return out


def sat_annotated(clauses: Iterable[Sequence[AnnotatedLit]]) -> Tuple[bool, Dict[AnnotatedVar, bool]]:
    """Propositional satisfiability of annotated clauses."""
    ids: Dict[AnnotatedVar, int] = {}
    ints = []
    for c in clauses:
        ints.append([ids.setdefault(v, len(ids) + 1) if pol else -ids.setdefault(v, len(ids) + 1)
                     for v, pol in c])
    s = Solver(ints)
    if not s.solve():
        return False, {}
    return True, {v: s.model.get(i, False) for v, i in ids.items()}


@dataclass
class OracleVerdict:
    value: bool
    tables: Optional[Dict[int, Dict[Key, bool]]] = None

    def function(self, e: int, sigma: Mapping[int, bool], dqbf: DQBF) -> bool:
        return self.tables[e][make_key(sigma, dqbf.deps[e])]


def expand(dqbf: DQBF, cap: int = DEFAULT_CAP) -> List[Tuple[AnnotatedLit, ...]]:
    """⋀ over all σ of φ^σ."""
    if len(dqbf.universals) > cap:
        raise OracleCapError(f"{len(dqbf.universals)} universals exceed the oracle cap of {cap}")
    u = list(dqbf.universals)
    seen = set()
    out = []
    for bits in itertools.product((False, True), repeat=len(u)):
        for c in instantiate(dqbf.matrix, dict(zip(u, bits)), dqbf):
            if c not in seen:
                seen.add(c)
                out.append(c)
    return out


def brute_solve(dqbf: DQBF, cap: int = DEFAULT_CAP) -> OracleVerdict:
    clauses = expand(dqbf, cap)
    sat, values = sat_annotated(clauses)
    if not sat:
        return OracleVerdict(False)
    tables: Dict[int, Dict[Key, bool]] = {}
    for e in dqbf.existentials:
        d = sorted(dqbf.deps[e])
        table = {}
        for bits in itertools.product((False, True), repeat=len(d)):
            key = tuple(zip(d, bits))
            table[key] = values.get(AnnotatedVar(e, key), False)
        tables[e] = table
    return OracleVerdict(True, tables)


def check_tables(dqbf: DQBF, verdict: OracleVerdict) -> bool:
    """Do the read-back tables satisfy the matrix under every σ?"""
    u = list(dqbf.universals)
    for bits in itertools.product((False, True), repeat=len(u)):
        sigma = dict(zip(u, bits))
        full = {**sigma, **{e: verdict.function(e, sigma, dqbf) for e in dqbf.existentials}}
        if not all(any(full[abs(l)] == (l > 0) for l in c) for c in dqbf.matrix):
            return False
    return True


# -- generator -----------------------------------------------------------


@dataclass(frozen=True)
class Params:
    n_universals: int = 3
    n_existentials: int = 2
    max_deps: int = 3
    n_clauses: int = 8
    clause_len: int = 3

    def __post_init__(self):
        if min(self.n_universals, self.n_existentials, self.max_deps, self.n_clauses) < 0 or self.clause_len < 1:
            raise ValueError("generator parameters must be non-negative (clause_len >= 1)")


@dataclass(frozen=True)
class Profile:
    """Upper bounds; each instance draws concrete parameters below them."""

    name: str
    max_universals: int
    max_existentials: int
    max_clauses: int
    max_clause_len: int = 3

    def sample(self, rng: random.Random) -> Params:
        nu = rng.randint(1, self.max_universals)
        ne = rng.randint(1, self.max_existentials)
        nc = rng.randint(1, self.max_clauses)
        return Params(nu, ne, nu, nc, self.max_clause_len)


SMALL = Profile("small", 4, 3, 12)
MEDIUM = Profile("medium", 6, 4, 20)
PROFILES = {p.name: p for p in (SMALL, MEDIUM)}


def random_dqbf(params: Params, seed: int) -> DQBF:
    """Deterministic in ``(params, seed)``; variables 1..nU are universal.

    Clauses have ``min(clause_len, #vars)`` distinct variables.  A clause
    that drew only universals has its first variable swapped for an
    existential, since such clauses make the instance trivially false.
    """
    rng = random.Random(seed)
    nu, ne = params.n_universals, params.n_existentials
    universals = list(range(1, nu + 1))
    deps = {}
    for e in range(nu + 1, nu + ne + 1):
        size = rng.randint(0, min(params.max_deps, nu))
        deps[e] = sorted(rng.sample(universals, size))
    nv = nu + ne
    clauses = []
    for _ in range(params.n_clauses):
        if nv == 0:
            break
        vs = rng.sample(range(1, nv + 1), min(params.clause_len, nv))
        if ne and all(v <= nu for v in vs):
            vs[0] = rng.randint(nu + 1, nv)
        clauses.append(normalize_clause(v if rng.random() < 0.5 else -v for v in vs))
    return DQBF.build(universals, deps, clauses, num_vars=nv)


def random_instance(profile: Profile, seed: int) -> DQBF:
    rng = random.Random(f"{profile.name}:{seed}")
    return random_dqbf(profile.sample(rng), rng.randrange(2 ** 32))


def model_from_tables(dqbf: DQBF, verdict: OracleVerdict):
    """Sum-of-minterms circuits for the oracle's tables."""
    from .certify import Model
    from .circuit import AIG

    g = AIG()
    functions = {}
    for e in dqbf.existentials:
        minterms = [g.conj(g.lit(v if val else -v) for v, val in key)
                    for key, out in verdict.tables[e].items() if out]
        functions[e] = g.disj(minterms)
    return Model(g, functions)
