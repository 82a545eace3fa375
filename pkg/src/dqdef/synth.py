"""Arbiter variables, forcing clauses and the consistency check."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .formula import DQBF, Assignment, Clause
from .satcore import Solver, get_core

Key = Tuple[Tuple[int, bool], ...]


def make_key(sigma: Mapping[int, bool], variables: Iterable[int]) -> Key:
    """Canonical (sorted) key of ``sigma`` restricted to ``variables``."""
    return tuple((v, bool(sigma[v])) for v in sorted(variables))


def key_term(key: Key) -> List[int]:
    return [v if val else -v for v, val in key]


@dataclass(frozen=True)
class ArbiterVar:
    base: int
    key: Key
    var: int

    def clauses(self) -> Tuple[Clause, Clause]:
        neg_key = tuple(-l for l in key_term(self.key))
        return (
            (self.var, *neg_key, -self.base),
            (-self.var, *neg_key, self.base),
        )


@dataclass(frozen=True)
class ForcingClause:
    premise: Tuple[int, ...]
    literal: int
    generation: int

    @property
    def clause(self) -> Clause:
        return tuple(-p for p in self.premise) + (self.literal,)


class ArbiterRegistry:
    """Owns the arbiter variables and the clause sets φ_A and φ_F."""

    def __init__(self, dqbf: DQBF, first_var: Optional[int] = None):
        self.dqbf = dqbf
        self._next = (dqbf.num_vars if first_var is None else first_var - 1) + 1
        self._by_key: Dict[Tuple[int, Key], ArbiterVar] = {}
        self._by_var: Dict[int, ArbiterVar] = {}
        self.arbiters: List[ArbiterVar] = []
        self.arbiter_clauses: List[Clause] = []
        self.forcing: List[ForcingClause] = []

    def __len__(self):
        return len(self.arbiters)

    def __contains__(self, v: int) -> bool:
        return v in self._by_var

    @property
    def vars(self) -> List[int]:
        return [a.var for a in self.arbiters]

    @property
    def generation(self) -> int:
        return len(self.arbiter_clauses) + len(self.forcing)

    @property
    def forcing_clauses(self) -> List[Clause]:
        return [f.clause for f in self.forcing]

    def clauses(self) -> List[Clause]:
        """φ_A ∧ φ_F."""
        return self.arbiter_clauses + self.forcing_clauses

    def get(self, v: int) -> ArbiterVar:
        return self._by_var[v]

    def lookup(self, e: int, sigma: Mapping[int, bool]) -> Optional[ArbiterVar]:
        return self._by_key.get((e, make_key(sigma, self.dqbf.deps[e])))

    def of(self, e: int) -> List[ArbiterVar]:
        return [a for a in self.arbiters if a.base == e]

    def register(self, e: int, sigma: Mapping[int, bool]) -> Tuple[ArbiterVar, bool]:
        """The arbiter for ``(e, sigma|D(e))``; the flag says whether it is new."""
        key = make_key(sigma, self.dqbf.deps[e])
        existing = self._by_key.get((e, key))
        if existing is not None:
            return existing, False
        a = ArbiterVar(e, key, self._next)
        self._next += 1
        self._by_key[(e, key)] = a
        self._by_var[a.var] = a
        self.arbiters.append(a)
        self.arbiter_clauses.extend(a.clauses())
        return a, True

    def new_arbiters(self, not_forced: Iterable[int], sigma_u: Mapping[int, bool]):
        """Register arbiters for the variables of ``not_forced`` under ``sigma_u``.

        Returns ``(clauses, vars)`` for the arbiters created by this call;
        already registered keys contribute nothing.
        """
        clauses: List[Clause] = []
        created: List[ArbiterVar] = []
        for lit in not_forced:
            a, new = self.register(abs(lit), sigma_u)
            if new:
                created.append(a)
                clauses.extend(a.clauses())
        return clauses, created

    def add_forcing(self, premise: Sequence[int], literal: int) -> ForcingClause:
        f = ForcingClause(tuple(premise), literal, self.generation)
        self.forcing.append(f)
        return f


def set_assignment(arbiters: Iterable[ArbiterVar], rho_e: Mapping[int, bool]) -> Assignment:
    return {a.var: bool(rho_e[a.base]) for a in arbiters}


def forcing_premise(psi, premise: Sequence[int], literal: int, allowed: Iterable[int]) -> List[int]:
    """Core of ``premise`` entailing ``literal`` in ``psi``, restricted to ``allowed``.

    ``psi`` is a :class:`Solver` or a clause list.  Raises ValueError when
    ``literal`` is not entailed.
    """
    core = get_core(psi, [*premise, -literal])
    keep = set(allowed)
    return [l for l in core if l != -literal and abs(l) in keep]


def forcing_clause(psi, premise: Sequence[int], literal: int, allowed: Iterable[int], generation: int = 0) -> ForcingClause:
    return ForcingClause(tuple(forcing_premise(psi, premise, literal, allowed)), literal, generation)


class ConsistencyError(ValueError):
    pass


def check_consistency(clauses: Iterable[Sequence[int]], tau: Mapping[int, bool], universals: Sequence[int],
                      existentials: Iterable[int]) -> Optional[Assignment]:
    """None if φ_AF ∧ τ ∧ σ is satisfiable for every σ over the universals.

    Otherwise a total universal assignment for which it is not.  Every
    clause must contain exactly one existential literal; the remaining
    literals are universal or arbiter literals (assigned by ``tau``).
    """
    ex = set(existentials)
    uni = set(universals)
    pos: Dict[int, List[Tuple[int, ...]]] = {}
    neg: Dict[int, List[Tuple[int, ...]]] = {}
    for clause in clauses:
        e_lit = None
        activation = []
        satisfied = False
        for lit in clause:
            v = abs(lit)
            if v in ex:
                if e_lit is not None:
                    raise ConsistencyError(f"clause {tuple(clause)} has two existential literals")
                e_lit = lit
            elif v in uni:
                activation.append(-lit)
            else:
                if v not in tau:
                    raise ConsistencyError(f"arbiter {v} unassigned")
                if tau[v] == (lit > 0):
                    satisfied = True
                    break
        if satisfied:
            continue
        if e_lit is None:
            raise ConsistencyError(f"clause {tuple(clause)} has no existential literal")
        (pos if e_lit > 0 else neg).setdefault(abs(e_lit), []).append(tuple(activation))
    for e in sorted(pos):
        for p in pos[e]:
            p_set = set(p)
            for n in neg.get(e, ()):
                if not any(-l in p_set for l in n):
                    sigma = {u: False for u in universals}
                    for l in (*p, *n):
                        sigma[abs(l)] = l > 0
                    return sigma
    return None
