"""Padoa-style definability checks and definition extraction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .circuit import AIG, FALSE, Circuit
from .formula import DQBF, Assignment, cnf_vars
from .interpolate import Partitioning, interpolant
from .satcore import Solver, solve_with_proof


class DefinitionError(RuntimeError):
    """Raised when a definition is requested for an undefined variable, or fails to verify."""


@dataclass
class Definability:
    defined: bool
    witness: Optional[Assignment] = None
    definition: Optional[Circuit] = None
    # the Padoa partition and proof size, kept for inspection
    a_clauses: Tuple = ()
    b_clauses: Tuple = ()
    proof_size: int = 0


def padoa_partition(x: int, support: Iterable[int], phi: Sequence[Sequence[int]]):
    """The two halves of the Padoa query for ``x`` over ``support``.

    A is φ ∧ x.  B holds a renamed copy of every clause that mentions a
    variable outside the support, plus ¬x'.  Clauses over the support alone
    live only in A.  Returns ``(A, B, rename)``.
    """
    shared = set(support)
    if x in shared:
        raise ValueError("target is in its own support")
    top = max([x, *shared, *cnf_vars(phi)])
    rename: Dict[int, int] = {}

    def prime(v):
        if v in shared:
            return v
        if v not in rename:
            rename[v] = top + 1 + len(rename)
        return rename[v]

    a_clauses = [tuple(c) for c in phi]
    a_clauses.append((x,))
    b_clauses = []
    for c in phi:
        if all(abs(l) in shared for l in c):
            continue
        b_clauses.append(tuple(prime(abs(l)) if l > 0 else -prime(abs(l)) for l in c))
    b_clauses.append((-prime(x),))
    return a_clauses, b_clauses, rename


def query(x: int, support: Iterable[int], phi: Sequence[Sequence[int]], *, aig: Optional[AIG] = None,
          extract: bool = True, seed: int = 0) -> Definability:
    """Decide whether ``x`` is defined by ``support`` in ``phi``.

    When it is, and ``extract`` is set, the interpolant of the refutation is
    returned as the definition.  An unsatisfiable ``phi`` defines every
    variable as the constant false.
    """
    shared = frozenset(support)
    g = AIG() if aig is None else aig
    if x in shared:
        return Definability(True, definition=Circuit(g, g.var(x)))
    a_clauses, b_clauses, _ = padoa_partition(x, shared, phi)
    sat, result = solve_with_proof(a_clauses, b_clauses, seed=seed)
    if sat:
        witness = {v: result.get(v, False) for v in sorted(shared)}
        return Definability(False, witness=witness, a_clauses=tuple(a_clauses), b_clauses=tuple(b_clauses))
    out = Definability(True, a_clauses=tuple(a_clauses), b_clauses=tuple(b_clauses), proof_size=len(result))
    if extract:
        if not Solver(phi).solve():
            out.definition = Circuit(g, FALSE)
        else:
            out.definition = interpolant(result, Partitioning.of(a_clauses, b_clauses), g, replay=False)
    return out


def is_defined(x: int, support: Iterable[int], phi: Sequence[Sequence[int]], seed: int = 0):
    """``(True, None)`` or ``(False, witness)`` with the witness over ``support``."""
    r = query(x, support, phi, extract=False, seed=seed)
    return r.defined, r.witness


def get_definition(x: int, support: Iterable[int], phi: Sequence[Sequence[int]],
                   aig: Optional[AIG] = None, seed: int = 0) -> Circuit:
    r = query(x, support, phi, aig=aig, seed=seed)
    if not r.defined:
        raise DefinitionError(f"variable {x} is not defined by {sorted(support)}")
    return r.definition


def verify_definition(x: int, definition: Circuit, phi: Sequence[Sequence[int]]) -> bool:
    """True iff φ ∧ ¬(x ↔ ψ) is unsatisfiable."""
    clauses = [tuple(c) for c in phi]
    top = max([x, *cnf_vars(phi), *definition.support()])
    counter = [top]

    def fresh():
        counter[0] += 1
        return counter[0]

    root = definition.aig.tseitin(definition.root, fresh, clauses)
    if root is None:
        root = fresh()
        clauses.append((root,) if definition.const_value() else (-root,))
    # x xor root
    clauses += [(x, root), (-x, -root)]
    return not Solver(clauses).solve()


@dataclass(frozen=True)
class DefinabilityOrder:
    order: Tuple[int, ...]
    ext: Mapping[int, FrozenSet[int]]

    def position(self, v: int) -> int:
        return self.order.index(v)


def definability_order(dqbf: DQBF, arbiters: Iterable[int] = ()) -> DefinabilityOrder:
    """Arbiters first, then existentials by dependency-set size and index.

    ``ext(e)`` is ``D(e)`` plus every arbiter and every earlier existential
    whose dependency set is contained in ``D(e)``.
    """
    arbs = sorted(arbiters)
    exist = sorted(dqbf.existentials, key=lambda e: (len(dqbf.deps[e]), e))
    ext: Dict[int, FrozenSet[int]] = {}
    before: List[int] = []
    for e in exist:
        d = dqbf.deps[e]
        ext[e] = frozenset(d) | frozenset(arbs) | frozenset(x for x in before if dqbf.deps[x] <= d)
        before.append(e)
    return DefinabilityOrder(tuple(arbs) + tuple(exist), ext)
