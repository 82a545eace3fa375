"""Craig interpolants from partition-tagged resolution proofs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Optional, Sequence

from .circuit import AIG, FALSE, TRUE, Circuit
from .formula import cnf_vars
from .satcore import Leaf, ProofError, ResolutionProof, check_proof


@dataclass(frozen=True)
class Partitioning:
    a_vars: FrozenSet[int]
    b_vars: FrozenSet[int]

    @classmethod
    def of(cls, a_clauses: Iterable[Sequence[int]], b_clauses: Iterable[Sequence[int]]) -> "Partitioning":
        return cls(frozenset(cnf_vars(a_clauses)), frozenset(cnf_vars(b_clauses)))

    @property
    def shared(self) -> FrozenSet[int]:
        return self.a_vars & self.b_vars


def interpolant(proof: ResolutionProof, part: Partitioning, aig: Optional[AIG] = None,
                system: str = "mcmillan", replay: bool = True) -> Circuit:
    """Interpolant of a refutation of A ∧ B as a circuit over the shared variables.

    ``system`` selects McMillan's labelling (default) or the symmetric
    ``"pudlak"`` one.  With ``replay`` the proof is re-checked first.
    """
    if system not in ("mcmillan", "pudlak"):
        raise ValueError(f"unknown interpolation system {system!r}")
    if replay:
        check_proof(proof)
    g = AIG() if aig is None else aig
    b_vars = part.b_vars
    a_vars = part.a_vars
    labels = []
    for i, step in enumerate(proof.steps):
        if isinstance(step, Leaf):
            if step.tag == "B":
                labels.append(TRUE)
            elif system == "mcmillan":
                labels.append(g.disj(g.lit(l) for l in step.clause if abs(l) in b_vars))
            else:
                labels.append(FALSE)
            continue
        left, right = labels[step.left], labels[step.right]
        x = step.pivot
        if x not in b_vars:
            labels.append(g.OR(left, right))
        elif system == "mcmillan" or x not in a_vars:
            labels.append(g.AND(left, right))
        else:
            pv = g.var(x)
            labels.append(g.AND(g.OR(pv, left), g.OR(pv ^ 1, right)))
    if not labels:
        raise ProofError("empty proof")
    return Circuit(g, labels[-1])
