"""Model assembly, the model file format, and independent validation.

Model file layout::

    c skolem <e> depends <d1> ... 0      one line per existential
    c aux-range <first> <last>           fresh Tseitin variables (last < first: none)
    p cnf <maxvar> <nclauses>
    <clauses>

Each existential is its own output variable.  Gate variables are never
shared between existentials, so the clauses reachable from ``e`` through
auxiliary variables form the cone of ``e`` alone.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from .circuit import AIG, FALSE, TRUE, Circuit
from .formula import DQBF, Assignment, evaluate_cnf
from .satcore import Solver
from .synth import ArbiterRegistry, key_term


class ModelFormatError(ValueError):
    pass


class ModelSupportError(RuntimeError):
    pass


@dataclass
class Model:
    """Skolem circuits ``f_e`` over ``D(e)``, all living in one AIG."""

    aig: AIG
    functions: Dict[int, int]

    def circuit(self, e: int) -> Circuit:
        return Circuit(self.aig, self.functions[e])

    def evaluate(self, sigma: Mapping[int, bool]) -> Assignment:
        return {e: self.aig.evaluate(f, sigma) for e, f in self.functions.items()}


def decision_list(aig: AIG, registry: ArbiterRegistry, e: int, default: bool) -> int:
    """Candidate for an undefined ``e`` over ``D(e)`` and the arbiters.

    Arbiter cases come first, then forcing cases, each in creation order;
    when none applies the default constant is used.
    """
    cases = []
    for a in registry.of(e):
        cond = aig.conj(aig.lit(l) for l in key_term(a.key))
        cases.append((cond, aig.var(a.var)))
    for f in registry.forcing:
        if abs(f.literal) == e:
            cond = aig.conj(aig.lit(l) for l in f.premise)
            cases.append((cond, TRUE if f.literal > 0 else FALSE))
    out = aig.const(default)
    for cond, value in reversed(cases):
        out = aig.ITE(cond, value, out)
    return out


def assemble_model(st) -> Model:
    """Close the candidates of a finished run over the universals.

    Walks the existentials in definability order, replacing arbiter leaves
    by their value in ``st.tau`` and existential leaves by the circuits
    already assembled.
    """
    aig: AIG = st.aig
    dqbf: DQBF = st.dqbf
    mapping: Dict[int, int] = {a.var: aig.const(st.tau.get(a.var, st.config.default)) for a in st.registry.arbiters}
    functions: Dict[int, int] = {}
    for e in st.order:
        edge = st.candidate(e)
        f = aig.substitute(edge, mapping)
        if not aig.support(f) <= dqbf.deps[e]:
            raise ModelSupportError(f"function for {e} depends on {sorted(aig.support(f) - dqbf.deps[e])}")
        functions[e] = f
        mapping[e] = f
    return Model(aig, {e: functions[e] for e in dqbf.existentials})


# -- emission -------------------------------------------------------------


def emit_model(dqbf: DQBF, model: Model) -> str:
    next_var = [dqbf.num_vars]

    def fresh():
        next_var[0] += 1
        return next_var[0]

    clauses: List[Tuple[int, ...]] = []
    for e in dqbf.existentials:
        edge = model.functions[e]
        root = model.aig.tseitin(edge, fresh, clauses)
        if root is None:
            clauses.append((e,) if edge == TRUE else (-e,))
        else:
            clauses.append((-e, root))
            clauses.append((e, -root))
    first, last = dqbf.num_vars + 1, next_var[0]
    lines = [f"c skolem {e} depends " + "".join(f"{d} " for d in sorted(dqbf.deps[e])) + "0"
             for e in dqbf.existentials]
    lines.append(f"c aux-range {first} {last}")
    lines.append(f"p cnf {max(last, dqbf.num_vars)} {len(clauses)}")
    lines += [" ".join(map(str, c)) + " 0" for c in clauses]
    return "\n".join(lines) + "\n"


@dataclass
class ModelFile:
    skolem: Dict[int, Tuple[int, ...]]
    aux: Tuple[int, int]
    num_vars: int
    clauses: List[Tuple[int, ...]]

    def is_aux(self, v: int) -> bool:
        return self.aux[0] <= v <= self.aux[1]


def parse_model(text) -> ModelFile:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii")
    skolem: Dict[int, Tuple[int, ...]] = {}
    aux = None
    header = None
    clauses: List[Tuple[int, ...]] = []
    pending: List[int] = []
    try:
        for lineno, raw in enumerate(text.splitlines(), start=1):
            tok = raw.split()
            if not tok:
                continue
            if tok[0] == "c":
                if len(tok) > 1 and tok[1] == "skolem":
                    if len(tok) < 5 or tok[3] != "depends" or tok[-1] != "0":
                        raise ModelFormatError(f"line {lineno}: malformed skolem header")
                    skolem[int(tok[2])] = tuple(int(t) for t in tok[4:-1])
                elif len(tok) > 1 and tok[1] == "aux-range":
                    if len(tok) != 4:
                        raise ModelFormatError(f"line {lineno}: malformed aux-range")
                    aux = (int(tok[2]), int(tok[3]))
                continue
            if tok[0] == "p":
                if header is not None or len(tok) != 4 or tok[1] != "cnf":
                    raise ModelFormatError(f"line {lineno}: malformed header")
                header = (int(tok[2]), int(tok[3]))
                continue
            if header is None:
                raise ModelFormatError(f"line {lineno}: clause before header")
            for t in tok:
                v = int(t)
                if abs(v) > header[0]:
                    raise ModelFormatError(f"line {lineno}: literal {v} exceeds {header[0]}")
                if v == 0:
                    clauses.append(tuple(pending))
                    pending = []
                else:
                    pending.append(v)
    except ValueError as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(str(exc)) from None
    if header is None:
        raise ModelFormatError("missing header")
    if aux is None:
        raise ModelFormatError("missing aux-range")
    if pending:
        raise ModelFormatError("unterminated clause")
    if len(clauses) != header[1]:
        raise ModelFormatError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return ModelFile(skolem, aux, header[0], clauses)


# -- validation -----------------------------------------------------------


@dataclass
class ValidationReport:
    valid: bool
    reason: str = ""
    failing_clause: Optional[int] = None  # 1-based index into the matrix
    clause: Optional[Tuple[int, ...]] = None
    witness: Optional[Assignment] = None
    clause_times: List[float] = field(default_factory=list)

    def __bool__(self):
        return self.valid


def _cones(dqbf: DQBF, mf: ModelFile):
    """Check that each clause sits in exactly one existential's cone."""
    by_var: Dict[int, List[int]] = {}
    for i, c in enumerate(mf.clauses):
        for lit in c:
            by_var.setdefault(abs(lit), []).append(i)
    owner: Dict[int, int] = {}
    for e in dqbf.existentials:
        allowed = dqbf.deps[e] | {e}
        todo = [e]
        visited = {e}
        while todo:
            v = todo.pop()
            for ci in by_var.get(v, ()):
                if owner.get(ci, e) != e:
                    return f"clause {ci + 1} is shared by the cones of {owner[ci]} and {e}"
                owner[ci] = e
                for lit in mf.clauses[ci]:
                    w = abs(lit)
                    if w in visited:
                        continue
                    if mf.is_aux(w):
                        visited.add(w)
                        todo.append(w)
                    elif w not in allowed:
                        return f"function for {e} mentions {w} outside its dependency set"
    for i in range(len(mf.clauses)):
        if i not in owner:
            return f"clause {i + 1} belongs to no existential"
    return None


def validate_model(dqbf: DQBF, model_text, totality_cap: int = 12) -> ValidationReport:
    """Check a model file against ``dqbf``.

    1. Every existential has a header whose dependencies lie in D(e).
    2. The cone of each existential stays within D(e) and its own gates.
    3. For |D(e)| up to ``totality_cap``, the cone of ``e`` is satisfiable
       under every assignment of D(e).
    4. For every matrix clause C, ψ ∧ ¬C is unsatisfiable.
    """
    mf = model_text if isinstance(model_text, ModelFile) else parse_model(model_text)
    for e in dqbf.existentials:
        if e not in mf.skolem:
            return ValidationReport(False, f"no skolem header for {e}")
        if not set(mf.skolem[e]) <= dqbf.deps[e]:
            return ValidationReport(False, f"header of {e} claims dependencies outside D({e})")
    for e in mf.skolem:
        if e not in dqbf.deps:
            return ValidationReport(False, f"skolem header for non-existential {e}")
    for c in mf.clauses:
        for lit in c:
            v = abs(lit)
            if not mf.is_aux(v) and v > dqbf.num_vars:
                return ValidationReport(False, f"variable {v} is neither in the formula nor auxiliary")
    problem = _cones(dqbf, mf)
    if problem:
        return ValidationReport(False, problem)

    # totality: each cone defines at least one value for every input
    solver = Solver(mf.clauses)
    for e in dqbf.existentials:
        d = sorted(dqbf.deps[e])
        if len(d) > totality_cap:
            continue
        for bits in itertools.product((False, True), repeat=len(d)):
            if not solver.solve([v if b else -v for v, b in zip(d, bits)]):
                sigma = dict(zip(d, bits))
                return ValidationReport(False, f"function for {e} is undefined on {sigma}", witness=sigma)

    report = ValidationReport(True)
    visible = set(dqbf.universals) | set(dqbf.existentials)
    for i, clause in enumerate(dqbf.matrix):
        t0 = time.perf_counter()
        sat = solver.solve([-l for l in clause])
        report.clause_times.append(time.perf_counter() - t0)
        if sat:
            witness = {v: solver.model.get(v, False) for v in sorted(visible)}
            return ValidationReport(False, f"matrix clause {i + 1} can be falsified", i + 1, clause,
                                    witness, report.clause_times)
    return report


def check_by_enumeration(dqbf: DQBF, model: Model) -> Optional[Assignment]:
    """Evaluate the circuits on every universal assignment.

    Returns None when σ ∪ F(σ) satisfies the matrix everywhere, otherwise a
    failing σ ∪ F(σ).
    """
    u = list(dqbf.universals)
    for bits in itertools.product((False, True), repeat=len(u)):
        sigma = dict(zip(u, bits))
        full = {**sigma, **model.evaluate(sigma)}
        if evaluate_cnf(dqbf.matrix, full) is not True:
            return full
    return None
