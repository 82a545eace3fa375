"""DQBF data model and the DQDIMACS reader/writer.

Literals are plain DIMACS integers throughout the package: ``v`` is the
positive literal of variable ``v`` and ``-v`` its negation.  A clause is a
tuple of literals, a CNF a tuple of clauses.  Assignments are dicts mapping
variables to bools; ``term`` converts them into literal lists so they can be
handed to a SAT solver as assumptions.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

log = logging.getLogger(__name__)

Clause = Tuple[int, ...]
CNF = Tuple[Clause, ...]
Assignment = Dict[int, bool]

UNDETERMINED = None


class DQDimacsError(ValueError):
    """Malformed DQDIMACS input; carries a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def negate(lit: int) -> int:
    return -lit


def normalize_clause(lits: Iterable[int]) -> Optional[Clause]:
    """Deduplicate literals; return None for a tautology."""
    seen = {}
    for lit in lits:
        if -lit in seen:
            return None
        seen[lit] = None
    return tuple(seen)


def term(assignment: Mapping[int, bool]) -> list:
    """The literals of an assignment, in ascending variable order."""
    return [v if val else -v for v, val in sorted(assignment.items())]


def assignment_of(lits: Iterable[int]) -> Assignment:
    out: Assignment = {}
    for lit in lits:
        v, val = abs(lit), lit > 0
        if out.get(v, val) != val:
            raise ValueError(f"contradictory literals for variable {v}")
        out[v] = val
    return out


def restrict(sigma: Mapping[int, bool], variables: Iterable[int]) -> Assignment:
    keep = set(variables)
    return {v: val for v, val in sigma.items() if v in keep}


def evaluate_cnf(cnf: Iterable[Sequence[int]], sigma: Mapping[int, bool]) -> Optional[bool]:
    """Three-valued evaluation: True, False, or None when undetermined."""
    result: Optional[bool] = True
    for clause in cnf:
        satisfied = False
        open_lit = False
        for lit in clause:
            val = sigma.get(abs(lit))
            if val is None:
                open_lit = True
            elif val == (lit > 0):
                satisfied = True
                break
        if satisfied:
            continue
        if not open_lit:
            return False
        result = UNDETERMINED
    return result


def cnf_vars(cnf: Iterable[Sequence[int]]) -> set:
    return {abs(lit) for clause in cnf for lit in clause}


@dataclass(frozen=True)
class DQBF:
    """A DQBF in prenex CNF.

    ``deps`` maps every existential to its dependency set.  ``num_vars`` is
    the declared variable count; fresh variables used by the solver are
    allocated above it.
    """

    universals: Tuple[int, ...]
    existentials: Tuple[int, ...]
    deps: Mapping[int, FrozenSet[int]]
    matrix: CNF
    num_vars: int = 0
    free_vars: Tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        uni = set(self.universals)
        ex = set(self.existentials)
        if uni & ex:
            raise ValueError(f"variables quantified twice: {sorted(uni & ex)}")
        for e in self.existentials:
            if not self.deps[e] <= uni:
                raise ValueError(f"dependency set of {e} is not universal")
        stray = cnf_vars(self.matrix) - uni - ex
        if stray:
            raise ValueError(f"unquantified matrix variables: {sorted(stray)}")
        top = max([0, *uni, *ex, *cnf_vars(self.matrix)])
        if self.num_vars < top:
            object.__setattr__(self, "num_vars", top)

    @classmethod
    def build(cls, universals, deps: Mapping[int, Iterable[int]], matrix, num_vars: int = 0) -> "DQBF":
        """Convenience constructor; ``deps`` order defines the existential order."""
        clauses = []
        for c in matrix:
            norm = normalize_clause(c)
            if norm is not None and norm not in clauses:
                clauses.append(norm)
        return cls(
            universals=tuple(universals),
            existentials=tuple(deps),
            deps={e: frozenset(d) for e, d in deps.items()},
            matrix=tuple(clauses),
            num_vars=num_vars,
        )

    def structure(self) -> tuple:
        """Comparable form that ignores clause and literal order."""
        return (
            tuple(sorted(self.universals)),
            tuple(sorted((e, tuple(sorted(self.deps[e]))) for e in self.existentials)),
            tuple(sorted(tuple(sorted(c)) for c in self.matrix)),
        )


_INT = re.compile(r"-?\d+")


def _ints(tokens, lineno, line):
    out = []
    col = 0
    for tok in tokens:
        col = line.index(tok, col) + 1
        if not _INT.fullmatch(tok):
            raise DQDimacsError(f"expected integer, got {tok!r}", lineno, col)
        out.append((int(tok), col))
        col += len(tok) - 1
    return out


def parse_dqdimacs(text) -> DQBF:
    """Parse DQDIMACS text (str or bytes) into a :class:`DQBF`.

    Tautological clauses are dropped and duplicate literals merged.  Matrix
    variables missing from the prefix become existentials depending on all
    universals, with a warning.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii")
    header = None
    universals: list = []
    deps: Dict[int, FrozenSet[int]] = {}
    quantified: set = set()
    clauses: list = []
    seen_clauses: set = set()
    pending: list = []
    pending_line = 0
    in_matrix = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        if header is None:
            if tokens[0] != "p":
                raise DQDimacsError("expected header 'p cnf <vars> <clauses>'", lineno)
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise DQDimacsError("malformed header", lineno)
            nums = _ints(tokens[2:], lineno, raw)
            if any(n < 0 for n, _ in nums):
                raise DQDimacsError("negative count in header", lineno, nums[0][1])
            header = (nums[0][0], nums[1][0])
            continue
        kind = tokens[0]
        if kind == "p":
            raise DQDimacsError("duplicate header", lineno)
        if kind in ("a", "e", "d"):
            if in_matrix or pending:
                raise DQDimacsError("quantifier line after clauses", lineno)
            nums = _ints(tokens[1:], lineno, raw)
            if not nums or nums[-1][0] != 0:
                raise DQDimacsError("quantifier line must end with 0", lineno, len(raw.rstrip()) + 1)
            body = nums[:-1]
            for v, col in body:
                if v <= 0:
                    raise DQDimacsError(f"invalid variable {v}", lineno, col)
                if v > header[0]:
                    raise DQDimacsError(f"variable {v} exceeds declared count {header[0]}", lineno, col)
            if kind == "d":
                if not body:
                    raise DQDimacsError("'d' line needs a variable", lineno)
                (v, col), dep_list = body[0], body[1:]
                if v in quantified:
                    raise DQDimacsError(f"variable {v} quantified twice", lineno, col)
                uset = set(universals)
                for u, ucol in dep_list:
                    if u not in uset:
                        raise DQDimacsError(f"dependency {u} is not a declared universal", lineno, ucol)
                quantified.add(v)
                deps[v] = frozenset(u for u, _ in dep_list)
                continue
            for v, col in body:
                if v in quantified:
                    raise DQDimacsError(f"variable {v} quantified twice", lineno, col)
                quantified.add(v)
                if kind == "a":
                    universals.append(v)
                else:
                    deps[v] = frozenset(universals)
            continue
        in_matrix = True
        if not pending:
            pending_line = lineno
        for v, col in _ints(tokens, lineno, raw):
            if abs(v) > header[0]:
                raise DQDimacsError(f"literal {v} exceeds declared count {header[0]}", lineno, col)
            if v == 0:
                norm = normalize_clause(pending)
                pending = []
                if norm is not None and norm not in seen_clauses:
                    seen_clauses.add(norm)
                    clauses.append(norm)
            else:
                pending.append(v)

    if header is None:
        raise DQDimacsError("missing header", 1)
    if pending:
        raise DQDimacsError("unterminated clause", pending_line)

    free = sorted(cnf_vars(clauses) - quantified)
    if free:
        log.warning("free variables %s treated as existential over all universals", free)
        for v in free:
            deps[v] = frozenset(universals)
    return DQBF(
        universals=tuple(universals),
        existentials=tuple(deps),
        deps=deps,
        matrix=tuple(clauses),
        num_vars=header[0],
        free_vars=tuple(free),
    )


def write_dqdimacs(dqbf: DQBF) -> str:
    """Serialize using one ``a`` line and one ``d`` line per existential."""
    lines = [f"p cnf {dqbf.num_vars} {len(dqbf.matrix)}"]
    if dqbf.universals:
        lines.append("a " + " ".join(map(str, dqbf.universals)) + " 0")
    for e in dqbf.existentials:
        d = sorted(dqbf.deps[e])
        lines.append("d " + " ".join(map(str, [e, *d])) + " 0")
    for clause in dqbf.matrix:
        lines.append(" ".join(map(str, [*clause, 0])))
    return "\n".join(lines) + "\n"
