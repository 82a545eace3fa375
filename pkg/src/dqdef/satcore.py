"""A small incremental CDCL SAT solver.

Two watched literals, first-UIP learning, VSIDS with a lazy heap, phase
saving and Luby restarts.  ``solve`` accepts assumptions and reports a
failed-assumption core on UNSAT.  With ``proof=True`` every learnt clause
records the resolution chain that derived it, which :func:`solve_with_proof`
turns into an explicit :class:`ResolutionProof`.

Literals at the API boundary are DIMACS integers.  Internally literal
``v`` is ``2*v`` and ``-v`` is ``2*v + 1``.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

__all__ = [
    "Solver",
    "Leaf",
    "Res",
    "ResolutionProof",
    "ProofError",
    "get_core",
    "solve_with_proof",
    "check_proof",
]


class ProofError(ValueError):
    pass


def _ilit(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


def _dlit(ilit: int) -> int:
    return -(ilit >> 1) if ilit & 1 else ilit >> 1


def _luby(i: int) -> int:
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class _Clause:
    __slots__ = ("lits", "cid", "learnt")

    def __init__(self, lits, cid, learnt):
        self.lits = lits
        self.cid = cid
        self.learnt = learnt


class Solver:
    """Incremental CDCL solver.

    >>> s = Solver([(1, 2), (-1,)])
    >>> s.solve()
    True
    >>> s.value(2)
    True
    >>> s.solve([-2])
    False
    >>> s.core
    [-2]
    """

    restart_base = 100
    var_decay = 0.95

    def __init__(self, clauses: Iterable[Sequence[int]] = (), seed: int = 0, proof: bool = False):
        self.nvars = 0
        self._rng = random.Random(seed)
        self._proof = proof
        self._val: List[int] = [0, 0]  # per internal literal: 1 true, -1 false, 0 open
        self._level: List[int] = [0]
        self._reason: List[Optional[_Clause]] = [None]
        self._activity: List[float] = [0.0]
        self._phase: List[bool] = [False]
        self._watches: List[List[_Clause]] = [[], []]
        self._heap: list = []
        self._trail: List[int] = []
        self._trail_lim: List[int] = []
        self._qhead = 0
        self._inc = 1.0
        self._ok = True
        self._empty_chain = None  # proof of the empty clause, once derived
        self._clauses: List[_Clause] = []
        # proof bookkeeping: cid -> ("leaf", lits, tag) | ("chain", start, [(var, cid)])
        self._derivation: Dict[int, tuple] = {}
        self._next_cid = 0
        self.model: Dict[int, bool] = {}
        self.core: List[int] = []
        self.stats = {"conflicts": 0, "decisions": 0, "propagations": 0, "solves": 0}
        for c in clauses:
            self.add_clause(c)

    # -- variables ------------------------------------------------------

    def new_var(self) -> int:
        self._ensure(self.nvars + 1)
        return self.nvars

    def _ensure(self, v: int):
        while self.nvars < v:
            self.nvars += 1
            self._val += [0, 0]
            self._level.append(0)
            self._reason.append(None)
            act = self._rng.random() * 1e-5
            self._activity.append(act)
            self._phase.append(False)
            self._watches += [[], []]
            heapq.heappush(self._heap, (-act, self.nvars))

    def set_polarity(self, v: int, value: bool):
        """Preferred value for decisions on ``v`` (until phase saving overrides it)."""
        self._ensure(v)
        self._phase[v] = bool(value)

    # -- clauses --------------------------------------------------------

    def add_clause(self, clause: Iterable[int], tag: str = "A") -> bool:
        """Add a clause; returns False once the clause set is known UNSAT."""
        lits = []
        seen = set()
        for lit in clause:
            if lit == 0:
                raise ValueError("0 is not a literal")
            if -lit in seen:
                if self._proof:
                    raise ValueError("tautological clause in proof mode")
                return self._ok
            if lit not in seen:
                seen.add(lit)
                lits.append(lit)
        if lits:
            self._ensure(max(abs(l) for l in lits))
        self._cancel_until(0)
        cid = self._next_cid
        self._next_cid += 1
        if self._proof:
            self._derivation[cid] = ("leaf", tuple(lits), tag)
        if not self._ok:
            return False
        ilits = [_ilit(l) for l in lits]
        val = self._val
        # non-false literals first
        ilits.sort(key=lambda x: val[x] < 0)
        c = _Clause(ilits, cid, False)
        self._clauses.append(c)
        if not ilits:
            self._set_unsat(c)
            return False
        if val[ilits[0]] < 0:
            self._set_unsat(c)
            return False
        if len(ilits) == 1 or val[ilits[1]] < 0:
            if val[ilits[0]] == 0:
                self._enqueue(ilits[0], c)
        if len(ilits) > 1:
            self._watches[ilits[0]].append(c)
            self._watches[ilits[1]].append(c)
        return True

    def _set_unsat(self, conflict: _Clause):
        self._ok = False
        if self._proof:
            self._empty_chain = self._derive_empty(conflict)

    # -- assignment -----------------------------------------------------

    def _enqueue(self, p: int, reason: Optional[_Clause]):
        self._val[p] = 1
        self._val[p ^ 1] = -1
        v = p >> 1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(p)

    def _cancel_until(self, level: int):
        if len(self._trail_lim) <= level:
            return
        val, phase, heap, act = self._val, self._phase, self._heap, self._activity
        stop = self._trail_lim[level]
        for i in range(len(self._trail) - 1, stop - 1, -1):
            p = self._trail[i]
            v = p >> 1
            val[p] = 0
            val[p ^ 1] = 0
            self._reason[v] = None
            phase[v] = not (p & 1)
            heapq.heappush(heap, (-act[v], v))
        del self._trail[stop:]
        del self._trail_lim[level:]
        self._qhead = min(self._qhead, stop)

    def _propagate(self) -> Optional[_Clause]:
        val = self._val
        watches = self._watches
        trail = self._trail
        n = 0
        while self._qhead < len(trail):
            p = trail[self._qhead]
            self._qhead += 1
            n += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            end = len(ws)
            while i < end:
                c = ws[i]
                i += 1
                lits = c.lits
                if lits[0] == false_lit:
                    lits[0], lits[1] = lits[1], false_lit
                first = lits[0]
                if val[first] > 0:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(lits)):
                    if val[lits[k]] >= 0:
                        lits[1], lits[k] = lits[k], false_lit
                        watches[lits[1]].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] < 0:
                        while i < end:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self._qhead = len(trail)
                        self.stats["propagations"] += n
                        return c
                    self._enqueue(first, c)
            del ws[j:]
        self.stats["propagations"] += n
        return None

    # -- learning -------------------------------------------------------

    def _bump(self, v: int):
        act = self._activity
        act[v] += self._inc
        if act[v] > 1e100:
            for u in range(1, self.nvars + 1):
                act[u] *= 1e-100
            self._inc *= 1e-100
            self._heap = [(-act[u], u) for u in range(1, self.nvars + 1) if self._val[2 * u] == 0]
            heapq.heapify(self._heap)
        elif self._val[2 * v] == 0:
            heapq.heappush(self._heap, (-act[v], v))

    def _analyze(self, confl: _Clause):
        level, reason, trail = self._level, self._reason, self._trail
        seen = set()
        learnt = [0]
        dl = len(self._trail_lim)
        counter = 0
        p = None
        idx = len(trail) - 1
        chain = [] if self._proof else None
        c = confl
        keep_root = self._proof
        while True:
            for q in c.lits if p is None else c.lits[1:]:
                v = q >> 1
                if v in seen:
                    continue
                lv = level[v]
                if lv == 0 and not keep_root:
                    continue
                seen.add(v)
                self._bump(v)
                if lv == dl:
                    counter += 1
                else:
                    learnt.append(q)
            while (trail[idx] >> 1) not in seen or level[trail[idx] >> 1] != dl:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            counter -= 1
            if counter == 0:
                break
            c = reason[v]
            if chain is not None:
                chain.append((v, c.cid))
        learnt[0] = p ^ 1
        if len(learnt) == 1:
            bt = 0
        else:
            best = 1
            for k in range(2, len(learnt)):
                if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                    best = k
            learnt[1], learnt[best] = learnt[best], learnt[1]
            bt = level[learnt[1] >> 1]
        derivation = (confl.cid, chain) if chain is not None else None
        return learnt, bt, derivation

    def _derive_empty(self, confl: _Clause):
        """Chain deriving the empty clause from a conflict at level 0."""
        current = {q for q in confl.lits}
        chain = []
        for p in reversed(self._trail):
            if p ^ 1 in current:
                r = self._reason[p >> 1]
                chain.append((p >> 1, r.cid))
                current.discard(p ^ 1)
                current.update(q for q in r.lits if q != p)
        if current:
            raise AssertionError("level-0 conflict did not resolve to the empty clause")
        return (confl.cid, chain)

    def _analyze_final(self, p: int) -> List[int]:
        """Assumptions responsible for ``p`` being false (p itself included)."""
        out = [p]
        if not self._trail_lim:
            return out
        seen = {p >> 1}
        level, reason = self._level, self._reason
        for i in range(len(self._trail) - 1, self._trail_lim[0] - 1, -1):
            q = self._trail[i]
            v = q >> 1
            if v not in seen:
                continue
            r = reason[v]
            if r is None:
                out.append(q)
            else:
                for x in r.lits[1:]:
                    if level[x >> 1] > 0:
                        seen.add(x >> 1)
        return out

    # -- search ---------------------------------------------------------

    def _pick_branch(self) -> Optional[int]:
        heap, val = self._heap, self._val
        while heap:
            _, v = heapq.heappop(heap)
            if val[2 * v] == 0:
                return 2 * v + (0 if self._phase[v] else 1)
        return None

    def solve(self, assumptions: Iterable[int] = ()) -> bool:
        """Return True (model in ``self.model``) or False (core in ``self.core``)."""
        assumptions = list(assumptions)
        if self._proof and assumptions:
            raise ValueError("assumptions are not supported with proof logging")
        self.stats["solves"] += 1
        self.model = {}
        self.core = []
        if assumptions:
            self._ensure(max(abs(a) for a in assumptions))
        self._cancel_until(0)
        if not self._ok:
            return False
        assume = [_ilit(a) for a in assumptions]
        val = self._val
        conflicts = 0
        restart_idx = 0
        limit = _luby(restart_idx) * self.restart_base
        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats["conflicts"] += 1
                conflicts += 1
                if not self._trail_lim:
                    self._set_unsat(confl)
                    return False
                learnt, bt, derivation = self._analyze(confl)
                self._cancel_until(bt)
                cid = self._next_cid
                self._next_cid += 1
                c = _Clause(learnt, cid, True)
                if derivation is not None:
                    self._derivation[cid] = ("chain",) + derivation
                if len(learnt) > 1:
                    self._watches[learnt[0]].append(c)
                    self._watches[learnt[1]].append(c)
                self._clauses.append(c)
                self._enqueue(learnt[0], c)
                self._inc /= self.var_decay
                if conflicts >= limit:
                    restart_idx += 1
                    limit = conflicts + _luby(restart_idx) * self.restart_base
                    self._cancel_until(0)
                continue
            dl = len(self._trail_lim)
            if dl < len(assume):
                p = assume[dl]
                if val[p] > 0:
                    self._trail_lim.append(len(self._trail))
                    continue
                if val[p] < 0:
                    failed = {_dlit(q) for q in self._analyze_final(p)}
                    self.core = [a for a in dict.fromkeys(assumptions) if a in failed]
                    self._cancel_until(0)
                    return False
                self._trail_lim.append(len(self._trail))
                self._enqueue(p, None)
                continue
            p = self._pick_branch()
            if p is None:
                self.model = {v: val[2 * v] > 0 for v in range(1, self.nvars + 1)}
                self._cancel_until(0)
                return True
            self.stats["decisions"] += 1
            self._trail_lim.append(len(self._trail))
            self._enqueue(p, None)

    def value(self, lit: int) -> Optional[bool]:
        """Value of ``lit`` in the last model (None if the variable is unknown)."""
        v = self.model.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v

    @property
    def ok(self) -> bool:
        return self._ok

    # -- proofs ---------------------------------------------------------

    def proof(self) -> "ResolutionProof":
        if not self._proof:
            raise ValueError("solver was created without proof logging")
        if self._empty_chain is None:
            raise ValueError("no refutation has been derived")
        return _build_proof(self._derivation, self._empty_chain)


# -- resolution proofs ---------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    clause: Tuple[int, ...]
    tag: str


@dataclass(frozen=True)
class Res:
    """Resolution on ``pivot``: ``pivot`` occurs in ``left``, ``-pivot`` in ``right``."""

    pivot: int
    left: int
    right: int
    clause: Tuple[int, ...]


@dataclass(frozen=True)
class ResolutionProof:
    """Steps in topological order; the last step derives the empty clause."""

    steps: Tuple[object, ...]

    def __len__(self):
        return len(self.steps)

    @property
    def root(self) -> int:
        return len(self.steps) - 1


def _resolve(c1: Tuple[int, ...], c2: Tuple[int, ...], var: int) -> Tuple[int, ...]:
    out = []
    for lit in (*c1, *c2):
        if abs(lit) != var and lit not in out:
            out.append(lit)
    return tuple(sorted(out, key=lambda l: (abs(l), l)))


def _build_proof(derivation, empty_chain) -> ResolutionProof:
    needed = set()
    stack = [empty_chain[0]] + [cid for _, cid in empty_chain[1]]
    while stack:
        cid = stack.pop()
        if cid in needed:
            continue
        needed.add(cid)
        d = derivation[cid]
        if d[0] == "chain":
            stack.append(d[1])
            stack.extend(c for _, c in d[2])
    steps: list = []
    index: Dict[int, int] = {}

    def fold(start, chain):
        cur = index[start]
        for var, cid in chain:
            other = index[cid]
            a, b = steps[cur].clause, steps[other].clause
            res = _resolve(a, b, var)
            if var in a:
                steps.append(Res(var, cur, other, res))
            else:
                steps.append(Res(var, other, cur, res))
            cur = len(steps) - 1
        return cur

    for cid in sorted(needed):
        d = derivation[cid]
        if d[0] == "leaf":
            steps.append(Leaf(tuple(d[1]), d[2]))
            index[cid] = len(steps) - 1
        else:
            index[cid] = fold(d[1], d[2])
    root = fold(*empty_chain)
    if steps[root].clause:
        raise ProofError("proof does not end in the empty clause")
    if root != len(steps) - 1:
        raise ProofError("empty clause is not the last step")
    return ResolutionProof(tuple(steps))


def check_proof(proof: ResolutionProof, a_clauses=None, b_clauses=None) -> None:
    """Replay every step; raise :class:`ProofError` on the first mismatch.

    When clause sets are given, leaves must be members of the partition
    named by their tag.
    """
    parts = None
    if a_clauses is not None:
        parts = {
            "A": {frozenset(c) for c in a_clauses},
            "B": {frozenset(c) for c in (b_clauses or ())},
        }
    for i, step in enumerate(proof.steps):
        if isinstance(step, Leaf):
            if step.tag not in ("A", "B"):
                raise ProofError(f"step {i}: unknown tag {step.tag!r}")
            if parts is not None and frozenset(step.clause) not in parts[step.tag]:
                raise ProofError(f"step {i}: leaf {step.clause} not in partition {step.tag}")
            continue
        if not (step.left < i and step.right < i):
            raise ProofError(f"step {i}: antecedent out of order")
        left = proof.steps[step.left].clause
        right = proof.steps[step.right].clause
        if step.pivot not in left or -step.pivot not in right:
            raise ProofError(f"step {i}: pivot {step.pivot} misplaced")
        expected = set(left) | set(right)
        expected -= {step.pivot, -step.pivot}
        if expected != set(step.clause):
            raise ProofError(f"step {i}: resolvent mismatch")
    if not proof.steps or proof.steps[-1].clause:
        raise ProofError("final clause is not empty")


def solve_with_proof(a_clauses: Iterable[Sequence[int]], b_clauses: Iterable[Sequence[int]], seed: int = 0):
    """Solve A ∧ B; return ``(True, model)`` or ``(False, proof)``.

    Leaves of the proof are tagged ``"A"`` or ``"B"`` by origin.
    """
    s = Solver(seed=seed, proof=True)
    for c in a_clauses:
        s.add_clause(c, "A")
    for c in b_clauses:
        s.add_clause(c, "B")
    if s.solve():
        return True, s.model
    return False, s.proof()


def get_core(solver_or_clauses, assumptions: Sequence[int], minimize: bool = True) -> List[int]:
    """A failed-assumption core, shrunk by iterative deletion.

    Accepts a :class:`Solver` (reused incrementally) or a clause list.
    Raises ValueError if the formula is satisfiable under ``assumptions``.
    """
    s = solver_or_clauses if isinstance(solver_or_clauses, Solver) else Solver(solver_or_clauses)
    if s.solve(assumptions):
        raise ValueError("get_core called on a satisfiable query")
    core = list(s.core)
    if not minimize:
        return core
    i = 0
    while i < len(core):
        trial = core[:i] + core[i + 1:]
        if s.solve(trial):
            i += 1
        else:
            keep = set(s.core)
            core = [l for l in trial if l in keep]
    return core
