"""Hash-consed and-inverter graphs.

An :class:`AIG` owns a node table; circuits are *edges* into it, encoded as
``2 * node + negated``.  Node 0 is the constant, so edge ``FALSE == 0`` and
``TRUE == 1``.  Structural hashing makes ``AND(x, x) == x`` and negation is a
bit flip, which collapses double negation for free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional

FALSE = 0
TRUE = 1

_CONST, _INPUT, _AND = 0, 1, 2


class AIG:
    def __init__(self):
        # node: (kind, a, b); for inputs a is the variable
        self._nodes: List[tuple] = [(_CONST, 0, 0)]
        self._inputs: Dict[int, int] = {}
        self._ands: Dict[tuple, int] = {}

    def __len__(self):
        return len(self._nodes)

    @staticmethod
    def const(value: bool) -> int:
        return TRUE if value else FALSE

    def var(self, v: int) -> int:
        node = self._inputs.get(v)
        if node is None:
            node = len(self._nodes)
            self._nodes.append((_INPUT, v, 0))
            self._inputs[v] = node
        return 2 * node

    def lit(self, lit: int) -> int:
        """Edge for a DIMACS literal."""
        return self.var(abs(lit)) ^ (lit < 0)

    @staticmethod
    def NOT(a: int) -> int:
        return a ^ 1

    def AND(self, a: int, b: int) -> int:
        if a == FALSE or b == FALSE or a == b ^ 1:
            return FALSE
        if a == TRUE or a == b:
            return b
        if b == TRUE:
            return a
        if a > b:
            a, b = b, a
        node = self._ands.get((a, b))
        if node is None:
            node = len(self._nodes)
            self._nodes.append((_AND, a, b))
            self._ands[(a, b)] = node
        return 2 * node

    def OR(self, a: int, b: int) -> int:
        return self.AND(a ^ 1, b ^ 1) ^ 1

    def ITE(self, c: int, t: int, e: int) -> int:
        return self.OR(self.AND(c, t), self.AND(c ^ 1, e))

    def conj(self, edges: Iterable[int]) -> int:
        out = TRUE
        for x in edges:
            out = self.AND(out, x)
        return out

    def disj(self, edges: Iterable[int]) -> int:
        out = FALSE
        for x in edges:
            out = self.OR(out, x)
        return out

    # -- inspection -------------------------------------------------------

    def is_const(self, edge: int) -> bool:
        return edge >> 1 == 0

    def input_var(self, edge: int) -> Optional[int]:
        kind, v, _ = self._nodes[edge >> 1]
        return v if kind == _INPUT else None

    def _cone(self, roots: Iterable[int]) -> List[int]:
        """Nodes reachable from ``roots`` in topological (children-first) order."""
        order: List[int] = []
        done = set()
        stack = [(r >> 1, False) for r in roots]
        while stack:
            node, expanded = stack.pop()
            if node in done:
                continue
            kind, a, b = self._nodes[node]
            if expanded or kind != _AND:
                done.add(node)
                order.append(node)
                continue
            stack.append((node, True))
            for child in (a >> 1, b >> 1):
                if child not in done:
                    stack.append((child, False))
        return order

    def support(self, edge: int) -> set:
        return {self._nodes[n][1] for n in self._cone([edge]) if self._nodes[n][0] == _INPUT}

    def size(self, edge: int) -> int:
        """Number of AND nodes in the cone of ``edge``."""
        return sum(1 for n in self._cone([edge]) if self._nodes[n][0] == _AND)

    def evaluate(self, edge: int, assignment: Mapping[int, bool]) -> bool:
        val: Dict[int, bool] = {}
        for n in self._cone([edge]):
            kind, a, b = self._nodes[n]
            if kind == _CONST:
                val[n] = False
            elif kind == _INPUT:
                if a not in assignment:
                    raise KeyError(f"variable {a} unassigned")
                val[n] = bool(assignment[a])
            else:
                val[n] = (val[a >> 1] ^ bool(a & 1)) and (val[b >> 1] ^ bool(b & 1))
        return val[edge >> 1] ^ bool(edge & 1)

    # -- rewriting --------------------------------------------------------

    def substitute(self, edge: int, mapping: Mapping[int, int], target: Optional["AIG"] = None) -> int:
        """Replace input variables by edges (of ``target``, default self).

        Inputs absent from ``mapping`` are kept as inputs of ``target``.
        """
        dst = self if target is None else target
        out: Dict[int, int] = {}
        for n in self._cone([edge]):
            kind, a, b = self._nodes[n]
            if kind == _CONST:
                out[n] = FALSE
            elif kind == _INPUT:
                out[n] = mapping[a] if a in mapping else dst.var(a)
            else:
                out[n] = dst.AND(out[a >> 1] ^ (a & 1), out[b >> 1] ^ (b & 1))
        return out[edge >> 1] ^ (edge & 1)

    def tseitin(self, edge: int, fresh: Callable[[], int], clauses: list,
                cache: Optional[Dict[int, int]] = None) -> Optional[int]:
        """Encode ``edge`` into CNF; return the literal equivalent to it.

        Returns None for constant edges (the caller handles those).  Input
        nodes map to their own variable.  Gate variables come from ``fresh``
        and the defining clauses are appended to ``clauses``.  Passing the
        same ``cache`` across calls shares gate variables.
        """
        if edge >> 1 == 0:
            return None
        memo = {} if cache is None else cache
        for n in self._cone([edge]):
            if n in memo:
                continue
            kind, a, b = self._nodes[n]
            if kind == _INPUT:
                memo[n] = a
            elif kind == _AND:
                la = _edge_lit(memo, a)
                lb = _edge_lit(memo, b)
                g = fresh()
                clauses.append((-g, la))
                clauses.append((-g, lb))
                clauses.append((g, -la, -lb))
                memo[n] = g
        lit = memo[edge >> 1]
        return -lit if edge & 1 else lit


def _edge_lit(memo, edge):
    lit = memo[edge >> 1]
    return -lit if edge & 1 else lit


@dataclass(frozen=True)
class Circuit:
    """A single-output view into an :class:`AIG`."""

    aig: AIG
    root: int

    def evaluate(self, assignment: Mapping[int, bool]) -> bool:
        return self.aig.evaluate(self.root, assignment)

    def support(self) -> set:
        return self.aig.support(self.root)

    def size(self) -> int:
        return self.aig.size(self.root)

    def is_const(self) -> bool:
        return self.aig.is_const(self.root)

    def const_value(self) -> Optional[bool]:
        if not self.is_const():
            return None
        return self.root == TRUE
