"""The two decision procedures: two-phase extraction and the CEGIS loop."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .circuit import AIG, Circuit
from .definability import query, verify_definition
from .formula import DQBF, Assignment, term
from .satcore import Solver, get_core
from .synth import ArbiterRegistry, check_consistency, forcing_premise, set_assignment
from . import certify

log = logging.getLogger(__name__)


class InvariantError(RuntimeError):
    """An internal invariant failed; the result of the run cannot be trusted."""


@dataclass
class Config:
    mode: str = "cegis"
    default: bool = False
    unates: str = "syntactic"  # off | syntactic | semantic (CEGIS only)
    seed: int = 0
    max_iterations: int = 10 ** 6
    debug: bool = False

    def __post_init__(self):
        if self.mode not in ("cegis", "basic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.unates not in ("off", "syntactic", "semantic"):
            raise ValueError(f"unknown unate policy {self.unates!r}")


@dataclass
class Verdict:
    value: bool
    model: Optional[certify.Model] = None
    state: Optional["SolverState"] = field(default=None, repr=False)

    @property
    def stats(self) -> Dict[str, int]:
        return self.state.stats if self.state is not None else {}


def detect_unates(dqbf: DQBF, semantic: bool = False) -> List[int]:
    """Existential literals that can be fixed to true without losing models.

    Pure literals always qualify.  With ``semantic``, ℓ also qualifies when
    every clause of φ|ℓ is implied by φ|¬ℓ.  At most one polarity per
    variable is returned, the positive one first.
    """
    pos, neg = set(), set()
    for c in dqbf.matrix:
        for lit in c:
            (pos if lit > 0 else neg).add(abs(lit))
    out = []
    for e in sorted(dqbf.existentials):
        if e in pos and e not in neg:
            out.append(e)
        elif e in neg and e not in pos:
            out.append(-e)
        elif semantic and e in pos and e in neg:
            for lit in (e, -e):
                if _semantic_unate(dqbf.matrix, lit):
                    out.append(lit)
                    break
    return out


def _cofactor(matrix, lit):
    return [tuple(l for l in c if l != -lit) for c in matrix if lit not in c]


def _semantic_unate(matrix, lit) -> bool:
    weaker = _cofactor(matrix, -lit)
    s = Solver(weaker)
    for c in _cofactor(matrix, lit):
        if s.solve([-l for l in c]):
            return False
    return True


def _negated_matrix(matrix, fresh, clauses):
    selectors = []
    for c in matrix:
        d = fresh()
        selectors.append(d)
        clauses.extend((-d, -l) for l in c)
    clauses.append(tuple(selectors))


class SolverState:
    def __init__(self, dqbf: DQBF, config: Config):
        self.dqbf = dqbf
        self.config = config
        self.aig = AIG()
        self.registry = ArbiterRegistry(dqbf)
        self.defs: Dict[int, int] = {}
        self.tau: Assignment = {}
        self.defaults = {e: config.default for e in dqbf.existentials}
        self.order = sorted(dqbf.existentials, key=lambda e: (len(dqbf.deps[e]), e))
        self.unates: List[int] = []
        self.phi = [tuple(c) for c in dqbf.matrix]
        self.arbiter_solver = Solver(seed=config.seed)
        self.learned: List[tuple] = []
        self.psi: Optional[Solver] = None
        self.stats: Dict[str, int] = {
            "iterations": 0, "arbiters": 0, "arbiter_clauses": 0, "forcing": 0,
            "definitions": 0, "definability_queries": 0, "universal_repeats": 0,
            "consistency_failures": 0,
        }
        self._seen_full = set()
        self._seen_universal = set()

    # -- bookkeeping ----------------------------------------------------

    @property
    def universals(self):
        return self.dqbf.universals

    def sigma_u(self, sigma: Assignment) -> Assignment:
        return {u: sigma.get(u, False) for u in self.dqbf.universals}

    def psi_clauses(self) -> List[tuple]:
        return self.phi + self.registry.clauses()

    def new_arbiter_clauses(self, clauses):
        for c in clauses:
            self.psi.add_clause(c)

    def register_arbiter(self, a, polarity: bool):
        self.arbiter_solver.set_polarity(a.var, polarity)
        self.stats["arbiters"] = len(self.registry)

    def learn(self, clause):
        self.learned.append(tuple(clause))
        self.stats["arbiter_clauses"] += 1
        self.arbiter_solver.add_clause(clause)

    def candidate(self, e: int) -> int:
        if e in self.defs:
            return self.defs[e]
        return certify.decision_list(self.aig, self.registry, e, self.defaults[e])

    def support(self, e: int, cegis: bool) -> frozenset:
        d = self.dqbf.deps[e]
        s = set(d) | set(self.registry.vars)
        if cegis:
            for x in self.order:
                if x == e:
                    break
                if x in self.defs and self.dqbf.deps[x] <= d:
                    s.add(x)
        return frozenset(s)

    def define(self, e: int, support, phi):
        """Run one definability query; record the definition if there is one."""
        self.stats["definability_queries"] += 1
        r = query(e, support, phi, aig=self.aig, seed=self.config.seed)
        if not r.defined:
            return r
        if self.config.debug:
            _check_interpolant(r)
            if not verify_definition(e, r.definition, phi):
                raise InvariantError(f"extracted definition of {e} does not verify")
        self.defs[e] = r.definition.root
        self.stats["definitions"] += 1
        return r

    def note_counterexample(self, sigma: Assignment):
        tau_key = frozenset(self.tau.items())
        full = (frozenset(sigma.items()), tau_key)
        if full in self._seen_full:
            raise InvariantError("counterexample repeated")
        self._seen_full.add(full)
        uni = (frozenset(self.sigma_u(sigma).items()), tau_key)
        if uni in self._seen_universal:
            self.stats["universal_repeats"] += 1
        self._seen_universal.add(uni)

    def tick(self):
        self.stats["iterations"] += 1
        if self.stats["iterations"] > self.config.max_iterations:
            raise InvariantError(f"iteration cap {self.config.max_iterations} exceeded")

    def arbiter_cap_ok(self) -> bool:
        counts: Dict[int, int] = {}
        for a in self.registry.arbiters:
            counts[a.base] = counts.get(a.base, 0) + 1
        return all(n <= 2 ** len(self.dqbf.deps[e]) for e, n in counts.items())

    def build_checker(self) -> Solver:
        """¬φ ∧ ⋀ (e ↔ candidate(e)) as a fresh solver."""
        clauses: List[tuple] = []
        top = [max([self.dqbf.num_vars, *self.registry.vars])]

        def fresh():
            top[0] += 1
            return top[0]

        for e in self.order:
            edge = self.candidate(e)
            root = self.aig.tseitin(edge, fresh, clauses)
            if root is None:
                clauses.append((e,) if edge & 1 else (-e,))
            else:
                clauses += [(-e, root), (e, -root)]
        _negated_matrix(self.phi, fresh, clauses)
        return Solver(clauses, seed=self.config.seed)

    def finish(self, value: bool) -> Verdict:
        self.stats["arbiters"] = len(self.registry)
        self.stats["forcing"] = len(self.registry.forcing)
        if not self.arbiter_cap_ok():
            raise InvariantError("more arbiters than dependency assignments")
        if not value:
            return Verdict(False, None, self)
        return Verdict(True, certify.assemble_model(self), self)


def _check_interpolant(r):
    """A ⊨ I and I ∧ B unsatisfiable."""
    c: Circuit = r.definition
    top = [max(abs(l) for cl in (*r.a_clauses, *r.b_clauses) for l in cl)]

    def fresh():
        top[0] += 1
        return top[0]

    for side, negate in ((r.a_clauses, True), (r.b_clauses, False)):
        clauses = [tuple(x) for x in side]
        root = c.aig.tseitin(c.root, fresh, clauses)
        if root is None:
            root = fresh()
            clauses.append((root,) if c.const_value() else (-root,))
        clauses.append((-root,) if negate else (root,))
        if Solver(clauses).solve():
            raise InvariantError("interpolant check failed")


# -- two-phase algorithm --------------------------------------------------


def solve_basic(dqbf: DQBF, config: Optional[Config] = None) -> Verdict:
    cfg = config or Config(mode="basic")
    st = SolverState(dqbf, cfg)
    reg = st.registry

    for e in st.order:
        while True:
            st.tick()
            r = st.define(e, st.support(e, cegis=False), st.psi_clauses())
            if r.defined:
                break
            a, new = reg.register(e, r.witness)
            if not new:
                raise InvariantError(f"witness for {e} hit an existing arbiter")
            st.register_arbiter(a, cfg.default)

    st.tau = {a: cfg.default for a in reg.vars}
    validity = st.build_checker()
    st.psi = Solver(st.psi_clauses(), seed=cfg.seed)
    while True:
        st.tick()
        if not validity.solve(term(st.tau)):
            return st.finish(True)
        sigma = validity.model
        assumptions = term(st.tau) + term(st.sigma_u(sigma))
        try:
            rho = get_core(st.psi, assumptions)
        except ValueError:
            raise InvariantError("validity counterexample is consistent with the arbiter clauses") from None
        st.learn([-l for l in rho if abs(l) in reg])
        if not st.arbiter_solver.solve():
            return st.finish(False)
        st.tau = {a: st.arbiter_solver.model.get(a, cfg.default) for a in reg.vars}


# -- CEGIS ----------------------------------------------------------------


def find_definitions(st: SolverState, stamps: Dict[int, tuple]):
    phi = None
    for e in st.order:
        if e in st.defs:
            continue
        stamp = (len(st.registry.arbiter_clauses), len(st.registry.forcing), len(st.defs))
        if stamps.get(e) == stamp:
            continue
        if phi is None or len(phi) != len(st.psi_clauses()):
            phi = st.psi_clauses()
        if not st.define(e, st.support(e, cegis=True), phi).defined:
            stamps[e] = stamp


def check_arbiter_assignment(st: SolverState) -> Optional[Assignment]:
    """None when the candidates form a model, else a counterexample."""
    checker = st.build_checker()
    if checker.solve(term(st.tau)):
        visible = (*st.dqbf.universals, *st.dqbf.existentials)
        return {v: checker.model.get(v, False) for v in visible}
    sigma = check_consistency(st.registry.clauses(), st.tau, st.dqbf.universals, st.dqbf.existentials)
    if sigma is not None:
        st.stats["consistency_failures"] += 1
    return sigma


def analyze_conflict(st: SolverState, sigma: Assignment) -> bool:
    """True when forcing clauses were added, False after learning an arbiter clause."""
    dqbf, reg, psi = st.dqbf, st.registry, st.psi
    ex = set(dqbf.existentials)
    sigma_u = st.sigma_u(sigma)
    u_term = term(sigma_u)
    tau_term = term(st.tau)
    e_term = [l for l in term(sigma) if abs(l) in ex]
    try:
        rho = get_core(psi, e_term + tau_term + u_term)
    except ValueError:
        raise InvariantError("counterexample is consistent with φ ∧ φ_A ∧ φ_F") from None
    rho_e = sorted((l for l in rho if abs(l) in ex), key=abs)
    rho_a = {abs(l): l > 0 for l in rho if abs(l) in reg}
    premise = u_term + tau_term
    not_forced = []
    opposite = False
    for lit in rho_e:
        if not psi.solve(premise + [-lit]):
            core = get_core(psi, premise + [-lit])
            rho_a.update((abs(l), l > 0) for l in core if abs(l) in reg)
        elif not psi.solve(premise + [lit]):
            allowed = dqbf.deps[abs(lit)] | set(reg.vars)
            p = forcing_premise(psi, premise, -lit, allowed)
            f = reg.add_forcing(p, -lit)
            psi.add_clause(f.clause)
            st.stats["forcing"] = len(reg.forcing)
            opposite = True
        else:
            not_forced.append(lit)
    if opposite:
        # fix every other opposite-forced value of this counterexample too,
        # so the same (σ_∀, τ) cannot come back for another variable
        core_vars = {abs(l) for l in rho_e}
        for lit in e_term:
            if abs(lit) not in core_vars and not psi.solve(premise + [lit]):
                allowed = dqbf.deps[abs(lit)] | set(reg.vars)
                p = forcing_premise(psi, premise, -lit, allowed)
                psi.add_clause(reg.add_forcing(p, -lit).clause)
        st.stats["forcing"] = len(reg.forcing)
        return True
    clauses, created = reg.new_arbiters(not_forced, sigma_u)
    st.new_arbiter_clauses(clauses)
    for a in created:
        st.register_arbiter(a, True)
    rho_e_values = {abs(l): l > 0 for l in rho_e}
    rho_a.update(set_assignment([reg.lookup(abs(l), sigma_u) for l in not_forced], rho_e_values))
    try:
        core = get_core(psi, term(rho_a) + u_term)
    except ValueError:
        raise InvariantError("failed arbiter assignment is satisfiable") from None
    st.learn([-l for l in core if abs(l) in reg])
    return False


def find_new_arbiter_assignment(st: SolverState) -> bool:
    if not st.arbiter_solver.solve():
        return False
    st.tau = {a: st.arbiter_solver.model.get(a, True) for a in st.registry.vars}
    return True


def solve_cegis(dqbf: DQBF, config: Optional[Config] = None) -> Verdict:
    cfg = config or Config()
    st = SolverState(dqbf, cfg)
    if cfg.unates != "off":
        st.unates = detect_unates(dqbf, semantic=cfg.unates == "semantic")
        st.phi += [(l,) for l in st.unates]
    st.psi = Solver(st.phi, seed=cfg.seed)
    stamps: Dict[int, tuple] = {}
    while True:
        st.tick()
        find_definitions(st, stamps)
        sigma = check_arbiter_assignment(st)
        if sigma is None:
            return st.finish(True)
        st.note_counterexample(sigma)
        forcing, learned = len(st.registry.forcing), len(st.learned)
        if analyze_conflict(st, sigma):
            if len(st.registry.forcing) == forcing:
                raise InvariantError("forcing progress without a new forcing clause")
            continue
        if len(st.learned) == learned:
            raise InvariantError("no arbiter clause learned")
        if not find_new_arbiter_assignment(st):
            return st.finish(False)


def solve(dqbf: DQBF, config: Optional[Config] = None) -> Verdict:
    cfg = config or Config()
    if cfg.mode == "basic":
        return solve_basic(dqbf, cfg)
    return solve_cegis(dqbf, cfg)
