import pytest

from dqdef.circuit import Circuit
from dqdef.definability import verify_definition
from dqdef.engine import (
    Config,
    InvariantError,
    SolverState,
    analyze_conflict,
    check_arbiter_assignment,
    detect_unates,
    find_new_arbiter_assignment,
    solve,
    solve_basic,
    solve_cegis,
)
from dqdef.formula import DQBF
from dqdef.oracle import SMALL, brute_solve, random_instance
from dqdef.satcore import Solver

from conftest import dqbf

MODES = ["basic", "cegis"]


@pytest.mark.parametrize("mode", MODES)
def test_i1_pure_extraction(i1, mode):
    v = solve(i1, Config(mode=mode))
    assert v.value
    assert v.stats["arbiters"] == 0
    f = v.model.circuit(2)
    assert [f.evaluate({1: b}) for b in (False, True)] == [False, True]


def test_i1_cegis_first_iteration(i1):
    v = solve_cegis(i1, Config(unates="off"))
    assert v.value and v.stats["iterations"] == 1


def test_i3_basic_counts(i3):
    v = solve_basic(i3)
    assert v.value
    assert v.stats["arbiters"] == 1
    assert v.stats["arbiter_clauses"] == 1
    (a,) = v.state.registry.arbiters
    assert a.key == ()
    assert v.state.tau == {a.var: True}
    assert v.model.circuit(2).const_value() is True


def test_i3_cegis(i3):
    v = solve_cegis(i3)
    assert v.value
    assert v.model.circuit(2).const_value() is True


@pytest.mark.parametrize("mode", MODES)
def test_false_instances(i2, i5, mode):
    assert solve(i2, Config(mode=mode)).value is False
    assert solve(i5, Config(mode=mode)).value is False


def test_i2_generates_forcing(i2):
    v = solve_cegis(i2)
    assert not v.value
    assert v.stats["forcing"] >= 1


def _state(f, **kw):
    st = SolverState(f, Config(**kw))
    st.psi = Solver(st.phi)
    return st


def test_check_assignment_valid_for_i1(i1):
    st = _state(i1)
    r = st.define(2, {1}, st.phi)
    assert r.defined
    assert check_arbiter_assignment(st) is None


def test_i3_conflict_learns_unit(i3):
    st = _state(i3, unates="off")
    clauses, (a,) = st.registry.new_arbiters([2], {1: False})
    st.new_arbiter_clauses(clauses)
    st.tau = {a.var: False}
    sigma = check_arbiter_assignment(st)
    assert sigma[1] is False and sigma[2] is False
    assert analyze_conflict(st, sigma) is False
    assert st.learned == [(a.var,)]
    assert find_new_arbiter_assignment(st)
    assert st.tau == {a.var: True}
    assert check_arbiter_assignment(st) is None


def test_i2_first_conflict_forces_unit(i2):
    st = _state(i2, unates="off")
    assert analyze_conflict(st, {1: False, 2: True, 3: False}) is True
    assert st.registry.forcing[0].clause == (3,)
    assert st.learned == []


def test_not_forced_path():
    # φ = (u1 ∨ e2 ∨ e3): under u1=0 neither existential is forced alone
    f = dqbf([1], {2: [1], 3: [1]}, [(1, 2, 3)])
    st = _state(f, unates="off")
    assert analyze_conflict(st, {1: False, 2: False, 3: False}) is False
    keys = {(a.base, a.key) for a in st.registry.arbiters}
    assert keys == {(2, ((1, False),)), (3, ((1, False),))}
    (clause,) = st.learned
    assert all(abs(l) in st.registry for l in clause)


def test_empty_clause_counterexample():
    f = DQBF.build([1], {2: [1]}, [(2,), ()])
    st = _state(f)
    assert check_arbiter_assignment(st) is not None
    assert solve_cegis(f).value is False
    assert solve_basic(f).value is False


def test_arbiter_assignment_examples():
    f = dqbf([1], {2: []}, [(1, 2)])
    st = _state(f)
    a, _ = st.registry.register(2, {})
    assert find_new_arbiter_assignment(st)
    assert a.var in st.tau
    st.learn([a.var])
    assert find_new_arbiter_assignment(st) and st.tau[a.var] is True
    st.learn([-a.var])
    assert not find_new_arbiter_assignment(st)


def test_unates():
    f = dqbf([1], {2: [], 3: []}, [(1, 2), (2, 3)])
    assert detect_unates(f) == [2, 3]
    g = dqbf([1], {2: [1]}, [(-2, 1)])
    assert detect_unates(g) == [-2]
    h = dqbf([1], {2: []}, [(2, 1), (-2, 1)])
    assert detect_unates(h) == []
    # either value of e2 is harmless here, so the operational check accepts it
    assert detect_unates(h, semantic=True) == [2]


def test_semantic_unates_preserve_truth():
    for seed in range(80):
        f = random_instance(SMALL, seed)
        want = brute_solve(f).value
        assert solve_cegis(f, Config(unates="semantic")).value == want
        assert solve_cegis(f, Config(unates="off")).value == want


def test_default_true_policy():
    for seed in range(60):
        f = random_instance(SMALL, seed)
        want = brute_solve(f).value
        for mode in MODES:
            assert solve(f, Config(mode=mode, default=True)).value == want


def test_definitions_survive_clause_growth():
    hits = 0
    for seed in range(80):
        f = random_instance(SMALL, seed)
        v = solve_cegis(f, Config(debug=True))
        st = v.state
        final = st.psi_clauses()
        for e, edge in st.defs.items():
            assert verify_definition(e, Circuit(st.aig, edge), final)
            hits += 1
    assert hits > 50


def test_iteration_cap():
    f = random_instance(SMALL, 3)
    with pytest.raises(InvariantError):
        solve_basic(f, Config(mode="basic", max_iterations=0))


def test_config_validation():
    with pytest.raises(ValueError):
        Config(mode="fast")
    with pytest.raises(ValueError):
        Config(unates="always")


def test_seed_determinism():
    for seed in range(20):
        f = random_instance(SMALL, seed)
        a = solve_cegis(f, Config(seed=7))
        b = solve_cegis(f, Config(seed=7))
        assert a.value == b.value and a.stats == b.stats
