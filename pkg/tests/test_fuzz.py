from dqdef.certify import Model
from dqdef.engine import Config, solve_cegis
from dqdef.formula import parse_dqdimacs
from dqdef.fuzz import DEFAULT_SOLVERS, check_instance, fuzz, minimize, reproducer_text
from dqdef.oracle import SMALL, brute_solve


def flipped(dqbf, seed):
    """CEGIS with the polarity of every Skolem function inverted."""
    v = solve_cegis(dqbf, Config(seed=seed))
    if v.value:
        g = v.model.aig
        v.model = Model(g, {e: g.NOT(f) for e, f in v.model.functions.items()})
    return v


def liar(dqbf, seed):
    v = solve_cegis(dqbf, Config(seed=seed))
    v.value = not v.value
    return v


def test_clean_run():
    r = fuzz(SMALL, 1, 40)
    assert r.ok and r.count == 40
    assert r.true + r.false == 40
    assert r.models_checked >= r.true


def test_zero_count():
    r = fuzz(SMALL, 1, 0)
    assert r.ok and r.count == 0


def test_injected_bug_is_caught_and_minimized():
    r = fuzz(SMALL, 1, 50, solvers={"flipped": flipped})
    assert not r.ok
    d = r.divergences[0]
    assert "flipped" in d.reason
    assert len(d.minimized.matrix) <= len(d.instance.matrix)
    text = reproducer_text(d)
    again = parse_dqdimacs(text)
    assert check_instance(again, {"flipped": flipped})[0] is not None


def test_wrong_verdict_is_caught():
    r = fuzz(SMALL, 1, 5, solvers={"liar": liar})
    assert not r.ok and "oracle says" in r.divergences[0].reason
    # a one-clause reproducer is as small as a verdict flip gets
    assert len(r.divergences[0].minimized.matrix) <= 1


def test_minimize_keeps_failure():
    from dqdef.oracle import random_instance
    f = random_instance(SMALL, 7)
    small = minimize(f, lambda g: brute_solve(g).value is False)
    if brute_solve(f).value is False:
        assert brute_solve(small).value is False
        assert len(small.matrix) <= len(f.matrix)


def test_default_solvers_registered():
    assert set(DEFAULT_SOLVERS) == {"basic", "cegis"}
