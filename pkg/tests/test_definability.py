import itertools
import random

import pytest

from dqdef.definability import (
    DefinitionError,
    definability_order,
    get_definition,
    is_defined,
    padoa_partition,
    query,
    verify_definition,
)
from dqdef.formula import cnf_vars

from conftest import brute_defined, brute_models, dqbf, random_cnf


def truth(circuit, vs):
    return [circuit.evaluate(dict(zip(vs, bits))) for bits in itertools.product((False, True), repeat=len(vs))]


def test_equivalence_is_defined():
    phi = [(-1, 2), (1, -2)]
    assert is_defined(2, {1}, phi) == (True, None)
    assert truth(get_definition(2, {1}, phi), [1]) == [False, True]


def test_free_choice_is_undefined():
    defined, witness = is_defined(2, set(), [(1, 2)])
    assert not defined
    assert witness == {}


def test_self_definition():
    assert is_defined(1, {1}, [(1, 2)])[0]
    c = get_definition(1, {1}, [(1, 2)])
    assert truth(c, [1]) == [False, True]


def test_negation_definition():
    # e=2, u=1: (¬e∨¬u)∧(e∨u) forces e = ¬u
    c = get_definition(2, {1}, [(-2, -1), (2, 1)])
    assert c.support() <= {1}
    assert truth(c, [1]) == [True, False]


def test_forced_u_leaves_e_free():
    assert not is_defined(2, {1}, [(-2, 1), (2, 1)])[0]


def test_get_definition_rejects_undefined():
    with pytest.raises(DefinitionError):
        get_definition(2, set(), [(1, 2)])


def test_unsat_formula_defines_everything_as_false():
    r = query(3, {1}, [(1,), (-1,)])
    assert r.defined
    assert r.definition.const_value() is False


def test_padoa_partition_shares_only_support():
    phi = [(1, 2), (1,), (2, 3)]
    a, b, rename = padoa_partition(2, {1}, phi)
    assert (2,) in a
    assert set(rename) == {2, 3}
    assert cnf_vars(a) & cnf_vars(b) == {1}
    # clause over the support only is not copied
    assert (1,) not in b
    assert (-rename[2],) in b


def test_witness_extends_both_ways():
    rng = random.Random(8)
    for _ in range(60):
        n = rng.randint(2, 6)
        phi = random_cnf(rng, n, rng.randint(1, 2 * n))
        x = rng.randint(1, n)
        support = set(rng.sample([v for v in range(1, n + 1) if v != x], rng.randint(0, n - 1)))
        defined, witness = is_defined(x, support, phi)
        if defined:
            continue
        values = {m[x] for m in brute_models(phi, [x, *support]) if all(m[v] == witness[v] for v in support)}
        assert values == {False, True}


def test_oracle_agreement_and_extraction():
    rng = random.Random(31)
    checked = 0
    while checked < 200:
        n = rng.randint(2, 10)
        phi = random_cnf(rng, n, rng.randint(1, 3 * n))
        x = rng.randint(1, n)
        support = set(rng.sample([v for v in range(1, n + 1) if v != x], rng.randint(0, n - 1)))
        r = query(x, support, phi)
        assert r.defined == brute_defined(x, support, phi)
        if r.defined:
            assert r.definition.support() <= support
            assert verify_definition(x, r.definition, phi)
            for m in brute_models(phi, [x, *support]):
                assert r.definition.evaluate(m) == m[x]
        checked += 1


def test_monotone_under_clause_addition():
    rng = random.Random(12)
    hits = 0
    for _ in range(300):
        n = rng.randint(2, 7)
        phi = random_cnf(rng, n, rng.randint(1, 3 * n))
        x = rng.randint(1, n)
        support = set(range(1, n + 1)) - {x}
        r = query(x, support, phi)
        if not r.defined:
            continue
        grown = phi + random_cnf(rng, n, 3)
        assert verify_definition(x, r.definition, grown)
        assert is_defined(x, support, grown)[0]
        hits += 1
    assert hits > 20


def test_order_extends_with_smaller_dependencies():
    f = dqbf([1, 2], {3: [1], 4: [1, 2]}, [(3, 4)])
    o = definability_order(f)
    assert o.order == (3, 4)
    assert o.ext[4] == {1, 2, 3}
    assert o.ext[3] == {1}


def test_order_puts_arbiters_first():
    f = dqbf([1], {2: []}, [(1, 2)])
    o = definability_order(f, arbiters=[9])
    assert o.order == (9, 2)
    assert o.ext[2] == {9}


def test_order_single_existential():
    f = dqbf([1, 2], {3: [2]}, [(3,)])
    assert definability_order(f).ext[3] == {2}


def test_order_incomparable_sets_do_not_extend():
    f = dqbf([1, 2], {3: [1], 4: [2]}, [(3, 4)])
    o = definability_order(f)
    assert o.ext[4] == {2}
    for e, s in o.ext.items():
        assert e not in s
