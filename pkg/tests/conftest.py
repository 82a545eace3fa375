import itertools
from pathlib import Path

import pytest

from dqdef.formula import DQBF, parse_dqdimacs

CORPUS = Path(__file__).parent / "corpus"


def corpus_files():
    return sorted(CORPUS.glob("*.dqdimacs"))


def load(name):
    return parse_dqdimacs((CORPUS / name).read_text())


def brute_sat(clauses, assumptions=()):
    """Satisfiability by enumerating every assignment of the mentioned variables."""
    vs = sorted({abs(l) for c in clauses for l in c} | {abs(l) for l in assumptions})
    for bits in itertools.product((False, True), repeat=len(vs)):
        a = dict(zip(vs, bits))
        if all(a[abs(l)] == (l > 0) for l in assumptions) and all(
            any(a[abs(l)] == (l > 0) for l in c) for c in clauses
        ):
            return True
    return False


def brute_models(clauses, variables):
    vs = sorted(set(variables) | {abs(l) for c in clauses for l in c})
    for bits in itertools.product((False, True), repeat=len(vs)):
        a = dict(zip(vs, bits))
        if all(any(a[abs(l)] == (l > 0) for l in c) for c in clauses):
            yield a


def brute_defined(x, support, clauses):
    """Pairs-of-models definability: no two models agree on the support but differ on x."""
    seen = {}
    for m in brute_models(clauses, [x, *support]):
        key = tuple(m[v] for v in sorted(support))
        if seen.setdefault(key, m[x]) != m[x]:
            return False
    return True


def random_cnf(rng, n_vars, n_clauses, max_len=3):
    out = []
    for _ in range(n_clauses):
        k = rng.randint(1, min(max_len, n_vars))
        vs = rng.sample(range(1, n_vars + 1), k)
        out.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return out


@pytest.fixture
def i1():
    return load("i1.dqdimacs")


@pytest.fixture
def i2():
    return load("i2.dqdimacs")


@pytest.fixture
def i3():
    return load("i3.dqdimacs")


@pytest.fixture
def i5():
    return load("i5.dqdimacs")


def dqbf(universals, deps, matrix):
    return DQBF.build(universals, deps, matrix)
