import random

import pytest
from hypothesis import strategies as st

from autcovers.grouprings import AbelianQuotientSpec
from autcovers.words import Endomorphism, Word, commutator, compose, gen, inner, partial_conjugation

# groups of order <= 12 as invariant-factor lists
SMALL_GROUPS = [(2,), (3,), (4,), (2, 2), (5,), (6,), (7,), (8,), (2, 4), (2, 2, 2), (9,), (3, 3), (10,), (11,), (12,), (2, 6)]

ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture
def record_criterion():
    def record(number, ok, detail=""):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return record


def random_word(rng, rank, max_len):
    letters = [rng.choice((1, -1)) * rng.randint(1, rank) for _ in range(rng.randint(0, max_len))]
    return Word(tuple(letters))


def random_torelli(rng, rank, steps=6):
    """Product of at most ``steps`` automorphisms acting trivially on H_1."""
    psi = Endomorphism.identity(rank)
    for _ in range(rng.randint(1, steps)):
        kind = rng.random()
        t = rng.randint(1, rank)
        others = [i for i in range(1, rank + 1) if i != t]
        if kind < 0.45:
            g = Word(tuple(rng.choice((1, -1)) * rng.choice(others) for _ in range(rng.randint(1, 3))))
            step = partial_conjugation(rank, t, g)
        elif kind < 0.75 or len(others) < 2:
            step = inner(rank, random_word(rng, rank, 3))
        else:
            a, b = rng.sample(others, 2)
            images = [gen(i) for i in range(1, rank + 1)]
            images[t - 1] = gen(t) * commutator(gen(a), gen(b))
            step = Endomorphism(rank, tuple(images))
        psi = compose(psi, step)
    return psi


def random_cover(rng, rank, groups=SMALL_GROUPS):
    while True:
        mods = rng.choice([g for g in groups if len(g) <= rank])
        images = tuple(tuple(rng.randrange(m) for m in mods) for _ in range(rank))
        phi = AbelianQuotientSpec(rank, mods, images)
        if phi.is_surjective():
            return phi


@st.composite
def words(draw, rank=3, max_len=12):
    letters = draw(st.lists(st.integers(1, rank).flatmap(lambda i: st.sampled_from((i, -i))), max_size=max_len))
    return Word(tuple(letters))


@st.composite
def torelli_autos(draw, rank=None):
    seed = draw(st.integers(0, 2**32 - 1))
    n = rank or draw(st.integers(2, 3))
    return random_torelli(random.Random(seed), n)


@st.composite
def covers(draw, rank):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_cover(random.Random(seed), rank)
