import os
import random
from fractions import Fraction

import pytest

from diopkit.cli.grammar import parse
from diopkit.cli.main import builtin_text
from diopkit.diopcore.free import GeneratorSet, free_slice
from diopkit.diopcore.presentation import QUADRATIC_SLOTS, NamedRelation, make_presentation
from diopkit.sbimod import sign, trivial

# acceptance lines, echoed after the run so they show without -s
ACCEPTANCE = []


def pytest_addoption(parser):
    parser.addoption("--diop-seed", type=int, default=None,
                     help="seed for randomized suites (default: $DIOPKIT_SEED or 0)")


@pytest.fixture(scope="session")
def seed(request):
    s = request.config.getoption("--diop-seed")
    if s is None:
        s = int(os.environ.get("DIOPKIT_SEED", "0"))
    return s


@pytest.fixture
def rng(seed):
    return random.Random(seed)


def random_presentation(rng: random.Random, k: int) :
    E = GeneratorSet({(1, 2): rng.choice([sign, trivial])(1, 2), (2, 1): rng.choice([sign, trivial])(2, 1)})
    named = []
    for slot in QUADRATIC_SLOTS:
        sl = free_slice(E, *slot)
        for j in range(rng.randint(0, 2)):
            row = {c: Fraction(rng.randint(-2, 2)) for c in range(sl.dim) if rng.random() < 0.6}
            row = {c: x for c, x in row.items() if x}
            if row:
                named.append(NamedRelation(f"r{slot[0]}{slot[1]}_{j}", slot, sl.from_sparse(row)))
    return make_presentation(f"rand{k}", E, named)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)


def load(name):
    return parse(builtin_text(name))


@pytest.fixture(scope="session")
def bilie():
    return load("bilie")


@pytest.fixture(scope="session")
def bilie_dual():
    return load("bilie_dual")


@pytest.fixture(scope="session")
def lie():
    return load("lie")


@pytest.fixture(scope="session")
def com():
    return load("com")
