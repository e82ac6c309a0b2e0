import numpy as np
import pytest

from pkslab.measure import Context, InitialState, Ordering


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


@pytest.fixture(scope="session")
def default_ctx():
    return Context()


def random_pure_state(rng) -> InitialState:
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    return InitialState.pure(v / np.linalg.norm(v))


def random_mixed_state(rng, terms: int = 2) -> InitialState:
    weights = rng.random(terms)
    weights /= weights.sum()
    out = []
    for w in weights:
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        out.append((float(w), v / np.linalg.norm(v)))
    return InitialState(out)


def random_ordering(rng) -> Ordering:
    return Ordering(tuple(int(x) for x in rng.permutation(33)))
