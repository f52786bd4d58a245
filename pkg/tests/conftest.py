import numpy as np
import pytest

from seifertpmhs.hodge import make_split_pmhs, random_spec


def lattice_spec(rng, m, max_dim=8):
    """A random split spec whose Hodge numbers all satisfy p, q <= m."""
    while True:
        s = random_spec(rng, m, max_dim)
        if all(max(e[0], e[1]) <= m for e in s):
            return s


def random_fixtures(seed, count, max_dim=12, ms=(0, 1, 2)):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        m = int(rng.choice(ms))
        signed = bool(rng.integers(0, 2))
        spec = random_spec(rng, m, max_dim)
        out.append((spec, m, signed, make_split_pmhs(spec, m, signed, rng=rng, base_change=True)))
    return out


@pytest.fixture(scope="session")
def fixtures_small():
    return random_fixtures(101, 12, max_dim=8)


def random_real_matrix(rng, n, cond_max=50.0):
    while True:
        C = rng.uniform(-2, 2, size=(n, n))
        if np.linalg.cond(C) < cond_max:
            return C
