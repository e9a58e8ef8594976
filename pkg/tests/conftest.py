import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from subcubic_packing.families import random_connected_graph  # noqa: E402
from subcubic_packing.graph import build_graph  # noqa: E402


def random_graph(n, p, rng):
    """Random graph, connected or not, with edge probability p."""
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return build_graph(n, edges)


@pytest.fixture
def rng():
    return random.Random(20181015)


@pytest.fixture
def path4():
    return build_graph(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def triangle():
    return build_graph(3, [(0, 1), (1, 2), (0, 2)])


def connected_sample(count, n_lo, n_hi, seed):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(n_lo, n_hi)
        p = rng.choice([0.0, 0.1, 0.2, 0.35, 0.5])
        out.append(random_connected_graph(n, p, rng.randrange(10**9)))
    return out
