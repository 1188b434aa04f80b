import numpy as np
import pytest


def rel_l2(got, want) -> float:
    return float(np.linalg.norm(np.asarray(got) - np.asarray(want)) / np.linalg.norm(want))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
