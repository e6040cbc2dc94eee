import pytest
from mpmath import mp

from critamp import new_map
from critamp.oscillation import OscillationEngine, engine_for


@pytest.fixture(autouse=True)
def working_precision():
    with mp.workdps(60):
        yield


@pytest.fixture(scope="session")
def map_fifth():
    """λ = 1/5 with p₁ = 0."""
    return new_map(["0.1", "0", "0.9"])


@pytest.fixture(scope="session")
def map_half():
    """λ = 1/2 with p₁ = 0."""
    return new_map(["0.25", "0", "0.75"])


@pytest.fixture(scope="session")
def engine_fifth(map_fifth):
    return engine_for(map_fifth)


@pytest.fixture(scope="session")
def engine_half(map_half):
    return engine_for(map_half)


@pytest.fixture(scope="session")
def engine_fifth_low_order(map_fifth):
    """Low truncation orders: 𝚐 to degree 5, φ through x⁵, depths fixed at 7."""
    return OscillationEngine(map_fifth, g_order=5, phi_order=3, n_phi=7, n_ginv=7,
                             target_err=1, dps=40)
