import pytest

from secgame import EpidemicModel, Poisson

# Figure 2 / Figure 3 parameter sets: lambda=10, q+=0.5, p=0.01, with q=0
# (strong protection) or q=0.1 (weak protection).


@pytest.fixture(scope="session")
def strong_model():
    return EpidemicModel(p=0.01, q=0.0, q_plus=0.5, degree=Poisson(lam=10.0))


@pytest.fixture(scope="session")
def weak_model():
    return EpidemicModel(p=0.01, q=0.1, q_plus=0.5, degree=Poisson(lam=10.0))
