import numpy as np
import pytest

from akhabit import HistoryGrid, InitialState, ModelParams

BASELINE = dict(eps=0.5, eta=1.0, tau=1.0, A=0.3, delta=0.05, rho=0.04, gamma=2.0)


@pytest.fixture(scope="session")
def params():
    """Baseline parameter set: r = 0.25, alpha = 0.145, Gamma = 0.105."""
    return ModelParams(**BASELINE)


@pytest.fixture(scope="session")
def history(params):
    return HistoryGrid.constant(1.0, tau=params.tau, n=200)


@pytest.fixture(scope="session")
def init(history):
    return InitialState(k0=10.0, history=history)


@pytest.fixture(scope="session")
def zero_root_params():
    """eps * integral of e^{eta u} = 1, so the kernel's real root is 0."""
    return ModelParams(eps=2.0, eta=1.0, tau=np.log(2.0), A=0.3, delta=0.05, rho=0.5, gamma=2.0)


@pytest.fixture(scope="session")
def unstable_params():
    """Spectral-only fixture with lambda0 > r (violates eps <= eta on purpose)."""
    return ModelParams(eps=0.9, eta=0.1, tau=10.0, A=0.3, delta=0.28, rho=0.5, gamma=2.0)


def random_valid_params(rng):
    """One parameter set satisfying the standing regime, drawn uniformly."""
    eta = rng.uniform(0.2, 2.0)
    eps = eta * rng.uniform(0.1, 1.0)
    tau = rng.uniform(0.3, 3.0)
    r = rng.uniform(0.05, 0.5)
    gamma = rng.uniform(0.3, 4.0)
    if abs(gamma - 1.0) < 0.05:
        gamma = 1.2
    rho = max(0.0, r * (1.0 - gamma)) + rng.uniform(0.02, 0.3)
    return ModelParams(eps=eps, eta=eta, tau=tau, A=r + 0.05, delta=0.05, rho=rho, gamma=gamma)
