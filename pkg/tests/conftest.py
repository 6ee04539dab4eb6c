import pytest

from cvarhedge.mc_oracle import SimConfig, simulate_normals, terminal_from_normals
from cvarhedge.pricing import MarketParams

EXAMPLE_STRIKES = (80.0, 90.0, 100.0, 110.0, 120.0)
EXAMPLE_V0 = 1000.0
EXAMPLE_GRID = (0.0, 20.0, 40.0, 60.0, 80.0, 100.0, 120.0, 140.0, 160.0)
MC_SEED = 20240101


@pytest.fixture(scope="session")
def market():
    return MarketParams(S0=100.0, mu=0.10, sigma=0.2, r=0.03, T=1.0, alpha=0.05)


@pytest.fixture(scope="session")
def strikes():
    return EXAMPLE_STRIKES


@pytest.fixture(scope="session")
def mc_config():
    return SimConfig(n_paths=1_000_000, seed=MC_SEED)


@pytest.fixture(scope="session")
def mc_normals(mc_config):
    return simulate_normals(mc_config)


@pytest.fixture(scope="session")
def mc_prices(market, mc_normals):
    return terminal_from_normals(market, mc_normals)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
