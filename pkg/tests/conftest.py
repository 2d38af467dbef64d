import pytest

from gapipes.datafiles import (
    GURUDENIYA,
    GURUDENIYA_AS_SIMULATED,
    TOY3,
    load_bundled,
)


@pytest.fixture(scope="session")
def gurudeniya():
    """(network, catalog, settings) for the benchmark dataset as published."""
    return load_bundled(GURUDENIYA)


@pytest.fixture(scope="session")
def gurudeniya_as_simulated():
    """Variant whose demands reproduce the published hydraulic tables."""
    return load_bundled(GURUDENIYA_AS_SIMULATED)


@pytest.fixture(scope="session")
def toy3():
    return load_bundled(TOY3)
