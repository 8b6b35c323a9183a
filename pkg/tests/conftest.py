import pytest

from tactorbelt.amplitude import FalloffParams
from tactorbelt.geometry import build_layout, build_target_set


@pytest.fixture(scope="session")
def layout():
    return build_layout()


@pytest.fixture(scope="session")
def target_set(layout):
    return build_target_set(layout)


@pytest.fixture(scope="session")
def params(layout):
    return FalloffParams.for_layout(layout)
