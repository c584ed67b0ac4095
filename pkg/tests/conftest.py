import pytest
from imp_isa.executor import MacroExecutor
from imp_macro.geometry import GEOMETRY
from imp_macro.state import MacroState


@pytest.fixture
def geometry():
    return GEOMETRY


@pytest.fixture
def state():
    return MacroState()


@pytest.fixture
def strict_state():
    return MacroState(strict=True)


@pytest.fixture
def executor():
    return MacroExecutor(MacroState(strict=True))
