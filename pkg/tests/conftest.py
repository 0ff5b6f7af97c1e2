import pytest

from app.grid.base import GridModel
from app.grid.synthetic import TestbedKind, toy_radial, write_testbed


@pytest.fixture
def toy_grid() -> GridModel:
    return toy_radial()


@pytest.fixture
def toy_testbed(tmp_path):
    """Config path of a toy_radial input set written under tmp_path."""
    return write_testbed(tmp_path / "toy", TestbedKind.TOY_RADIAL, n=3)
