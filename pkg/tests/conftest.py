"""Shared fixtures; puts scripts/ on sys.path so tests import modules as the scripts do."""

import sys
from pathlib import Path

import pytest

SCRIPTS_DIR = Path(__file__).resolve().parent.parent / "scripts"
ASSETS_DIR = Path(__file__).resolve().parent.parent / "assets"
sys.path.insert(0, str(SCRIPTS_DIR))

from gm_lab import make_gm  # noqa: E402
from presentation import abelian as make_abelian  # noqa: E402
from presentation import heisenberg as make_heisenberg  # noqa: E402
from presentation import validate_presentation  # noqa: E402


@pytest.fixture(scope="session")
def assets_dir():
    return ASSETS_DIR


@pytest.fixture(scope="session")
def heisenberg():
    return make_heisenberg()


@pytest.fixture(scope="session")
def g1():
    return make_gm(1)


@pytest.fixture(scope="session")
def g2():
    return make_gm(2)


@pytest.fixture(scope="session")
def g3():
    return make_gm(3)


@pytest.fixture(scope="session")
def abelian():
    """Z^3 x Z x C_4."""
    return make_abelian(3, 1, (4,))


@pytest.fixture(scope="session")
def torsion_group():
    """k = 3, Z x C_5 centre: [a1,a2] = c1, [a1,a3] = c2^2, [a2,a3] = c2^3."""
    return validate_presentation({
        "k": 3,
        "m": 1,
        "l": 1,
        "orders": [5],
        "gamma": [[1, 2, 1, 1], [1, 3, 2, 2], [2, 3, 2, 3]],
    })
