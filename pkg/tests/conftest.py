from dataclasses import dataclass, field

import numpy as np
import pytest

from qrefl.potentials import C3C4, PotentialModel, PureC4, ScatteringProblem, SILICA_LIKE_C3
from qrefl.units import Particle

ACCEPTANCE_LINES = []


@dataclass(frozen=True)
class FreePotential(PotentialModel):
    """V = 0 everywhere; only for tests (models proper require C4 > 0)."""

    c3: float = 0.0
    c4: float = 0.0
    label: str = "free"

    def _v(self, z):
        return 0.0 * z

    _v1 = _v
    _v2 = _v


@pytest.fixture
def free_problem():
    return ScatteringProblem(FreePotential(), Particle(1.0), 0.5)


@pytest.fixture(scope="session")
def c4_model():
    return PureC4.from_ell(321.3)


@pytest.fixture(scope="session")
def silica_model():
    return C3C4.from_ell(321.3, c3=SILICA_LIKE_C3)


def c4_problem(kappa_ell, ell=321.3):
    return ScatteringProblem.from_kappa_ell(PureC4.from_ell(ell), kappa_ell)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
