import os
import sys
from fractions import Fraction

import pytest
from click.testing import CliRunner

# Add project root to Python path
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

from cutpoint.config.settings import get_settings, override_settings
from cutpoint.kernel.digits import IrrationalParam
from cutpoint.models.automata import CutpointAcceptor
from cutpoint.services.constructions import fixed_rotation, rabin_pfa, rotation_qfa


@pytest.fixture(autouse=True)
def fresh_settings():
    """Drop command line overrides left behind by other tests"""
    override_settings()
    yield
    override_settings()


@pytest.fixture
def settings():
    """Get test settings"""
    return get_settings()


@pytest.fixture
def rabin():
    """Rabin's two-state binary PFA"""
    return rabin_pfa()


@pytest.fixture
def rabin_half(rabin) -> CutpointAcceptor:
    return CutpointAcceptor.of(rabin, Fraction(1, 2))


@pytest.fixture
def fixed_qfa():
    """Rotation QFA with the exact 3-4-5 matrix"""
    return rotation_qfa(fixed_rotation())


@pytest.fixture
def sqrt2_over_8() -> IrrationalParam:
    return IrrationalParam.quadratic(0, Fraction(1, 8), 2)


@pytest.fixture
def sqrt3_over_8() -> IrrationalParam:
    return IrrationalParam.quadratic(0, Fraction(1, 8), 3)


@pytest.fixture
def runner() -> CliRunner:
    """Click test runner"""
    return CliRunner()
