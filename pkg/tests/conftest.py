import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from checker import explore  # noqa: E402
from lgs_models import assemble_system  # noqa: E402


@pytest.fixture(scope='session')
def nominal_network():
    """Assembled system, P28 monitor on the extension closing phase"""
    return assemble_system()


@pytest.fixture(scope='session')
def nominal_graph(nominal_network):
    return explore(nominal_network)


@pytest.fixture(scope='session')
def quiet_network():
    """Assembled system without the P28 monitor and with frozen speed/height"""
    return assemble_system(p28_scope='off', environment=False)


@pytest.fixture(scope='session')
def quiet_graph(quiet_network):
    return explore(quiet_network)


@pytest.fixture
def tiny_model():
    return """
clock ck
automaton a
  loc L0 inv ck<=3
  loc L1
  init L0
  edge L0 -> L1 guard ck==3
"""
