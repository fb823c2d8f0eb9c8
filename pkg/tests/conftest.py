import pytest

from fockspace.affinec import FoldedAlgebra
from fockspace.config import AuditConfig
from fockspace.diagram import Diagram


@pytest.fixture
def phi0():
    return Diagram.vacuum(0)


@pytest.fixture
def y1():
    return Diagram(0, (-1,))


@pytest.fixture
def y2():
    return Diagram(0, (-2,))


@pytest.fixture
def y11():
    return Diagram(0, (-1, -1))


@pytest.fixture
def paper_l2():
    return FoldedAlgebra.from_preset(2, "paper")


@pytest.fixture
def small_cfg():
    return AuditConfig(charges=(0,), max_boxes=3)
