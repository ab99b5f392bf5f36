import pytest

from beltgrip.contact import ContactParams
from beltgrip.core import GripperConfig, ObjectSpec
from beltgrip.harness import bundled_scenario


@pytest.fixture
def sphere():
    return ObjectSpec("sphere", mass=0.04215, length=0.055)


@pytest.fixture
def cube():
    return ObjectSpec("cube", mass=0.00866, length=0.025)


@pytest.fixture
def gripper():
    return GripperConfig(gap=0.050)


@pytest.fixture
def params():
    return ContactParams(mu_bo=0.5)


@pytest.fixture(scope="session")
def sphere_scenario():
    return bundled_scenario("sphere_reorient")


@pytest.fixture(scope="session")
def sphere_run(sphere_scenario):
    return sphere_scenario.simulate()
