"""Shared fixtures for the omega_width test suite."""

import pytest

from omega_width.atlas import get_atlas
from omega_width.fixtures import (
    complete_graph,
    cycle_graph,
    equality_triangle,
    horn_structure,
    neq_structure,
    z2_linear_structure,
)


@pytest.fixture
def equality():
    """The pure-set atlas."""
    return get_atlas("equality")


@pytest.fixture
def equivalence():
    """Equivalence relation with infinitely many infinite classes."""
    return get_atlas("equivalence")


@pytest.fixture
def henson3():
    """Triangle-free Henson graph."""
    return get_atlas("henson:3")


@pytest.fixture
def random_graph():
    return get_atlas("random-graph")


@pytest.fixture
def fourary():
    """Random graph with R_eq and R_neq."""
    return get_atlas("fourary")


@pytest.fixture
def triangle_instance():
    """x = y, y = z, x ≠ z over the pure set."""
    return equality_triangle()


@pytest.fixture
def k3():
    return complete_graph(3)


@pytest.fixture
def c5():
    return cycle_graph(5)


@pytest.fixture
def neq():
    return neq_structure()


@pytest.fixture
def z2_linear():
    return z2_linear_structure()


@pytest.fixture
def horn():
    return horn_structure()
