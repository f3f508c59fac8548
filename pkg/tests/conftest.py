import pytest

from fractal_transport.hamiltonian import assemble_ctrw_generator, assemble_quantum
from fractal_transport.lattice import build_gasket
from fractal_transport.spectral import eigendecompose


@pytest.fixture(scope="session")
def g3():
    return build_gasket(3)


@pytest.fixture(scope="session")
def g4():
    return build_gasket(4)


@pytest.fixture(scope="session")
def g3_quantum(g3):
    op = assemble_quantum(g3)
    return op, eigendecompose(op)


@pytest.fixture(scope="session")
def g4_quantum(g4):
    op = assemble_quantum(g4)
    return op, eigendecompose(op)


@pytest.fixture(scope="session")
def g3_ctrw(g3):
    op = assemble_ctrw_generator(g3)
    return op, eigendecompose(op)


@pytest.fixture(scope="session")
def g4_ctrw(g4):
    op = assemble_ctrw_generator(g4)
    return op, eigendecompose(op)


@pytest.fixture(scope="session")
def chain2():
    """Two sites one lattice constant apart, joined by a single bond."""
    import numpy as np

    from fractal_transport.lattice import LatticeGraph, LatticeKind

    return LatticeGraph(LatticeKind.SQUARE, 0, 1.0, np.array([[0.0, 0.0], [1.0, 0.0]]),
                        np.array([[0, 1]]), np.array([0], dtype=np.int8))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
