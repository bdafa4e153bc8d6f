import numpy as np
import pytest

from nlcompete import (
    BoundaryRegime,
    KernelSpec,
    ModelParams,
    assemble_dispersal,
    build_grid,
)


@pytest.fixture(scope="session")
def grid200():
    return build_grid(0.0, 1.0, 200)


@pytest.fixture(scope="session")
def op200(grid200):
    return assemble_dispersal(
        KernelSpec("tophat", 0.3), grid200, BoundaryRegime.no_flux(), 1.0
    )


@pytest.fixture(scope="session")
def grid40():
    return build_grid(0.0, 1.0, 40)


@pytest.fixture(scope="session")
def op40(grid40):
    return assemble_dispersal(
        KernelSpec("tophat", 0.3), grid40, BoundaryRegime.no_flux(), 1.0
    )


@pytest.fixture(scope="session")
def const_params():
    def build(op, b, c, m=1.0, M=1.0, b1=1.0, c1=1.0):
        n = op.grid.n
        return ModelParams(
            op_u=op,
            op_v=op,
            m=np.full(n, float(m)),
            M=np.full(n, float(M)),
            b=np.full(n, float(b)),
            c=np.full(n, float(c)),
            b1=np.full(n, float(b1)),
            c1=np.full(n, float(c1)),
        )

    return build
