import numpy as np
import pytest

from nlcompete import ConfigError, build_grid


def test_nodes_are_cell_centers():
    g = build_grid(0.0, 1.0, 4)
    assert g.weight == 0.25
    np.testing.assert_allclose(g.nodes, [0.125, 0.375, 0.625, 0.875], rtol=0, atol=0)


def test_nodes_shifted_interval():
    g = build_grid(-2.0, 3.0, 10)
    h = 0.5
    expected = -2.0 + (np.arange(10) + 0.5) * h
    np.testing.assert_allclose(g.nodes, expected, rtol=0, atol=1e-15)
    assert g.span == 5.0


def test_integrate_is_midpoint_rule():
    g = build_grid(0.0, 1.0, 500)
    # midpoint rule is exact on affine integrands
    vals = 3.0 * g.nodes + 2.0
    assert abs(g.integrate(vals) - 3.5) < 1e-13
    # and second-order accurate on smooth ones
    err = abs(g.integrate(np.sin(np.pi * g.nodes)) - 2.0 / np.pi)
    assert err < 1e-5


def test_integrate_converges_second_order():
    errs = []
    for n in (50, 100):
        g = build_grid(0.0, 1.0, n)
        errs.append(abs(g.integrate(np.exp(g.nodes)) - (np.e - 1.0)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_nodes_read_only():
    g = build_grid(0.0, 1.0, 8)
    with pytest.raises(ValueError):
        g.nodes[0] = 7.0


@pytest.mark.parametrize(
    "lo,hi,n",
    [
        (0.0, 1.0, 2),
        (0.0, 1.0, 0),
        (1.0, 0.0, 10),
        (0.0, 0.0, 10),
        (float("nan"), 1.0, 10),
        (0.0, float("inf"), 10),
    ],
)
def test_rejects_bad_intervals(lo, hi, n):
    with pytest.raises(ConfigError):
        build_grid(lo, hi, n)
