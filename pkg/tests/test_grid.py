import numpy as np
import pytest

from tensortom.grid import BAND, INTERIOR, OUTSIDE, GridSpec, extend_outward, partial_x1, partial_x2


def test_gridspec_validation():
    for bad in (31, 64, 100):
        with pytest.raises(ValueError):
            GridSpec(bad)
    g = GridSpec(33)
    assert g.h == pytest.approx(2.0 / 32)
    assert g.coords[16] == 0.0


def test_mask_consistent_with_radius():
    g = GridSpec(65)
    assert np.array_equal(g.mask != OUTSIDE, g.inside)
    assert np.all(g.radius[g.inside] < 1.0)
    assert (g.mask == BAND).any() and (g.mask == INTERIOR).any()
    cert = g.certified()
    assert np.all(g.radius[cert] <= 1.0 - 2 * g.h)


@pytest.mark.parametrize("order", [2, 4])
def test_derivatives_exact_on_polynomials(order):
    g = GridSpec(65)
    x1, x2 = g.mesh
    deg = 2 if order == 2 else 4
    f = x1 ** deg + 3 * x1 * x2 ** (deg - 1) - x2
    d1 = partial_x1(f, g, order=order)
    d2 = partial_x2(f, g, order=order)
    ex1 = deg * x1 ** (deg - 1) + 3 * x2 ** (deg - 1)
    ex2 = 3 * (deg - 1) * x1 * x2 ** (deg - 2) - 1
    ins = g.inside
    assert np.abs(d1 - ex1)[ins].max() < 1e-9
    assert np.abs(d2 - ex2)[ins].max() < 1e-9
    assert np.all(d1[~ins] == 0)


def test_order4_converges_faster():
    errs = {}
    for n in (65, 129):
        g = GridSpec(n)
        x1, x2 = g.mesh
        f = np.sin(3 * x1) * np.cos(2 * x2)
        ex = 3 * np.cos(3 * x1) * np.cos(2 * x2)
        for order in (2, 4):
            errs[n, order] = np.abs(partial_x1(f, g, order=order) - ex)[g.inside].max()
    assert np.log2(errs[65, 2] / errs[129, 2]) > 1.8
    assert np.log2(errs[65, 4] / errs[129, 4]) > 3.5


def test_extend_outward_fills_neighbours():
    g = GridSpec(33)
    f = np.where(g.inside, 1.0, 0.0)
    e = extend_outward(f, g, layers=1)
    ring = ~g.inside & (g.radius < 1.0 + g.h)
    assert np.all(e[ring] == 1.0)
