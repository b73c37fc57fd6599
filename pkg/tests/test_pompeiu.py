import math

import numpy as np
import pytest

from tensortom.grid import GridSpec
from tensortom.pompeiu import (D, DBAR, PompeiuProblem, area_integral_grid, area_integral_points, rectangle_kernel,
                               solve_d_grid, solve_d_pompeiu, solve_dbar_grid, solve_dbar_pompeiu)


@pytest.fixture(scope="module")
def grid():
    return GridSpec(65)


def _zeros(g):
    return np.zeros((g.n, g.n), dtype=complex)


def _ones(g):
    return np.ones((g.n, g.n), dtype=complex)


def test_holomorphic_data(grid):
    p = PompeiuProblem(_zeros(grid), lambda zeta: zeta, grid)
    pts = np.array([0.0, 0.3 + 0.4j, -0.5j])
    assert np.abs(solve_dbar_pompeiu(p, pts) - pts).max() < 1e-12


def test_conjugate_linear_data():
    g = GridSpec(129)
    p = PompeiuProblem(_ones(g), lambda zeta: np.conj(zeta), g)
    pts = np.array([0.0, 0.3 + 0.4j, -0.5j, 0.6])
    assert np.abs(solve_dbar_pompeiu(p, pts) - np.conj(pts)).max() < 1e-5


def test_d_problem_linear(grid):
    p = PompeiuProblem(_ones(grid), lambda zeta: zeta, grid, D)
    pts = np.array([0.1 - 0.2j, 0.5 + 0.1j])
    assert np.abs(solve_d_pompeiu(p, pts) - pts).max() < 1e-5


def test_conjugation_symmetry(grid, rng):
    psi = rng.standard_normal((grid.n, grid.n)) + 1j * rng.standard_normal((grid.n, grid.n))
    gb = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    p = PompeiuProblem(psi, gb, grid, DBAR)
    q = PompeiuProblem(np.conj(psi), np.conj(gb), grid, D)
    pts = np.array([0.2 + 0.1j, -0.4 + 0.3j])
    assert np.abs(solve_d_pompeiu(q, pts) - np.conj(solve_dbar_pompeiu(p, pts))).max() < 1e-14
    assert np.abs(solve_d_grid(q) - np.conj(solve_dbar_grid(p))).max() < 1e-14


def test_linearity(grid, rng):
    a, b = (rng.standard_normal((grid.n, grid.n)) + 0j for _ in range(2))
    ga, gb = (rng.standard_normal(64) + 0j for _ in range(2))
    ua = solve_dbar_grid(PompeiuProblem(a, ga, grid))
    ub = solve_dbar_grid(PompeiuProblem(b, gb, grid))
    uc = solve_dbar_grid(PompeiuProblem(2 * a - 1j * b, 2 * ga - 1j * gb, grid))
    assert np.abs(uc - (2 * ua - 1j * ub)).max() < 1e-12


def test_guard_band_and_validation(grid):
    p = PompeiuProblem(_zeros(grid), 0.0, grid)
    with pytest.raises(ValueError):
        solve_dbar_pompeiu(p, 0.99)
    with pytest.raises(ValueError):
        solve_dbar_pompeiu(p, 0.5, delta_b=0.6)
    with pytest.raises(ValueError):
        solve_d_pompeiu(p, 0.0)
    with pytest.raises(ValueError):
        PompeiuProblem(_zeros(grid), 0.0, grid, kind="laplace")
    with pytest.raises(ValueError):
        PompeiuProblem(np.zeros((5, 5)), 0.0, grid)
    bad = _zeros(grid)
    bad[grid.n // 2, grid.n // 2] = np.nan
    with pytest.raises(ValueError):
        PompeiuProblem(bad, 0.0, grid)


def test_zero_data_zero_solution(grid):
    assert np.abs(solve_dbar_grid(PompeiuProblem(_zeros(grid), None, grid))).max() == 0


def test_rectangle_kernel_symmetric_cell():
    # 1/zeta is odd, so a cell centred on the origin integrates to zero
    assert abs(rectangle_kernel(-0.5, 0.5, -0.5, 0.5)) < 1e-14
    # far cell: integral approaches area / centre
    val = rectangle_kernel(9.9, 10.1, -0.1, 0.1)
    assert val == pytest.approx(0.04 / 10.0, rel=1e-4)


@pytest.mark.parametrize("n", [129, 257])
def test_area_integral_of_one(n):
    """iint_D 1/(zeta - z) dA = -pi conj(z) inside the unit disk."""
    g = GridSpec(n)
    region = g.certified()
    A = area_integral_grid(_ones(g), g)
    assert np.abs(A + math.pi * np.conj(g.z))[region].max() <= 1e-6


def test_area_integral_points_matches_grid(grid):
    psi = np.cos(grid.z.real) + 1j * grid.z.imag
    A = area_integral_grid(psi, grid)
    idx = [(32, 32), (20, 40), (45, 12)]
    pts = np.array([grid.z[i, j] for i, j in idx])
    B = area_integral_points(psi, grid, pts)
    assert np.abs(B - np.array([A[i, j] for i, j in idx])).max() < 1e-12


def test_residual_is_small_away_from_boundary():
    """dbar of the solution reproduces Psi to O(h) on the certified region."""
    from tensortom.elliptic import dbar

    errs = []
    for n in (65, 129):
        g = GridSpec(n)
        psi = np.exp(g.z.real) * (1 + 0.5j * g.z.imag)
        u = solve_dbar_grid(PompeiuProblem(psi, 0.0, g))
        region = g.certified(0.1)
        errs.append(np.abs(dbar(u, g) - psi)[region].max())
    assert errs[1] < errs[0] and errs[1] < 0.05


def test_nonfinite_boundary_data_rejected(grid):
    with pytest.raises(ValueError):
        PompeiuProblem(_zeros(grid), np.array([1.0, np.inf, 0.0, 0.0]), grid)
