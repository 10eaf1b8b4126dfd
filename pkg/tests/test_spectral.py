import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from slidingheat.heat_sim import operator_matrix
from slidingheat.spectral import (
    BracketError,
    Eigenpair,
    Grid,
    GridMismatchError,
    SampledFunction,
    approximate_eigenvalue,
    eigen_residual,
    eigenfunction_eval,
    inner_product,
    residual_tolerance,
    sample_eigenfunction,
    solve_eigenvalue,
)

# mpmath.findroot at 30 digits on r tan r = 0.5
R0, LAM0, PHI1_0 = 0.653271187094, -0.426763243888, 1.2592874578
R1, LAM1, PHI1_1 = 3.29231002128, -10.8393052762, -1.01146636562
# mpmath.quad of 10 x^3 phi_1(x) on [0, 1]
SIGMA0_BRANCH1 = -1.77222609984


@pytest.mark.parametrize("branch, r, lam", [(0, R0, LAM0), (1, R1, LAM1)])
def test_roots_match_high_precision(branch, r, lam):
    pair = solve_eigenvalue(0.5, branch)
    assert pair.r == pytest.approx(r, abs=1e-6)
    assert pair.lam == pytest.approx(lam, abs=1e-6)
    assert pair.lam == -pair.r ** 2
    assert pair.residual < 1e-12


def test_branch1_vs_closed_form_approximation(pair1):
    assert approximate_eigenvalue(0.5) == pytest.approx(-10.8696044011, abs=1e-9)
    assert abs(pair1.lam - approximate_eigenvalue(0.5)) == pytest.approx(0.0302991, abs=1e-6)


def test_small_c0_root_goes_to_zero():
    for c0 in (1e-2, 1e-4, 1e-8):
        pair = solve_eigenvalue(c0, 0)
        assert pair.r == pytest.approx(math.sqrt(c0), rel=c0)
        assert pair.lam == pytest.approx(-c0, rel=c0)


@pytest.mark.parametrize("c0, branch", [(0.0, 0), (-1.0, 0), (0.5, -1), (0.5, 1.5)])
def test_rejects_bad_arguments(c0, branch):
    with pytest.raises(ValueError):
        solve_eigenvalue(c0, branch)


def test_bracket_error_is_value_error():
    assert issubclass(BracketError, ValueError)


@settings(max_examples=200, deadline=None)
@given(c0=st.floats(1e-6, 50.0), branch=st.integers(0, 20))
def test_eigenpair_invariants(c0, branch):
    pair = solve_eigenvalue(c0, branch)
    assert branch * math.pi < pair.r < branch * math.pi + math.pi / 2
    assert pair.residual < residual_tolerance(pair)
    if branch <= 1 and c0 <= 1:
        assert pair.residual < 1e-12
    assert pair.lam < 0
    assert pair.b_star_phi == pytest.approx(math.cos(pair.r) + c0 / pair.r * math.sin(pair.r))
    assert pair.b_star_phi != 0
    # boundary conditions of the analytic eigenfunction
    assert abs(pair.derivative(0.0) - c0 * pair(0.0)) < 1e-10 * max(1.0, c0)
    assert abs(pair.derivative(1.0)) < 1e-10 * max(1.0, c0)


def test_eigenfunction_values(pair0, pair1):
    assert eigenfunction_eval(pair0, 0.0) == 1.0
    assert eigenfunction_eval(pair1, 0.0) == 1.0
    assert eigenfunction_eval(pair0, 1.0) == pytest.approx(PHI1_0, abs=1e-9)
    assert eigenfunction_eval(pair1, 1.0) == pytest.approx(PHI1_1, abs=1e-9)
    assert pair1.b_star_phi == pytest.approx(PHI1_1, abs=1e-9)
    with pytest.raises(ValueError):
        eigenfunction_eval(pair0, 1.5)


def test_sampling(pair0):
    f = sample_eigenfunction(pair0, Grid(11))
    assert f.values[0] == 1.0
    assert f.values[10] == pytest.approx(PHI1_0, abs=1e-9)
    ends = sample_eigenfunction(pair0, Grid(2))
    np.testing.assert_array_equal(ends.values, [pair0(0.0), pair0(1.0)])


def test_grid():
    g = Grid.from_dx(0.1)
    assert g.n_nodes == 11 and g.x[0] == 0.0 and g.x[-1] == 1.0
    assert g.weights.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        Grid.from_dx(0.3)
    with pytest.raises(ValueError):
        SampledFunction(g, np.zeros(5))


def test_inner_product_polynomials():
    g = Grid(11)
    one = SampledFunction.from_callable(lambda x: 1.0, g)
    x = SampledFunction.from_callable(lambda x: x, g)
    assert inner_product(one, one) == pytest.approx(1.0, abs=1e-15)
    # trapezoid error for x^2 is h^2/6 exactly
    assert inner_product(x, x) == pytest.approx(1 / 3 + 0.01 / 6, abs=1e-14)
    with pytest.raises(GridMismatchError):
        inner_product(one, SampledFunction.from_callable(lambda x: 1.0, Grid(21)))


def test_sigma0_against_fine_quadrature(pair1):
    # independent references: adaptive quadrature and a 1e5-node trapezoid
    ref, _ = quad(lambda x: 10 * x ** 3 * pair1(x), 0, 1, epsabs=1e-13)
    assert ref == pytest.approx(SIGMA0_BRANCH1, abs=1e-9)
    fine = np.linspace(0, 1, 100_001)
    assert np.trapezoid(10 * fine ** 3 * pair1(fine), fine) == pytest.approx(ref, abs=1e-4)

    errors = []
    for n in (11, 21, 41):
        g = Grid(n)
        z0 = SampledFunction.from_callable(lambda x: 10 * x ** 3, g)
        errors.append(abs(inner_product(sample_eigenfunction(pair1, g), z0) - ref))
    assert errors[0] < 0.03
    assert 3.8 < errors[0] / errors[1] < 4.2
    assert 3.8 < errors[1] / errors[2] < 4.2


@settings(max_examples=100, deadline=None)
@given(n=st.integers(3, 60), seed=st.integers(0, 2 ** 32 - 1))
def test_inner_product_symmetric_bilinear(n, seed):
    rng = np.random.default_rng(seed)
    g = Grid(n)
    f, h, k = (SampledFunction(g, rng.normal(size=n)) for _ in range(3))
    a, b = rng.normal(size=2)
    assert inner_product(f, h) == inner_product(h, f)
    combo = SampledFunction(g, a * f.values + b * h.values)
    lhs = inner_product(combo, k)
    rhs = a * inner_product(f, k) + b * inner_product(h, k)
    assert lhs == pytest.approx(rhs, abs=1e-12 * (1 + abs(a) + abs(b)) * n)


@pytest.mark.parametrize("branch", [0, 1])
def test_discrete_eigen_residual_second_order(branch):
    pair = solve_eigenvalue(0.5, branch)
    coarse, fine = eigen_residual(pair, Grid(11)), eigen_residual(pair, Grid(21))
    assert 3.4 <= coarse["weighted_l1"] / fine["weighted_l1"] <= 4.6
    assert 3.4 <= coarse["max_interior"] / fine["max_interior"] <= 4.6


def test_robin_row_is_first_order_pointwise(pair0):
    # the ghost-node Robin row carries an h/3 * phi'''(0) truncation term
    for n in (11, 21, 41):
        g = Grid(n)
        phi = sample_eigenfunction(pair0, g).values
        res0 = (operator_matrix(g, 0.5) @ phi - pair0.lam * phi)[0]
        third = pair0.lam * pair0.derivative(0.0)
        assert res0 == pytest.approx(g.dx / 3 * third, rel=0.1)


def test_scaled_pair(pair1):
    s = pair1.scaled(-3.0)
    assert s.lam == pair1.lam
    assert s.b_star_phi == pytest.approx(-3.0 * pair1.b_star_phi)
    assert s(0.4) == pytest.approx(-3.0 * pair1(0.4))
    with pytest.raises(ValueError):
        pair1.scaled(0.0)
    assert isinstance(s, Eigenpair)
