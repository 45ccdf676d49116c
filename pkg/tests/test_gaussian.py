import itertools

import numpy as np
import pytest

from minuncert.errors import InputError, TruncationError
from minuncert.gaussian import (
    FockTruncation,
    GaussianParams,
    closed_form_bound,
    coherent_eigenvalue,
    coherent_expectation,
    displaced_gaussian,
    gaussian_moments_exact,
    mixture_purity_exact,
    normal_order,
    quadratic_observables,
    gaussian_mixture_example,
    quadrature_ops,
    required_fock_dim,
    saturating_lambda,
)
from minuncert.operator_core import (
    DensityMatrix,
    HermitianOperator,
    expectation,
    is_pure,
    uncertainty_report,
)

from . import oracles

GRID = list(itertools.product([0.0, 0.5, 1.0, 2.0], [0.5, 1.0, 2.0], [0.5, 1.0]))


def _squared(op):
    return HermitianOperator(op.matrix @ op.matrix)


def _fock(p, margin=8):
    return FockTruncation(required_fock_dim(p, margin), margin)


# -- quadratures ---------------------------------------------------------------

def test_canonical_commutator_low_block():
    x, p = quadrature_ops(GaussianParams(kappa=1, hbar=1), FockTruncation(4, 1))
    c = x.matrix @ p.matrix - p.matrix @ x.matrix
    assert abs(c[0, 0] - 1j) <= 1e-12
    np.testing.assert_allclose(c[:3, :3], 1j * np.eye(3), atol=1e-12)


def test_ground_state_widths():
    ground = DensityMatrix.from_vector(np.eye(16)[0])
    x, _ = quadrature_ops(GaussianParams(kappa=1, hbar=1), FockTruncation(16))
    assert expectation(_squared(x), ground) == pytest.approx(0.5, abs=1e-14)
    _, p = quadrature_ops(GaussianParams(kappa=2, hbar=1), FockTruncation(16))
    ref = oracles.gaussian_quadrature_moments(0.0, 2.0, 1.0)
    assert ref["mean_p2"] == pytest.approx(1.0, abs=1e-13)
    assert expectation(_squared(p), ground) == pytest.approx(1.0, abs=1e-14)


def test_truncation_validation():
    with pytest.raises(InputError):
        FockTruncation(1)
    with pytest.raises(InputError):
        FockTruncation(4, 4)
    with pytest.raises(InputError):
        GaussianParams(kappa=0)
    with pytest.raises(InputError):
        GaussianParams(hbar=-1)


# -- observables ---------------------------------------------------------------

@pytest.mark.parametrize("hbar,kappa", [(1, 1), (0.5, 2), (1, 0.5)])
def test_b_plus_i_a_is_a_square(hbar, kappa):
    p = GaussianParams(kappa=kappa, hbar=hbar)
    t = FockTruncation(32)
    x, mom = quadrature_ops(p, t)
    a, b = quadratic_observables(p, t)
    root = hbar * kappa * x.matrix + 1j * mom.matrix
    lhs = b.matrix + 1j * hbar * kappa * a.matrix
    np.testing.assert_allclose(lhs[:24, :24], (root @ root)[:24, :24], atol=1e-12)


@pytest.mark.parametrize("n", [16, 32, 64])
def test_a_is_traceless(n):
    a, _ = quadratic_observables(GaussianParams(), FockTruncation(n))
    assert abs(np.trace(a.matrix)) <= 1e-10 * n


def test_ground_state_mean_a_vanishes():
    a, _ = quadratic_observables(GaussianParams(), FockTruncation(16))
    assert expectation(a, DensityMatrix.from_vector(np.eye(16)[0])) == pytest.approx(0.0, abs=1e-15)


# -- states --------------------------------------------------------------------

def test_zero_displacement_is_ground_state():
    v = displaced_gaussian(GaussianParams(a=0.0), 1, FockTruncation(8, 2))
    np.testing.assert_array_equal(v, np.eye(8)[0])


def test_displaced_mean_position():
    p = GaussianParams(a=1.0, kappa=1.0)
    t = FockTruncation(64)
    x, _ = quadrature_ops(p, t)
    ref = oracles.gaussian_quadrature_moments(1.0, 1.0, 1.0)
    assert ref["mean_x"] == pytest.approx(1.0, abs=1e-12)
    rho = DensityMatrix.from_vector(displaced_gaussian(p, 1, t))
    assert expectation(x, rho) == pytest.approx(ref["mean_x"], abs=1e-9)


@pytest.mark.parametrize("a,kappa", [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5)])
def test_overlap(a, kappa):
    p = GaussianParams(a=a, kappa=kappa)
    t = _fock(p)
    ov = np.vdot(displaced_gaussian(p, 1, t), displaced_gaussian(p, -1, t))
    ref = oracles.gaussian_overlap(a, -a, kappa)
    assert ref == pytest.approx(np.exp(-kappa * a**2), rel=1e-12)
    assert abs(ov - ref) <= 1e-9


def test_truncation_guard():
    with pytest.raises(TruncationError):
        displaced_gaussian(GaussianParams(a=4.0, kappa=2.0), 1, FockTruncation(16))
    n = required_fock_dim(GaussianParams(a=4.0, kappa=2.0))
    displaced_gaussian(GaussianParams(a=4.0, kappa=2.0), 1, FockTruncation(n))
    with pytest.raises(TruncationError):
        displaced_gaussian(GaussianParams(a=4.0, kappa=2.0), 1, FockTruncation(n - 1))


def test_sign_validation():
    with pytest.raises(InputError):
        displaced_gaussian(GaussianParams(), 0, FockTruncation())


# -- the example ---------------------------------------------------------------

def test_gaussian_mixture_example_default():
    p = GaussianParams(a=1.0, kappa=1.0, hbar=1.0)
    rep = uncertainty_report(*gaussian_mixture_example(p, FockTruncation(64)))
    assert rep.product == pytest.approx(4.0, abs=1e-8)
    assert rep.bound == pytest.approx(4.0, abs=1e-8)
    assert 2 * (p.a**2 + 1) == 4
    assert rep.saturated and rep.nontrivial
    assert rep.purity == pytest.approx((1 + np.exp(-2)) / 2, abs=1e-8)


def test_zero_displacement_example_is_pure_and_saturates():
    a, b, rho = gaussian_mixture_example(GaussianParams(a=0.0), FockTruncation(16))
    assert is_pure(rho)
    assert uncertainty_report(a, b, rho).saturated


@pytest.mark.parametrize("a,kappa,hbar", GRID)
def test_exact_fock_and_quadrature_agree(a, kappa, hbar):
    p = GaussianParams(a, kappa, hbar)
    exact = gaussian_moments_exact(p)
    quad = oracles.gaussian_quadrature_moments(a, kappa, hbar)
    mix = exact["mixture"]
    plus = exact["plus"]
    assert abs(quad["mean_a"]) <= 1e-9
    for key in ("mean_a2", "mean_b", "mean_b2"):
        assert getattr(plus, key) == pytest.approx(quad[key], abs=1e-8 * max(1, abs(quad[key])))
    assert plus.mean_i_comm == pytest.approx(quad["i_comm"], abs=1e-8 * max(1, abs(quad["i_comm"])))
    assert plus.mean_x2 == pytest.approx(quad["mean_x2"], abs=1e-10)
    assert plus.mean_x2 == pytest.approx(a**2 + 1 / (2 * kappa), abs=1e-12)
    assert plus.mean_x == pytest.approx(a) and plus.mean_p == 0

    rep = uncertainty_report(*gaussian_mixture_example(p, _fock(p)))
    for name in ("mean_a", "mean_b", "spread_a", "spread_b", "bound"):
        assert getattr(rep, name) == pytest.approx(getattr(mix, name), abs=1e-8)
    assert mix.bound == pytest.approx(closed_form_bound(p), rel=1e-12)
    assert rep.gap == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("a,kappa,hbar", GRID)
def test_parity_of_a_and_b(a, kappa, hbar):
    p = GaussianParams(a, kappa, hbar)
    t = _fock(p)
    a_op, b_op = quadratic_observables(p, t)
    plus = DensityMatrix.from_vector(displaced_gaussian(p, 1, t))
    minus = DensityMatrix.from_vector(displaced_gaussian(p, -1, t))
    for op in (a_op, b_op):
        assert expectation(op, plus) == pytest.approx(expectation(op, minus), abs=1e-10)


@pytest.mark.parametrize("a,kappa", [(0.5, 1.0), (1.0, 1.0), (2.0, 2.0), (1.0, 0.5)])
def test_mixture_purity(a, kappa):
    p = GaussianParams(a, kappa)
    _, _, rho = gaussian_mixture_example(p, _fock(p))
    assert rho.purity() == pytest.approx(mixture_purity_exact(p), abs=1e-8)
    assert rho.purity() < 1


def test_truncation_convergence():
    p = GaussianParams(a=1.0)
    base = required_fock_dim(p, 0)
    gaps = [uncertainty_report(*gaussian_mixture_example(p, FockTruncation(n, 0))).gap
            for n in (base, 2 * base, 4 * base)]
    diffs = [abs(gaps[0] - gaps[1]), abs(gaps[1] - gaps[2])]
    assert all(d < 1e-8 for d in diffs)
    # both differences sit at the round-off floor, so only a weak ordering holds
    assert diffs[1] <= diffs[0] + 1e-13


# -- normal ordering -----------------------------------------------------------

def test_normal_order_of_c_cdag():
    assert normal_order({(0, 1): 1.0}) == {(1, 0): 1.0, (): 1.0}


def test_coherent_expectation_number_variance():
    beta = 0.7 + 0.2j
    n2 = {(1, 0, 1, 0): 1.0}
    assert coherent_expectation(n2, beta) == pytest.approx(abs(beta) ** 4 + abs(beta) ** 2)


def test_coherent_eigenvalue_and_lambda():
    p = GaussianParams(a=1.5, kappa=2.0, hbar=0.5)
    assert saturating_lambda(p) == pytest.approx(-1.0)
    assert coherent_eigenvalue(p) == pytest.approx(-1j * 0.5 * 2.0 * 2.25)
    minimal = _fock(p)
    # the residual is the truncation error: bounded at the guard size, negligible beyond
    for t, tol in ((minimal, 1e-7), (FockTruncation(2 * minimal.n_max), 1e-12)):
        a, b = quadratic_observables(p, t)
        m = a.matrix + 1j * saturating_lambda(p) * b.matrix
        for sign in (1, -1):
            v = displaced_gaussian(p, sign, t)
            assert np.linalg.norm(m @ v - coherent_eigenvalue(p) * v) < tol
