import numpy as np
import pytest
from hypothesis import given, strategies as st

from endoconj.diagonal import DiagonalMatrix
from endoconj.domain import PolyEndo
from endoconj.errors import ConvergenceError, PreconditionError
from endoconj.jets import Jet, commute_residual, compose, invert, linear_part, power
from endoconj.linearization import (ProjectionSystem, build_theta, check_simultaneous,
                                    extend_theta_eval, koenigs_1d, linearize_idempotent,
                                    simultaneous_diagonalize)
from endoconj.sampling import random_disc_germ

from factories import conjugated_family, diagonal_jet, koenigs_by_iteration, random_idempotent

D = 8


# -- idempotents ---------------------------------------------------------------------

def test_linear_idempotent_needs_no_change():
    p = Jet.linear(np.diag([1, 0]), D)
    assert linearize_idempotent(p).allclose(Jet.identity(2, D))


def test_quadratic_idempotent():
    p = Jet.from_terms(2, 2, D, {(0, (1, 0)): 1, (0, (0, 2)): 1})
    xi = linearize_idempotent(p)
    expected = Jet.from_terms(2, 2, D, {(0, (1, 0)): 1, (0, (0, 2)): 1, (1, (0, 1)): 1})
    assert xi.allclose(expected)
    P = linear_part(p)
    assert compose(xi, p).allclose(compose(Jet.linear(P, D), xi))


def test_zero_idempotent():
    assert linearize_idempotent(Jet.zero(2, 2, D)).allclose(Jet.identity(2, D))


def test_non_idempotent_rejected():
    with pytest.raises(PreconditionError):
        linearize_idempotent(Jet.linear(np.diag([0.5, 1]), D))


@given(st.integers(0, 10_000), st.integers(1, 3))
def test_straightening_conjugates_p_to_its_linear_part(seed, n):
    p, _ = random_idempotent(np.random.default_rng(seed), n, 6)
    xi = linearize_idempotent(p)
    P = linear_part(p)
    assert compose(xi, p).allclose(compose(Jet.linear(P, 6), xi))
    assert np.allclose(linear_part(xi), np.eye(n))


# -- simultaneous diagonalization ---------------------------------------------------------

def test_coordinate_projections_give_identity():
    A = simultaneous_diagonalize([np.diag([1, 0]), np.diag([0, 1])])
    assert np.allclose(A, np.eye(2))


def test_oblique_projections():
    P1 = np.array([[1, 1], [0, 0]])
    P2 = np.array([[0, -1], [0, 1]])
    A = simultaneous_diagonalize([P1, P2])
    Ainv = np.linalg.inv(A)
    assert np.allclose(A @ P1 @ Ainv, np.diag([1, 0]))
    assert np.allclose(A @ P2 @ Ainv, np.diag([0, 1]))
    # the columns of A^-1 span the ranges (1, 0) and (1, -1)
    assert abs(np.linalg.det(np.column_stack([Ainv[:, 1], [1, -1]]))) < 1e-12


def test_rank_deficient_system_rejected():
    with pytest.raises(PreconditionError):
        simultaneous_diagonalize([np.diag([1, 0])])


def test_overlapping_projections_rejected():
    with pytest.raises(PreconditionError):
        simultaneous_diagonalize([np.diag([1, 0]), np.diag([1, 1])])


# -- Koenigs --------------------------------------------------------------------------

def test_koenigs_linear_germ():
    assert koenigs_1d(Jet.univariate([0, 0.3], D)).allclose(Jet.identity(1, D))


@pytest.mark.parametrize("sign", [1, -1])
def test_koenigs_quadratic(sign):
    g = Jet.univariate([0, 0.5, sign], D)
    eta = koenigs_1d(g)
    assert eta.coefficient(0, (2,)) == pytest.approx(4 * sign)
    assert eta.coefficient(0, (3,)) == pytest.approx(32 / 3)
    z = np.array([0.02, -0.03j, 0.01 + 0.02j])
    assert np.allclose(eta(z[:, None])[:, 0], koenigs_by_iteration(g, z), atol=1e-9)


def test_koenigs_rejects_neutral_or_degenerate():
    with pytest.raises(PreconditionError):
        koenigs_1d(Jet.univariate([0, 1.0, 1], D))
    with pytest.raises(PreconditionError):
        koenigs_1d(Jet.univariate([0, 0, 1], D))


@given(st.integers(0, 10_000))
def test_schroeder_residual_and_uniqueness(seed):
    rng = np.random.default_rng(seed)
    g = random_disc_germ(rng, D)
    eta = koenigs_1d(g)
    lam = g.coeffs[0, 1]
    assert (compose(eta, g) - eta * lam).max_abs() <= 1e-9
    k = int(rng.integers(2, D + 1))
    bumped = Jet(eta.coeffs + 1e-3 * (np.arange(D + 1) == k), 1, D)
    assert (compose(bumped, g) - bumped * lam).max_abs() > 1e-9


# -- theta ---------------------------------------------------------------------------

def test_theta_of_scalar_is_identity():
    data = build_theta(Jet.linear(0.3 * np.eye(2), D), ProjectionSystem.coordinate(2, D))
    assert data.theta.allclose(Jet.identity(2, D))
    assert data.lam.allclose(DiagonalMatrix.scalar(0.3, 2), 1e-15)


def test_theta_of_diagonal_linear_is_identity():
    data = build_theta(diagonal_jet([0.5, 0.25], D), ProjectionSystem.coordinate(2, D))
    assert data.theta.allclose(Jet.identity(2, D))


def test_theta_rejects_non_commuting_germ():
    h = Jet.from_terms(2, 2, D, {(0, (1, 0)): 0.5, (0, (0, 2)): 1, (1, (0, 1)): 0.25})
    with pytest.raises(PreconditionError):
        build_theta(h, ProjectionSystem.coordinate(2, D))


def test_theta_for_decoupled_quadratic():
    h = Jet.from_terms(2, 2, D, {(0, (1, 0)): 0.5, (0, (2, 0)): 1, (1, (0, 1)): 0.25})
    data = build_theta(h, ProjectionSystem.coordinate(2, D))
    assert data.residual <= 1e-9
    z1 = np.array([0.02, 0.01j])
    first = data.theta(np.column_stack([z1, np.zeros(2)]))[:, 0]
    assert np.allclose(first, koenigs_by_iteration(h.restrict_axis(0).component(0), z1), atol=1e-9)
    assert np.allclose(linear_part(data.theta), np.eye(2))


def test_theta_linear_part_is_diagonalizer():
    P1 = Jet.linear([[1, 1], [0, 0]], D)
    P2 = Jet.linear([[0, -1], [0, 1]], D)
    sys_ = ProjectionSystem.from_projections([P1, P2])
    h = Jet.linear(0.5 * np.eye(2), D)
    assert np.allclose(linear_part(build_theta(h, sys_).theta), sys_.diagonalizer)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_theta_recovers_planted_conjugacy(n):
    rng = np.random.default_rng(n)
    s, f, members, ps = conjugated_family(rng, n, D, 3)
    sys_ = ProjectionSystem.from_projections(ps)
    data = build_theta(f, sys_)
    assert data.residual <= 1e-9
    # theta differs from the planted s only by a diagonal scaling
    ratio = compose(data.theta, invert(s))
    M = linear_part(ratio)
    assert ratio.allclose(Jet.linear(np.diag(np.diag(M)), D))
    assert check_simultaneous(members + [f, power(f, 2)], f, sys_)


def test_check_simultaneous_trivial_cases():
    rng = np.random.default_rng(11)
    _, f, _, ps = conjugated_family(rng, 2, D, 0)
    sys_ = ProjectionSystem.from_projections(ps)
    assert check_simultaneous([f], f, sys_)
    assert check_simultaneous([f, compose(f, f)], f, sys_)


def test_check_simultaneous_reports_commutation_failure():
    sys_ = ProjectionSystem.coordinate(2, D)
    f = Jet.linear(0.25 * np.eye(2), D)
    bad = Jet.linear([[0.2, 0.1], [0.0, 0.2]], D)
    with pytest.raises(PreconditionError, match="p_"):
        check_simultaneous([bad], f, sys_)


@given(st.integers(0, 10_000))
def test_small_diagonal_family_is_contained_and_commutes(seed):
    rng = np.random.default_rng(seed)
    _, f, members, ps = conjugated_family(rng, 2, D, 2, spread=0.1)
    for h in members:
        assert PolyEndo(h).is_contained()
        assert commute_residual(h, f) <= 1e-9
        assert all(commute_residual(h, p) <= 1e-9 for p in ps)


# -- extension by iteration --------------------------------------------------------------

def test_extension_of_linear_map_is_exact():
    f = PolyEndo(Jet.linear(0.5 * np.eye(2), D))
    w = np.array([0.7, -0.6j])
    got = extend_theta_eval(f, Jet.identity(2, D), DiagonalMatrix.scalar(0.5, 2), w)
    assert np.allclose(got, w, atol=1e-15)


def test_extension_is_stable_in_l():
    g = Jet.univariate([0, 0.5, 1], D)
    f = PolyEndo(g, containment_certificate=0.9)
    eta = koenigs_1d(g)
    lam = DiagonalMatrix([0.5])
    v = extend_theta_eval(f, eta, lam, np.array([0.4]))
    # one more application of f must not move the value
    v_next = extend_theta_eval(f, eta, lam, f(np.array([0.4]))) / 0.5
    assert abs(v[0] - v_next[0]) <= 1e-9
    assert abs(v[0] - koenigs_by_iteration(g, [0.4], steps=60)[0]) <= 1e-8


def test_extension_rejects_outside_points():
    f = PolyEndo(Jet.linear(0.5 * np.eye(1), D))
    with pytest.raises(PreconditionError):
        extend_theta_eval(f, Jet.identity(1, D), DiagonalMatrix([0.5]), np.array([1.2]))


def test_extension_reports_slow_orbits():
    f = PolyEndo(Jet.linear(0.99 * np.eye(1), D))
    with pytest.raises(ConvergenceError):
        extend_theta_eval(f, Jet.identity(1, D), DiagonalMatrix([0.99]), np.array([0.95]), l_max=20)
