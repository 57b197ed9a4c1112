import math

import numpy as np
import pytest
from scipy.special import j0 as scipy_j0, jn_zeros

from freebdry import domains
from freebdry.errors import ConvergenceError, PreconditionError
from freebdry.geometry import FACE_FIXED, rasterize
from freebdry.quotients import CounterexampleSpec, counterexample_domain
from freebdry.rearrange import gradient_lp_norm, radial_rearrangement
from freebdry.spectral import (
    assemble,
    bessel_j0,
    check_frequency_vs_half_ball,
    eigen_scalar_field,
    first_bessel_zero,
    half_ball_reference,
    principal_frequency,
    quadratic_form,
    save_matrix_coo,
)


@pytest.fixture(scope="module")
def square_problem(square_domain):
    return assemble(square_domain, 1.0 / 64)


@pytest.fixture(scope="module")
def square_free_problem(square_free_bottom):
    return assemble(square_free_bottom, 1.0 / 64)


@pytest.fixture(scope="module")
def half_disk_eig_256():
    dom = domains.half_disk(segments=128)
    problem = assemble(dom, 1.0 / 256)
    lam, vec, iters = principal_frequency(problem)
    return dom, problem, lam, vec, iters


# -- assembly ---------------------------------------------------------------

def test_operator_symmetric(square_free_problem):
    A = square_free_problem.matrix
    assert abs(A - A.T).max() <= 1e-14 * abs(A).max()


def test_operator_positive_semidefinite(square_free_problem):
    rng = np.random.default_rng(2)
    A = square_free_problem.matrix
    for _ in range(100):
        v = rng.standard_normal(A.shape[0])
        assert float(v @ (A @ v)) >= 0.0


def test_quadratic_form_matches_face_energy(square_free_problem):
    """The matrix quadratic form must equal the face-difference energy:
    interior faces contribute (du)^2, fixed faces 2 u^2, free faces nothing."""
    prob = square_free_problem
    rng = np.random.default_rng(8)
    u = rng.standard_normal(prob.size)
    grid = prob.grid
    vals = np.zeros(grid.mask.shape)
    vals[prob.cells[:, 0], prob.cells[:, 1]] = u
    energy = 0.0
    ny, nx = grid.mask.shape
    for i in range(ny):
        for j in range(nx):
            if not grid.mask[i, j]:
                continue
            # east and north interior faces, counted once
            if j + 1 < nx and grid.mask[i, j + 1]:
                energy += (vals[i, j + 1] - vals[i, j]) ** 2
            if i + 1 < ny and grid.mask[i + 1, j]:
                energy += (vals[i + 1, j] - vals[i, j]) ** 2
            for d in range(4):
                if grid.face_labels[i, j, d] == FACE_FIXED:
                    energy += 2.0 * vals[i, j] ** 2
    assert quadratic_form(prob, u) == pytest.approx(energy, rel=1e-12)


# -- eigenvalues against separation-of-variables oracles -----------------------

def test_square_all_fixed(square_problem):
    lam, _, _ = principal_frequency(square_problem)
    assert lam == pytest.approx(2.0 * math.pi**2, rel=0.01)


def test_square_bottom_free(square_free_problem):
    lam, _, _ = principal_frequency(square_free_problem)
    assert lam == pytest.approx(5.0 * math.pi**2 / 4.0, rel=0.01)


def test_eigenvalue_scaling(square_free_bottom):
    lam1, _, _ = principal_frequency(assemble(square_free_bottom, 1.0 / 32))
    big = square_free_bottom.transformed(scale=2.0)
    lam2, _, _ = principal_frequency(assemble(big, 2.0 / 32))
    assert lam2 == pytest.approx(lam1 / 4.0, rel=1e-10)


def test_convergence_order(square_domain):
    exact = 2.0 * math.pi**2
    errs = []
    for h in (1.0 / 32, 1.0 / 64, 1.0 / 128):
        lam, _, _ = principal_frequency(assemble(square_domain, h))
        errs.append(abs(lam - exact))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.3)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.3)


def test_half_disk_free_diameter(half_disk_eig_256):
    _, _, lam, _, _ = half_disk_eig_256
    j01 = first_bessel_zero()
    assert lam == pytest.approx(j01**2, rel=0.02)


def test_reflection_identity_half_disk_vs_disk(half_disk_eig_256):
    # the half-disk with free diameter carries the full disk's first
    # Dirichlet eigenvalue (even reflection across the flat face)
    _, _, lam_half, _, _ = half_disk_eig_256
    disk = domains.disk(segments=128)
    lam_disk, _, _ = principal_frequency(assemble(disk, 1.0 / 128))
    assert lam_half == pytest.approx(lam_disk, rel=0.02)


# -- Bessel oracle ----------------------------------------------------------------

def test_bessel_series_vs_scipy():
    for x in np.linspace(0.1, 3.5, 30):
        assert bessel_j0(float(x)) == pytest.approx(float(scipy_j0(x)), abs=1e-14)


def test_first_zero_vs_scipy():
    j01 = first_bessel_zero()
    assert abs(bessel_j0(j01)) <= 1e-12
    assert j01 == pytest.approx(float(jn_zeros(0, 1)[0]), abs=1e-9)


# -- half-ball reference ------------------------------------------------------------

def test_reference_matching_half_disk():
    j01 = first_bessel_zero()
    assert half_ball_reference(math.pi / 2.0) == pytest.approx(j01**2, rel=1e-12)


def test_reference_unit_volume():
    j01 = first_bessel_zero()
    assert half_ball_reference(1.0) == pytest.approx(j01**2 * math.pi / 2.0, rel=1e-12)


def test_reference_volume_scaling():
    assert half_ball_reference(2.0) == pytest.approx(half_ball_reference(1.0) / 2.0, rel=1e-14)


def test_reference_rejects_nonpositive():
    with pytest.raises(ValueError):
        half_ball_reference(0.0)


# -- the frequency bound -----------------------------------------------------------------

def test_frequency_bound_half_disk_equality(half_disk_eig_256):
    dom, _, lam, _, _ = half_disk_eig_256
    reference = half_ball_reference(dom.area)
    assert lam - reference >= -0.02 * reference
    assert lam == pytest.approx(reference, rel=0.02)


def test_frequency_bound_square_bottom_free(square_free_bottom):
    rep = check_frequency_vs_half_ball(square_free_bottom, 1.0 / 64)
    assert rep.lam == pytest.approx(5.0 * math.pi**2 / 4.0, rel=0.01)
    assert rep.reference == pytest.approx(half_ball_reference(1.0), rel=1e-12)
    assert rep.margin > 0.0
    assert not rep.concavity_vacuous


def test_frequency_bound_vacuous_flag(square_domain):
    rep = check_frequency_vs_half_ball(square_domain, 1.0 / 64)
    assert rep.concavity_vacuous
    assert rep.lam == pytest.approx(2.0 * math.pi**2, rel=0.01)
    assert rep.margin > 0.0


def test_frequency_bound_rejects_nonconcave():
    dom = counterexample_domain(CounterexampleSpec(a=3.0))
    with pytest.raises(PreconditionError):
        check_frequency_vs_half_ball(dom, 0.02)


def test_eigenfunction_rearrangement_route(half_disk_eig_256):
    # the computed eigenfunction must satisfy the factor-2 gradient bound
    _, problem, _, vec, _ = half_disk_eig_256
    u = eigen_scalar_field(problem, vec)
    star = radial_rearrangement(u)
    lhs = gradient_lp_norm(star, 2.0) ** 2
    rhs = 2.0 * gradient_lp_norm(u, 2.0) ** 2
    assert lhs <= rhs * 1.02


def test_randomized_concave_suite_margin():
    rng = np.random.default_rng(41)
    count = 0
    while count < 4:
        dom = domains.random_concave_domain(rng)
        h = min(dom.bbox[2] - dom.bbox[0], dom.bbox[3] - dom.bbox[1]) / 64.0
        rep = check_frequency_vs_half_ball(dom, h)
        assert rep.margin >= -0.02 * rep.reference
        count += 1


# -- solver plumbing ---------------------------------------------------------------------

def test_deterministic_given_seed(square_free_problem):
    lam1, v1, it1 = principal_frequency(square_free_problem, seed=123)
    lam2, v2, it2 = principal_frequency(square_free_problem, seed=123)
    assert lam1 == lam2 and it1 == it2
    assert np.array_equal(v1, v2)


def test_no_fixed_face_rejected():
    # all-free square: pure Neumann operator is singular
    pts = [(0, 0), (1, 0), (1, 1), (0, 1)]
    from freebdry.geometry import LabeledDomain

    dom = LabeledDomain(pts, ["free"] * 4)
    prob = assemble(dom, 1.0 / 16)
    with pytest.raises(PreconditionError):
        principal_frequency(prob)


def test_convergence_budget(square_problem):
    with pytest.raises(ConvergenceError):
        principal_frequency(square_problem, tol=1e-16, max_iter=2)


def test_matrix_dump_round_trip(tmp_path, square_free_problem):
    path = tmp_path / "matrix.txt"
    save_matrix_coo(square_free_problem, path)
    rows = []
    with open(path) as fh:
        for line in fh:
            r, c, v = line.split()
            rows.append((int(r), int(c), float(v)))
    A = square_free_problem.matrix.tocoo()
    assert len(rows) == A.nnz
    dense = square_free_problem.matrix.toarray()
    for r, c, v in rows[:50]:
        assert dense[r, c] == pytest.approx(v, rel=1e-15)
