"""Principal frequency of a membrane with mixed fixed/free boundary.

The five-point Laplacian is assembled over the inside cells of a rasterized
domain.  Faces toward the outside contribute according to their label:

* fixed faces pin the value to zero *at the face* (mirrored ghost), adding
  2/h^2 to the diagonal -- this keeps the discrete eigenvalues second-order
  accurate in h;
* free faces mirror the value evenly (natural/Neumann), adding nothing.

The smallest eigenvalue comes from inverse power iteration with a sparse LU
factorization reused across iterations, started from a seeded random
positive vector so runs are reproducible.  The comparison value is the
half-ball reference: half the first Dirichlet eigenvalue of the equal-area
disk, which an even reflection identifies with the half-disk whose flat face
is free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .errors import ConvergenceError, DomainValidationError, PreconditionError
from .geometry import (
    FACE_FIXED,
    LabeledDomain,
    RasterGrid,
    is_concave_free_boundary,
    rasterize,
)
from .rearrange import ScalarField

DEFAULT_SEED = 0x5EED

__all__ = [
    "SpectralProblem",
    "FrequencyReport",
    "assemble",
    "assemble_grid",
    "principal_frequency",
    "quadratic_form",
    "bessel_j0",
    "first_bessel_zero",
    "half_ball_reference",
    "check_frequency_vs_half_ball",
    "eigen_scalar_field",
    "save_matrix_coo",
]

_DIRS = ((0, 1), (0, -1), (1, 0), (-1, 0))  # E, W, N, S


@dataclass
class SpectralProblem:
    """Sparse symmetric positive semidefinite operator over the inside cells."""

    matrix: sparse.csr_matrix
    grid: RasterGrid
    index: np.ndarray      # (ny, nx) int, -1 outside, cell number inside
    cells: np.ndarray      # (K, 2) row/col of each cell

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def h(self) -> float:
        return self.grid.h

    def has_fixed_face(self) -> bool:
        return bool((self.grid.face_labels == FACE_FIXED).any())


def assemble_grid(grid: RasterGrid) -> SpectralProblem:
    """Assemble the mixed-boundary five-point Laplacian on a grid."""
    mask = grid.mask
    ny, nx = mask.shape
    if not mask.any():
        raise DomainValidationError("no interior cells to assemble on")
    index = -np.ones((ny, nx), dtype=np.int64)
    ii, jj = np.nonzero(mask)
    index[ii, jj] = np.arange(len(ii))
    cells = np.column_stack([ii, jj])
    h2 = grid.h * grid.h

    rows, cols, vals = [], [], []
    diag = np.zeros(len(ii))
    for dcode, (di, dj) in enumerate(_DIRS):
        ni, nj = ii + di, jj + dj
        in_bounds = (ni >= 0) & (ni < ny) & (nj >= 0) & (nj < nx)
        nbr_idx = np.full(len(ii), -1, dtype=np.int64)
        nbr_idx[in_bounds] = index[ni[in_bounds], nj[in_bounds]]
        interior = nbr_idx >= 0
        diag[interior] += 1.0
        rows.append(np.nonzero(interior)[0])
        cols.append(nbr_idx[interior])
        vals.append(np.full(interior.sum(), -1.0))
        face = grid.face_labels[ii, jj, dcode]
        diag[(~interior) & (face == FACE_FIXED)] += 2.0
        # free faces mirror the value: no contribution
    rows.append(np.arange(len(ii)))
    cols.append(np.arange(len(ii)))
    vals.append(diag)
    A = sparse.coo_matrix(
        (np.concatenate(vals) / h2, (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(ii), len(ii)),
    ).tocsr()
    return SpectralProblem(matrix=A, grid=grid, index=index, cells=cells)


def assemble(domain: LabeledDomain, h: float) -> SpectralProblem:
    return assemble_grid(rasterize(domain, h))


def quadratic_form(problem: SpectralProblem, u: np.ndarray) -> float:
    """u^T A u scaled by h^2: the face-difference Dirichlet energy of u."""
    return float(u @ (problem.matrix @ u)) * problem.h**2


def principal_frequency(problem: SpectralProblem, tol: float = 1e-8,
                        max_iter: int = 500,
                        seed: int = DEFAULT_SEED) -> tuple[float, np.ndarray, int]:
    """Smallest eigenvalue by inverse power iteration.

    The operator is factorized once (sparse LU) and each iteration applies
    the inverse; the Rayleigh quotient is monitored until its relative change
    drops below ``tol``.  Requires at least one fixed face, which makes the
    operator positive definite.  Returns (eigenvalue, eigenvector, iterations).
    """
    if not problem.has_fixed_face():
        raise PreconditionError(
            "operator is singular without any fixed boundary face"
        )
    A = problem.matrix.tocsc()
    lu = splu(A)
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.5, 1.5, problem.size)
    x /= np.linalg.norm(x)
    lam_old = float(x @ (A @ x))
    for it in range(1, max_iter + 1):
        y = lu.solve(x)
        norm = np.linalg.norm(y)
        if not np.isfinite(norm) or norm == 0.0:
            raise ConvergenceError("inverse iteration produced a degenerate vector")
        x = y / norm
        lam = float(x @ (A @ x))
        if abs(lam - lam_old) <= tol * abs(lam):
            if x.sum() < 0:
                x = -x
            return lam, x, it
        lam_old = lam
    residual = float(np.linalg.norm(A @ x - lam_old * x))
    raise ConvergenceError(
        f"inverse iteration did not converge in {max_iter} steps "
        f"(last eigenvalue {lam_old:.6g}, residual {residual:.3g})"
    )


# ---------------------------------------------------------------------------
# disk reference through the first Bessel zero
# ---------------------------------------------------------------------------

def bessel_j0(x: float) -> float:
    """Series evaluation of J0; accurate to machine precision for |x| <= 4."""
    z = -0.25 * x * x
    term = 1.0
    total = 1.0
    for m in range(1, 40):
        term *= z / (m * m)
        total += term
        if abs(term) < 1e-18 * max(abs(total), 1e-30):
            break
    return total


@lru_cache(maxsize=1)
def first_bessel_zero() -> float:
    """First positive zero of J0, by bisection on [2, 3] to 1e-13."""
    lo, hi = 2.0, 3.0
    flo = bessel_j0(lo)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fmid = bessel_j0(mid)
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


def half_ball_reference(volume: float) -> float:
    """Reference frequency: half the first Dirichlet eigenvalue of the disk
    of area ``volume``, i.e. j01^2 pi / (2 volume).

    An even reflection across the flat face identifies this with the
    principal frequency of the half-disk of the same area whose diameter is
    free, so it is the sharp comparison value for concave-free domains.
    """
    if volume <= 0.0:
        raise ValueError("volume must be positive")
    j01 = first_bessel_zero()
    return j01 * j01 * math.pi / (2.0 * volume)


@dataclass(frozen=True)
class FrequencyReport:
    lam: float
    reference: float
    margin: float
    h: float
    iterations: int
    concavity_vacuous: bool = False

    def to_json_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "reference": self.reference,
            "margin": self.margin,
            "h": self.h,
            "iterations": self.iterations,
            "concavity_vacuous": self.concavity_vacuous,
        }


def check_frequency_vs_half_ball(domain: LabeledDomain, h: float,
                                 tol: float = 1e-8,
                                 seed: int = DEFAULT_SEED) -> FrequencyReport:
    """Principal frequency of the domain against the half-ball reference.

    Requires the free chain to be concave (the hypothesis under which the
    bound holds); an empty free chain is allowed but flagged as vacuous.
    """
    report = is_concave_free_boundary(domain)
    if not report.concave:
        raise PreconditionError(
            "free chain is not concave with respect to the domain"
        )
    problem = assemble(domain, h)
    lam, _, iters = principal_frequency(problem, tol=tol, seed=seed)
    reference = half_ball_reference(domain.area)
    return FrequencyReport(
        lam=lam,
        reference=reference,
        margin=lam - reference,
        h=h,
        iterations=iters,
        concavity_vacuous=report.vacuous,
    )


def eigen_scalar_field(problem: SpectralProblem, vector: np.ndarray) -> ScalarField:
    """Wrap an eigenvector as a nonnegative scalar field on the grid."""
    vals = np.zeros(problem.grid.mask.shape)
    vals[problem.cells[:, 0], problem.cells[:, 1]] = vector
    if vals.sum() < 0:
        vals = -vals
    vals = np.clip(vals, 0.0, None)
    return ScalarField(problem.grid, vals)


def save_matrix_coo(problem: SpectralProblem, path) -> None:
    """Text dump 'row col value' per line, sorted by (row, col)."""
    coo = problem.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        for k in order:
            fh.write(f"{int(coo.row[k])} {int(coo.col[k])} {float(coo.data[k])!r}\n")
