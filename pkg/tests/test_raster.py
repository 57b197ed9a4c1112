import math

import numpy as np
import pytest

from freebdry import domains
from freebdry.errors import DomainValidationError
from freebdry.geometry import FACE_FIXED, FACE_FREE, rasterize


def test_unit_square_exact(square_domain):
    grid = rasterize(square_domain, 1.0 / 64)
    assert int(grid.mask.sum()) == 64 * 64
    assert grid.area() == pytest.approx(1.0, abs=1e-12)


def test_half_disk_area_bound(half_disk_domain):
    h = 1.0 / 128
    grid = rasterize(half_disk_domain, h)
    perimeter = half_disk_domain.boundary_length()
    assert abs(grid.area() - half_disk_domain.area) <= 2.0 * h * perimeter


def test_half_disk_refinement_first_order(half_disk_domain):
    errs = []
    for h in (1.0 / 64, 1.0 / 128, 1.0 / 256):
        grid = rasterize(half_disk_domain, h)
        errs.append(abs(grid.area() - half_disk_domain.area))
    assert errs[0] > errs[1] > errs[2]
    # roughly first order: halving h should not shrink the error much faster
    # than quadratically or slower than not at all
    assert errs[0] / errs[1] > 1.2
    assert errs[1] / errs[2] > 1.2


def test_face_labels_square_bottom_free(square_free_bottom):
    grid = rasterize(square_free_bottom, 1.0 / 16)
    labs = grid.face_labels
    ii, jj = np.nonzero(grid.mask)
    i0, i1 = ii.min(), ii.max()
    j0, j1 = jj.min(), jj.max()
    # dir order E, W, N, S
    assert (labs[i0, j0:j1 + 1, 3] == FACE_FREE).all()      # bottom row, south
    assert (labs[i1, j0:j1 + 1, 2] == FACE_FIXED).all()     # top row, north
    assert (labs[i0:i1 + 1, j0, 1] == FACE_FIXED).all()     # left col, west
    assert (labs[i0:i1 + 1, j1, 0] == FACE_FIXED).all()     # right col, east
    # interior faces untagged
    assert (labs[(i0 + i1) // 2, (j0 + j1) // 2] == 0).all()


def test_too_coarse_rejected(square_domain):
    with pytest.raises(DomainValidationError):
        rasterize(square_domain, 0.2)


def _fixed_refinement_suite():
    """Ten curved-boundary domains; cell-count error oscillates per domain,
    so the refinement trend is asserted on the suite total."""
    rng = np.random.default_rng(0)
    doms = []
    while len(doms) < 7:
        d = domains._random_bite_domain(rng, 24)
        if d is not None:
            doms.append(d.transformed(angle=rng.uniform(0, 3), shift=rng.uniform(-1, 1, 2)))
    doms.append(domains.half_disk().transformed(angle=0.37, shift=(0.21, -0.4)))
    doms.append(domains.disk().transformed(angle=0.1, shift=(0.13, 0.29)))
    doms.append(domains.half_disk(radius=1.4).transformed(angle=2.2, shift=(-0.3, 0.11)))
    return doms


def test_monotone_refinement_suite():
    doms = _fixed_refinement_suite()
    assert len(doms) == 10
    totals = []
    for k in range(3):
        total = 0.0
        for dom in doms:
            h0 = min(dom.bbox[2] - dom.bbox[0], dom.bbox[3] - dom.bbox[1]) / 48.0
            total += abs(rasterize(dom, h0 / 2.0**k).area() - dom.area)
        totals.append(total)
    assert totals[1] < totals[0]
    assert totals[2] < totals[1]
