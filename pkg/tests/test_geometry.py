import numpy as np
import pytest

from irisdeform.errors import (
    BadRadius,
    DegenerateGeometry,
    DimensionMismatch,
    EmptyMask,
    OutOfRange,
)
from irisdeform.geometry import (
    Binning,
    Circle,
    IrisCircles,
    ManifestRow,
    annulus,
    assign_bin,
    circular_target_mask,
    disk,
    fit_circles,
    full_frame,
    make_pairs,
    pupil_iris_ratio,
    ratio_delta,
    target_mask_constrict,
    target_mask_dilate,
)

from conftest import make_circles


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

def test_circle_rejects_bad_radius():
    with pytest.raises(DegenerateGeometry):
        Circle(0, 0, 0.0)
    with pytest.raises(DegenerateGeometry):
        Circle(0, 0, -3.0)
    with pytest.raises(DegenerateGeometry):
        Circle(float("nan"), 0, 1.0)


def test_iris_circles_invariants():
    with pytest.raises(DegenerateGeometry):
        IrisCircles(pupil=Circle(0, 0, 50), iris=Circle(0, 0, 50))
    with pytest.raises(DegenerateGeometry):
        IrisCircles(pupil=Circle(200, 0, 10), iris=Circle(0, 0, 100))
    c = make_circles(30, 100)
    assert 0 < pupil_iris_ratio(c) < 1


def test_binning_validation():
    with pytest.raises(ValueError):
        Binning(lo=0.5, hi=0.2)
    with pytest.raises(ValueError):
        Binning(width=0.0)
    with pytest.raises(ValueError):
        Binning(lo=0.2, hi=0.7, width=0.15)
    assert Binning().n_bins == 5


# ---------------------------------------------------------------------------
# Ratios and binning
# ---------------------------------------------------------------------------

def test_pupil_iris_ratio_values():
    assert pupil_iris_ratio(make_circles(30, 100)) == pytest.approx(0.30)
    assert pupil_iris_ratio(make_circles(70, 100)) == pytest.approx(0.70)
    assert pupil_iris_ratio(make_circles(99, 100)) == pytest.approx(0.99)


def test_ratio_delta_values():
    assert ratio_delta(make_circles(65, 100), make_circles(25, 100)) == pytest.approx(0.40)
    c = make_circles(42, 100)
    assert ratio_delta(c, c) == 0.0
    assert ratio_delta(make_circles(20, 100), make_circles(70, 100)) == pytest.approx(0.5)


def test_ratio_delta_is_a_metric():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a, b, c = (make_circles(r, 100.0) for r in rng.uniform(5, 95, size=3))
        assert ratio_delta(a, b) == ratio_delta(b, a)
        assert ratio_delta(a, b) >= 0
        assert ratio_delta(a, c) <= ratio_delta(a, b) + ratio_delta(b, c) + 1e-15


def test_assign_bin_examples():
    b = Binning()
    assert assign_bin(0.25, b) == 0
    assert assign_bin(0.70, b) == 4
    with pytest.raises(OutOfRange):
        assign_bin(0.15, b)
    with pytest.raises(OutOfRange):
        assign_bin(0.71, b)
    assert assign_bin(0.2, b) == 0


def test_assign_bin_covers_range_without_gaps():
    b = Binning()
    ratios = np.linspace(0.2, 0.7, 5001)
    ks = np.array([assign_bin(float(r), b) for r in ratios])
    assert ks.min() == 0 and ks.max() == 4
    # Non-decreasing across the range: no overlaps or inversions.
    assert (np.diff(ks) >= 0).all()


def test_assign_bin_edge_convention():
    # Exactly representable binary-float edges so the half-open convention
    # can be asserted without rounding ambiguity.
    b = Binning(lo=0.25, hi=0.75, width=0.125)
    assert b.n_bins == 4
    for k in range(1, 4):
        edge = 0.25 + 0.125 * k
        assert assign_bin(edge, b) == k - 1  # upper edge belongs to the bin below
        assert assign_bin(edge + 1e-9, b) == k
    assert assign_bin(0.25, b) == 0
    assert assign_bin(0.75, b) == 3


# ---------------------------------------------------------------------------
# Pairing
# ---------------------------------------------------------------------------

def _row(i, identity="a", eye="L", pupil=30.0, iris=100.0):
    return ManifestRow(f"img{i}.png", f"msk{i}.png", identity, eye, pupil, iris)


def test_make_pairs_cross_bin_example():
    rows = [_row(1, pupil=25), _row(2, pupil=28), _row(3, pupil=55)]  # bins 0, 0, 3
    pairs = make_pairs(rows)
    got = [(p[0].image_path, p[1].image_path) for p in pairs]
    assert got == [
        ("img1.png", "img3.png"),
        ("img2.png", "img3.png"),
        ("img3.png", "img1.png"),
        ("img3.png", "img2.png"),
    ]


def test_make_pairs_same_bin_yields_nothing():
    rows = [_row(i, pupil=25 + i) for i in range(4)]  # all bin 0
    assert make_pairs(rows) == []


def test_make_pairs_never_crosses_identities():
    rows = [_row(1, identity="a", pupil=25), _row(2, identity="b", pupil=55)]
    assert make_pairs(rows) == []


def test_make_pairs_never_crosses_eyes():
    rows = [_row(1, eye="L", pupil=25), _row(2, eye="R", pupil=55)]
    assert make_pairs(rows) == []


def test_make_pairs_skips_out_of_range():
    rows = [_row(1, pupil=15), _row(2, pupil=25), _row(3, pupil=55)]
    pairs = make_pairs(rows)
    paths = {p[0].image_path for p in pairs} | {p[1].image_path for p in pairs}
    assert "img1.png" not in paths
    assert len(pairs) == 2


# ---------------------------------------------------------------------------
# Circle fitting
# ---------------------------------------------------------------------------

def test_fit_circles_perfect_annulus(annulus_mask_256):
    c = fit_circles(annulus_mask_256)
    assert abs(c.pupil.cx - 128) < 0.5 and abs(c.pupil.cy - 128) < 0.5
    assert abs(c.iris.cx - 128) < 0.5 and abs(c.iris.cy - 128) < 0.5
    assert abs(c.pupil.r - 40) < 0.5
    assert abs(c.iris.r - 120) < 0.5


def test_fit_circles_occluded_annulus(annulus_mask_256):
    occluded = annulus_mask_256.copy()
    occluded[: int(0.30 * 256), :] = False  # eyelid-style occlusion of the top 30%
    c = fit_circles(occluded)
    assert abs(c.iris.r - 120) < 2.0
    assert abs(c.pupil.r - 40) < 2.0


def test_fit_circles_empty_mask():
    with pytest.raises(EmptyMask):
        fit_circles(np.zeros((64, 64), dtype=bool))


def test_fit_circles_eccentric_pupil():
    mask = annulus((256, 256), make_circles(35, 110, pupil_dx=10.0, pupil_dy=-6.0))
    c = fit_circles(mask)
    assert abs(c.pupil.cx - 138) < 1.0
    assert abs(c.pupil.cy - 122) < 1.0
    assert abs(c.pupil.r - 35) < 1.0
    assert abs(c.iris.r - 110) < 1.0


# ---------------------------------------------------------------------------
# Target masks
# ---------------------------------------------------------------------------

def test_target_mask_dilate(annulus_mask_256):
    c = make_circles()
    out = target_mask_dilate(annulus_mask_256, c, 60.0)
    assert not (out & ~annulus_mask_256).any()  # subset of input
    assert out.sum() < annulus_mask_256.sum()
    # No set pixel inside the enlarged pupil disk.
    assert not (out & disk(out.shape, 128, 128, 60.0)).any()
    # Matches the analytic annulus with inner radius 60.
    expected = annulus((256, 256), make_circles(60, 120))
    assert (out == expected).all()


def test_target_mask_dilate_bad_radius(annulus_mask_256):
    c = make_circles()
    with pytest.raises(BadRadius):
        target_mask_dilate(annulus_mask_256, c, 40.0)  # not a dilation
    with pytest.raises(BadRadius):
        target_mask_dilate(annulus_mask_256, c, 120.0)  # at/above iris radius


def test_target_mask_dilate_popcount_monotone(annulus_mask_256):
    c = make_circles()
    counts = [
        target_mask_dilate(annulus_mask_256, c, r).sum() for r in np.linspace(45, 115, 8)
    ]
    assert all(b <= a for a, b in zip(counts, counts[1:]))


def test_target_mask_constrict_unoccluded():
    c = make_circles(60, 120)
    mask = annulus((256, 256), c)
    out = target_mask_constrict(mask, c, 30.0, full_frame(mask.shape))
    expected = annulus((256, 256), make_circles(30, 120))
    assert (out == expected).all()


def test_target_mask_constrict_removes_filled_pixels_above_eyelid():
    c = make_circles(60, 120)
    mask = annulus((256, 256), c)
    eyelid = full_frame(mask.shape)
    eyelid[:100, :] = False  # eyelid covers the top of the (filled) pupil
    mask &= eyelid
    out = target_mask_constrict(mask, c, 30.0, eyelid)
    assert not (out & ~eyelid).any()
    assert not (out & disk(out.shape, 128, 128, 30.0)).any()


def test_target_mask_constrict_errors():
    c = make_circles(60, 120)
    mask = annulus((256, 256), c)
    with pytest.raises(BadRadius):
        target_mask_constrict(mask, c, 60.0, full_frame(mask.shape))
    with pytest.raises(DimensionMismatch):
        target_mask_constrict(mask, c, 30.0, full_frame((128, 128)))


def test_circular_target_mask_alpha():
    c = make_circles(55, 100)
    out = circular_target_mask(c, 0.35, full_frame((256, 256)))
    expected = annulus((256, 256), make_circles(35, 100))
    assert (out == expected).all()


def test_circular_target_mask_alpha_sweep_monotone():
    c = make_circles(55, 100)
    eyelid = full_frame((256, 256))
    alphas = np.arange(0.20, 0.7001, 0.05)
    assert len(alphas) == 11
    inner_radii = []
    for a in alphas:
        m = circular_target_mask(c, float(a), eyelid)
        fitted = fit_circles(m)
        inner_radii.append(fitted.pupil.r)
    assert all(b > a for a, b in zip(inner_radii, inner_radii[1:]))


def test_circular_target_mask_bad_alpha():
    c = make_circles(55, 100)
    with pytest.raises(BadRadius):
        circular_target_mask(c, 0.0, full_frame((64, 64)))
    with pytest.raises(BadRadius):
        circular_target_mask(c, 1.0, full_frame((64, 64)))
