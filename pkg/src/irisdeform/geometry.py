"""Circle and mask geometry for iris images.

Masks are 2-D boolean numpy arrays (True = iris texture pixel). A pixel at
integer coordinates (x, y) belongs to a disk of radius r centered at (cx, cy)
when (x-cx)^2 + (y-cy)^2 < r^2; annuli are differences of such disks. All
operations here are pure functions over immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadRadius,
    DegenerateGeometry,
    DimensionMismatch,
    EmptyMask,
    OutOfRange,
)


@dataclass(frozen=True)
class Circle:
    """Circle in pixel coordinates: center (cx, cy), radius r > 0."""

    cx: float
    cy: float
    r: float

    def __post_init__(self):
        if not (math.isfinite(self.cx) and math.isfinite(self.cy)):
            raise DegenerateGeometry(f"non-finite circle center ({self.cx}, {self.cy})")
        if not (math.isfinite(self.r) and self.r > 0):
            raise DegenerateGeometry(f"circle radius must be positive, got {self.r}")

    def point_at(self, theta):
        """Boundary point(s) at angle theta (radians, scalar or array)."""
        return self.cx + self.r * np.cos(theta), self.cy + self.r * np.sin(theta)


@dataclass(frozen=True)
class IrisCircles:
    """Pupil and iris boundary circles of one eye.

    Invariants: pupil.r < iris.r, the pupil center lies strictly inside the
    iris circle, and the pupil-to-iris radius ratio is in (0, 1).
    """

    pupil: Circle
    iris: Circle

    def __post_init__(self):
        if self.pupil.r >= self.iris.r:
            raise DegenerateGeometry(
                f"pupil radius {self.pupil.r} must be smaller than iris radius {self.iris.r}"
            )
        center_dist = math.hypot(self.pupil.cx - self.iris.cx, self.pupil.cy - self.iris.cy)
        if center_dist >= self.iris.r:
            raise DegenerateGeometry("pupil center lies outside the iris circle")


def pupil_iris_ratio(c: IrisCircles) -> float:
    """Pupil-to-iris radius ratio, in (0, 1)."""
    return c.pupil.r / c.iris.r


def ratio_delta(c1: IrisCircles, c2: IrisCircles) -> float:
    """Absolute difference of the two pupil-to-iris ratios (the dilation mismatch)."""
    return abs(pupil_iris_ratio(c1) - pupil_iris_ratio(c2))


@dataclass(frozen=True)
class Binning:
    """Pupil-to-iris ratio binning: bins of `width` covering [lo, hi].

    The first bin is [lo, lo+width]; every later bin is half-open
    (lo+k*width, lo+(k+1)*width]. Ratios outside [lo, hi] are out of range.
    """

    lo: float = 0.2
    hi: float = 0.7
    width: float = 0.1

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"binning lo {self.lo} must be < hi {self.hi}")
        if self.width <= 0:
            raise ValueError(f"binning width must be positive, got {self.width}")
        span = (self.hi - self.lo) / self.width
        if abs(span - round(span)) > 1e-9:
            raise ValueError("binning span (hi - lo) must be an integer multiple of width")

    @property
    def n_bins(self) -> int:
        return round((self.hi - self.lo) / self.width)


def assign_bin(ratio: float, b: Binning = Binning()) -> int:
    """Bin index for a pupil-to-iris ratio, or OutOfRange outside [lo, hi]."""
    if not (b.lo <= ratio <= b.hi):
        raise OutOfRange(f"ratio {ratio} outside binning range [{b.lo}, {b.hi}]")
    if ratio == b.lo:
        return 0
    k = math.ceil((ratio - b.lo) / b.width) - 1
    return min(max(k, 0), b.n_bins - 1)


@dataclass(frozen=True)
class ManifestRow:
    """One dataset entry: image/mask paths, identity, eye, circle radii."""

    image_path: str
    mask_path: str
    identity_id: str
    eye_label: str
    pupil_radius: float
    iris_radius: float

    def __post_init__(self):
        if not self.identity_id:
            raise ValueError("identity_id must be non-empty")
        if not 0 < self.pupil_radius < self.iris_radius:
            raise ValueError(
                f"need 0 < pupil_radius < iris_radius, got {self.pupil_radius}, {self.iris_radius}"
            )

    @property
    def ratio(self) -> float:
        return self.pupil_radius / self.iris_radius


def make_pairs(rows, b: Binning = Binning()):
    """All ordered (input, target) training pairs across different ratio bins.

    Pairs join images of the same identity and eye whose bin indices differ;
    rows with out-of-range ratios are skipped. Emission follows manifest
    order: for each row in order, pair it with every later-scanned eligible
    partner, both directions being produced because the deformation is
    directional.
    """
    bins = []
    for row in rows:
        try:
            bins.append(assign_bin(row.ratio, b))
        except OutOfRange:
            bins.append(None)
    pairs = []
    for i, src in enumerate(rows):
        if bins[i] is None:
            continue
        for j, dst in enumerate(rows):
            if i == j or bins[j] is None:
                continue
            if src.identity_id != dst.identity_id or src.eye_label != dst.eye_label:
                continue
            if bins[i] != bins[j]:
                pairs.append((src, dst))
    return pairs


# ---------------------------------------------------------------------------
# Mask rasterization helpers
# ---------------------------------------------------------------------------

def disk(shape, cx: float, cy: float, r: float) -> np.ndarray:
    """Boolean raster of the open disk (x-cx)^2 + (y-cy)^2 < r^2."""
    h, w = shape
    y, x = np.ogrid[:h, :w]
    return (x - cx) ** 2 + (y - cy) ** 2 < r * r


def annulus(shape, c: IrisCircles) -> np.ndarray:
    """Boolean raster of the iris annulus: iris disk minus pupil disk."""
    return disk(shape, c.iris.cx, c.iris.cy, c.iris.r) & ~disk(
        shape, c.pupil.cx, c.pupil.cy, c.pupil.r
    )


def full_frame(shape) -> np.ndarray:
    """All-true mask, the stand-in eyelid when no segmentation is available."""
    return np.ones(shape, dtype=bool)


def _check_mask(mask: np.ndarray, name: str = "mask") -> np.ndarray:
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {mask.shape}")
    return mask.astype(bool, copy=False)


# ---------------------------------------------------------------------------
# Circle fitting
# ---------------------------------------------------------------------------

def _kasa_fit(pts: np.ndarray) -> Circle:
    """Algebraic least-squares circle through the given (x, y) points."""
    x, y = pts[:, 0], pts[:, 1]
    a = np.column_stack([2.0 * x, 2.0 * y, np.ones_like(x)])
    b = x * x + y * y
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    cx, cy, c = sol
    r2 = c + cx * cx + cy * cy
    if r2 <= 0:
        raise DegenerateGeometry("circle fit collapsed to non-positive radius")
    return Circle(float(cx), float(cy), float(math.sqrt(r2)))


def _residuals(pts: np.ndarray, circle: Circle) -> np.ndarray:
    return np.abs(np.hypot(pts[:, 0] - circle.cx, pts[:, 1] - circle.cy) - circle.r)


def _circle_through(p0, p1, p2) -> Circle | None:
    ax, ay = p0
    bx, by = p1
    cx, cy = p2
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-9:
        return None  # collinear sample
    ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay) + (cx**2 + cy**2) * (ay - by)) / d
    uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx) + (cx**2 + cy**2) * (bx - ax)) / d
    r = math.hypot(ax - ux, ay - uy)
    if r <= 0 or not math.isfinite(r):
        return None
    return Circle(float(ux), float(uy), float(r))


def _robust_circle_fit(pts: np.ndarray, trials: int = 200, tol: float = 1.25) -> Circle:
    """Consensus circle fit robust to heavy contamination.

    Eyelid occlusion can corrupt over a third of the boundary samples with
    points that blend smoothly into the true arc, which defeats plain
    residual trimming. A fixed-seed RANSAC search finds the largest set of
    samples within `tol` px of a circle through three of them; the final
    circle is the algebraic least-squares fit on that consensus set
    (re-validated once against the refit). Deterministic: the sampling uses
    a PCG64 generator with a constant seed.
    """
    rng = np.random.default_rng(0)
    best_inliers = None
    best_count = 0
    n = len(pts)
    for _ in range(trials):
        idx = rng.choice(n, size=3, replace=False)
        candidate = _circle_through(pts[idx[0]], pts[idx[1]], pts[idx[2]])
        if candidate is None:
            continue
        inliers = _residuals(pts, candidate) <= tol
        count = int(inliers.sum())
        if count > best_count:
            best_count = count
            best_inliers = inliers
    if best_inliers is None or best_count < 8:
        raise DegenerateGeometry("no circle consensus among boundary samples")
    circle = _kasa_fit(pts[best_inliers])
    refined = _residuals(pts, circle) <= tol
    if refined.sum() >= 8:
        circle = _kasa_fit(pts[refined])
    return circle


def _radial_boundaries(mask: np.ndarray, cx: float, cy: float, n_rays: int):
    """Innermost and outermost set-pixel hits along rays from (cx, cy)."""
    h, w = mask.shape
    t_max = math.hypot(w, h)
    ts = np.arange(0.5, t_max, 0.5)
    theta = 2.0 * math.pi * np.arange(n_rays) / n_rays
    xs = cx + np.cos(theta)[:, None] * ts[None, :]
    ys = cy + np.sin(theta)[:, None] * ts[None, :]
    xi = np.round(xs).astype(int)
    yi = np.round(ys).astype(int)
    inside = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
    hits = np.zeros(xs.shape, dtype=bool)
    hits[inside] = mask[yi[inside], xi[inside]]

    any_hit = hits.any(axis=1)
    first = hits.argmax(axis=1)
    last = hits.shape[1] - 1 - hits[:, ::-1].argmax(axis=1)

    inner, outer = [], []
    for k in np.flatnonzero(any_hit):
        # Midpoint between the last miss and the first/last hit halves the
        # 0.5 px ray-sampling quantization.
        t_in = ts[first[k]] - 0.25
        t_out = ts[last[k]] + 0.25
        c, s = math.cos(theta[k]), math.sin(theta[k])
        inner.append((cx + t_in * c, cy + t_in * s))
        outer.append((cx + t_out * c, cy + t_out * s))
    return np.asarray(inner, dtype=float), np.asarray(outer, dtype=float)


def fit_circles(mask: np.ndarray, n_rays: int = 720) -> IrisCircles:
    """Fit pupil and iris circles to an annulus-shaped binary mask.

    Boundary pixels are collected by a radial scan from the mask centroid and
    each boundary gets a consensus-checked algebraic least-squares circle,
    which tolerates eyelid occlusion of the annulus.

    Raises EmptyMask for an all-zero mask and DegenerateGeometry when the
    fit does not produce a valid pupil-inside-iris configuration.
    """
    mask = _check_mask(mask)
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        raise EmptyMask("cannot fit circles to an empty mask")
    cx0, cy0 = float(xs.mean()), float(ys.mean())

    inner_pts, outer_pts = _radial_boundaries(mask, cx0, cy0, n_rays)
    if len(inner_pts) < 8 or len(outer_pts) < 8:
        raise DegenerateGeometry("too few boundary samples for a circle fit")

    pupil = _robust_circle_fit(inner_pts)
    iris = _robust_circle_fit(outer_pts)
    if pupil.r >= iris.r:
        raise DegenerateGeometry(
            f"fitted pupil radius {pupil.r:.2f} not smaller than iris radius {iris.r:.2f}"
        )
    return IrisCircles(pupil=pupil, iris=iris)


# ---------------------------------------------------------------------------
# Target mask estimation
# ---------------------------------------------------------------------------

def target_mask_dilate(mask: np.ndarray, c: IrisCircles, new_pupil_r: float) -> np.ndarray:
    """Target mask for a dilated pupil: cut a larger pupil disk from the mask.

    The output is always a subset of the input, so no texture location ever
    needs to be hallucinated.
    """
    mask = _check_mask(mask)
    if not mask.any():
        raise EmptyMask("source mask is empty")
    if new_pupil_r <= c.pupil.r:
        raise BadRadius(
            f"dilation needs new_pupil_r > {c.pupil.r}, got {new_pupil_r}"
        )
    if new_pupil_r >= c.iris.r:
        raise BadRadius(
            f"new pupil radius {new_pupil_r} must stay below the iris radius {c.iris.r}"
        )
    return mask & ~disk(mask.shape, c.pupil.cx, c.pupil.cy, new_pupil_r)


def target_mask_constrict(
    mask: np.ndarray, c: IrisCircles, new_pupil_r: float, eyelid: np.ndarray
) -> np.ndarray:
    """Target mask for a constricted pupil.

    Fills the current pupil disk, cuts the smaller one, then intersects with
    the inside-eyelid mask to drop filled-in pixels that would sit on the
    eyelids.
    """
    mask = _check_mask(mask)
    eyelid = _check_mask(eyelid, "eyelid")
    if mask.shape != eyelid.shape:
        raise DimensionMismatch(
            f"eyelid mask shape {eyelid.shape} does not match mask shape {mask.shape}"
        )
    if not (0 < new_pupil_r < c.pupil.r):
        raise BadRadius(
            f"constriction needs 0 < new_pupil_r < {c.pupil.r}, got {new_pupil_r}"
        )
    filled = mask | disk(mask.shape, c.pupil.cx, c.pupil.cy, c.pupil.r)
    cut = filled & ~disk(mask.shape, c.pupil.cx, c.pupil.cy, new_pupil_r)
    return cut & eyelid


def circular_target_mask(c: IrisCircles, alpha: float, eyelid: np.ndarray) -> np.ndarray:
    """Circular-pupil annulus at pupil-to-iris ratio alpha, inside the eyelids.

    Concentric with the iris circle; used to rectify disease-deformed pupils
    to a canonical circular shape.
    """
    eyelid = _check_mask(eyelid, "eyelid")
    if not 0.0 < alpha < 1.0:
        raise BadRadius(f"alpha must be in (0, 1), got {alpha}")
    ring = disk(eyelid.shape, c.iris.cx, c.iris.cy, c.iris.r) & ~disk(
        eyelid.shape, c.iris.cx, c.iris.cy, alpha * c.iris.r
    )
    return ring & eyelid
