"""Iris texture deformation between pupil configurations.

Three deformation engines share one interface:

* ``Linear`` -- the classic rubber-sheet assumption: texture moves linearly
  along the segment joining per-angle pupil and iris boundary points.
* ``Biomechanical`` -- a thick-walled-shell radial displacement field
  u(r) = a*r + b/r with zero displacement at the iris root and a prescribed
  displacement at the pupil margin, which concentrates texture motion near
  the pupil instead of spreading it linearly.
* ``External`` -- an HTTP hook for a learned deformer: multipart POST of
  (image PNG, source mask PNG, target mask PNG), PNG image reply.

Images are 2-D uint8 arrays, masks 2-D bool arrays, both (height, width).
All operations are pure; ``External`` additionally performs network I/O and
is independently retryable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.ndimage import binary_dilation

from .errors import (
    DegenerateGeometry,
    DimensionMismatch,
    ExternalUnavailable,
    OutOfAnnulus,
)
from .geometry import IrisCircles, _check_mask, fit_circles


@dataclass(frozen=True)
class NormalizedIris:
    """Fixed-size polar (rubber-sheet) iris block.

    ``texture`` holds intensities in [0, 1]; ``validity`` is False wherever
    the polar sample fell outside the source iris mask (or the frame).
    Row 0 samples the pupil boundary, the last row the iris boundary; columns
    cover [0, 2*pi) and wrap.
    """

    texture: np.ndarray
    validity: np.ndarray

    def __post_init__(self):
        if self.texture.shape != self.validity.shape:
            raise DimensionMismatch(
                f"texture shape {self.texture.shape} != validity shape {self.validity.shape}"
            )

    @property
    def rows(self) -> int:
        return self.texture.shape[0]

    @property
    def cols(self) -> int:
        return self.texture.shape[1]


@dataclass(frozen=True)
class BiomechParams:
    """Biomechanical model knobs.

    ``nu`` is the material ratio carried for future refinement of the shell
    solution; the two-boundary-condition displacement field used here is
    fully determined without it. ``radial_samples`` sets the tabulation
    density when the radius mapping is applied to whole images.
    """

    nu: float = 0.49
    radial_samples: int = 512

    def __post_init__(self):
        if not 0.0 <= self.nu <= 0.5:
            raise ValueError(f"nu must be in [0, 0.5], got {self.nu}")
        if self.radial_samples < 2:
            raise ValueError(f"radial_samples must be >= 2, got {self.radial_samples}")


@dataclass(frozen=True)
class Linear:
    """Rubber-sheet (linear radial blend) deformation."""


@dataclass(frozen=True)
class Biomechanical:
    """Thick-walled-shell radial displacement deformation."""

    params: BiomechParams = BiomechParams()


@dataclass(frozen=True)
class External:
    """Learned deformer behind an HTTP endpoint."""

    endpoint: str
    timeout: float = 10.0

    def __post_init__(self):
        if not self.endpoint:
            raise ValueError("external deformer endpoint must be non-empty")


DeformationModel = Union[Linear, Biomechanical, External]


# ---------------------------------------------------------------------------
# Sampling helpers
# ---------------------------------------------------------------------------

def _as_float_image(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2:
        raise DimensionMismatch(f"image must be 2-D grayscale, got shape {img.shape}")
    if img.dtype == np.uint8:
        return img.astype(np.float64) / 255.0
    return img.astype(np.float64)


def _lerp2(v00, v01, v10, v11, fx, fy):
    """Separable bilinear blend; exactly reproduces constant fields."""
    top = v00 + fx * (v01 - v00)
    bot = v10 + fx * (v11 - v10)
    return top + fy * (bot - top)


def _bilinear(img: np.ndarray, x: np.ndarray, y: np.ndarray):
    """Bilinear sample with an in-bounds flag; coordinates are clipped."""
    h, w = img.shape
    inb = (x >= 0) & (x <= w - 1) & (y >= 0) & (y <= h - 1)
    xc = np.clip(x, 0.0, w - 1.0)
    yc = np.clip(y, 0.0, h - 1.0)
    x0 = np.floor(xc).astype(np.intp)
    y0 = np.floor(yc).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xc - x0
    fy = yc - y0
    v = _lerp2(img[y0, x0], img[y0, x1], img[y1, x0], img[y1, x1], fx, fy)
    return v, inb


def _bilinear_polar(block: np.ndarray, row: np.ndarray, col: np.ndarray) -> np.ndarray:
    """Bilinear sample of a polar block: columns wrap, rows clamp."""
    rows, cols = block.shape
    rc = np.clip(row, 0.0, rows - 1.0)
    r0 = np.floor(rc).astype(np.intp)
    r1 = np.minimum(r0 + 1, rows - 1)
    fr = rc - r0
    cf = np.mod(col, cols)
    c0 = np.floor(cf).astype(np.intp)
    c1 = (c0 + 1) % cols
    fc = cf - c0
    return _lerp2(block[r0, c0], block[r0, c1], block[r1, c0], block[r1, c1], fc, fr)


# ---------------------------------------------------------------------------
# Rubber sheet
# ---------------------------------------------------------------------------

def rubber_sheet_normalize(
    img: np.ndarray,
    mask: np.ndarray,
    c: IrisCircles,
    rows: int = 64,
    cols: int = 512,
) -> NormalizedIris:
    """Unwrap the iris annulus into a fixed rectangular polar block.

    The sample for (row u in [0,1], column theta) is the linear blend
    (1-u)*P(theta) + u*Q(theta) between the pupil and iris boundary points at
    that angle, bilinearly interpolated from the image. Validity is cleared
    where the interpolated mask value drops below 0.5 or the sample leaves
    the frame.
    """
    if rows < 2 or cols < 2:
        raise DegenerateGeometry(f"normalized block needs rows, cols >= 2, got {rows}x{cols}")
    mask = _check_mask(mask)
    imgf = _as_float_image(img)
    if imgf.shape != mask.shape:
        raise DimensionMismatch(f"image shape {imgf.shape} != mask shape {mask.shape}")

    u = np.linspace(0.0, 1.0, rows)[:, None]
    theta = 2.0 * math.pi * np.arange(cols) / cols
    px, py = c.pupil.point_at(theta)
    ix, iy = c.iris.point_at(theta)
    x = (1.0 - u) * px[None, :] + u * ix[None, :]
    y = (1.0 - u) * py[None, :] + u * iy[None, :]

    tex, inb = _bilinear(imgf, x, y)
    mval, _ = _bilinear(mask.astype(np.float64), x, y)
    validity = inb & (mval >= 0.5)
    tex = np.clip(tex, 0.0, 1.0)
    tex[~inb] = 0.0
    return NormalizedIris(texture=tex, validity=validity)


def _polar_coordinates(target: IrisCircles, out_w: int, out_h: int):
    """Per-pixel (u, theta, annulus flag) under the target circles.

    Inverts the per-angle boundary blend: a pixel X lies on the segment
    between P(theta) and Q(theta) at parameter u exactly when
    |X - C(u)| = R(u) with C(u) the blended center and R(u) the blended
    radius, a quadratic in u. Requires the pupil disk strictly inside the
    iris disk, otherwise segments cross and the inversion is ill-posed.
    """
    pr, ir = target.pupil.r, target.iris.r
    ex = target.pupil.cx - target.iris.cx
    ey = target.pupil.cy - target.iris.cy
    dr = ir - pr
    a = ex * ex + ey * ey - dr * dr
    if a >= 0:
        raise DegenerateGeometry(
            "pupil disk must lie strictly inside the iris disk for polar inversion"
        )
    yy, xx = np.mgrid[0:out_h, 0:out_w].astype(np.float64)
    dx = xx - target.pupil.cx
    dy = yy - target.pupil.cy
    b = 2.0 * (dx * ex + dy * ey - pr * dr)
    cc = dx * dx + dy * dy - pr * pr
    disc = b * b - 4.0 * a * cc
    ok = disc >= 0
    u = np.zeros_like(disc)
    u[ok] = (-b[ok] - np.sqrt(disc[ok])) / (2.0 * a)
    annulus_px = ok & (u >= 0.0) & (u < 1.0)

    ccx = target.pupil.cx + u * (target.iris.cx - target.pupil.cx)
    ccy = target.pupil.cy + u * (target.iris.cy - target.pupil.cy)
    theta = np.mod(np.arctan2(yy - ccy, xx - ccx), 2.0 * math.pi)
    return u, theta, annulus_px


def rubber_sheet_denormalize(
    n: NormalizedIris,
    target: IrisCircles,
    out_w: int,
    out_h: int,
    radial_map: Callable[[np.ndarray], np.ndarray] | None = None,
):
    """Wrap a normalized block back onto an annulus under target circles.

    Every pixel inside the target annulus is mapped to polar coordinates and
    bilinearly sampled from the block (columns wrap). ``radial_map``
    translates the target radial parameter u in [0,1] to the block's radial
    parameter; identity reproduces the linear rubber-sheet model. The output
    mask is the target annulus intersected with the (3x3-dilated) block
    validity; pixels outside the annulus are 0.

    Returns (uint8 image, bool mask).
    """
    if target.iris.cx - target.iris.r < -0.5 or target.iris.cx + target.iris.r > out_w - 0.5:
        raise DegenerateGeometry("target iris circle does not fit the output width")
    if target.iris.cy - target.iris.r < -0.5 or target.iris.cy + target.iris.r > out_h - 0.5:
        raise DegenerateGeometry("target iris circle does not fit the output height")

    u, theta, annulus_px = _polar_coordinates(target, out_w, out_h)
    u_src = radial_map(u) if radial_map is not None else u
    row = np.clip(u_src, 0.0, 1.0) * (n.rows - 1)
    col = theta / (2.0 * math.pi) * n.cols

    out = np.zeros((out_h, out_w), dtype=np.float64)
    vals = _bilinear_polar(n.texture, row[annulus_px], col[annulus_px])
    out[annulus_px] = vals

    vdil = binary_dilation(n.validity, structure=np.ones((3, 3), dtype=bool))
    vsamp = _bilinear_polar(vdil.astype(np.float64), row[annulus_px], col[annulus_px])
    out_mask = np.zeros((out_h, out_w), dtype=bool)
    out_mask[annulus_px] = vsamp >= 0.5

    img8 = np.clip(np.round(out * 255.0), 0, 255).astype(np.uint8)
    return img8, out_mask


# ---------------------------------------------------------------------------
# Biomechanical radial mapping
# ---------------------------------------------------------------------------

def _shell_coeffs(q: float, outer: float, delta: float):
    """Coefficients of u(r) = a*r + b/r with u(outer) = 0, u(q) = delta."""
    a = delta * q / (q * q - outer * outer)
    return a, -a * outer * outer


def biomech_source_radius(
    r_target,
    c_src: IrisCircles,
    c_tgt: IrisCircles,
    p: BiomechParams = BiomechParams(),
):
    """Source-configuration radius of the material point now at ``r_target``.

    The iris is treated as a thin annular shell whose radial displacement
    u(r) = a*r + b/r vanishes at the iris root and equals the pupil-margin
    shift at the pupil boundary. Source radii are first scaled so the iris
    roots coincide; the displacement problem is then posed on whichever
    configuration has the larger pupil (the shrink direction, where
    r + u(r) is unconditionally strictly increasing) and the other direction
    uses the inverse of that map, found by bisection to 1e-9 px.

    ``r_target`` may be a scalar or an array within the target annulus
    [c_tgt.pupil.r, c_tgt.iris.r]; values outside raise OutOfAnnulus. The
    mapping is strictly increasing and sends the target pupil margin to the
    source pupil margin and iris root to iris root.
    """
    r_t = np.asarray(r_target, dtype=np.float64)
    scalar = r_t.ndim == 0
    r_t = np.atleast_1d(r_t)

    p1, big_r = c_tgt.pupil.r, c_tgt.iris.r
    tol = 1e-7 * big_r
    if np.any(r_t < p1 - tol) or np.any(r_t > big_r + tol):
        raise OutOfAnnulus(
            f"target radius outside annulus [{p1}, {big_r}]"
        )
    r_t = np.clip(r_t, p1, big_r)

    scale = big_r / c_src.iris.r
    q0 = c_src.pupil.r * scale  # source pupil radius in the iris-matched frame

    if abs(q0 - p1) <= 1e-12 * big_r:
        r_s = r_t / scale
    elif q0 < p1:
        # Dilation: shrink direction runs target -> scaled source; evaluate
        # the displacement directly on the target annulus.
        a, b = _shell_coeffs(p1, big_r, q0 - p1)
        r_s = (r_t + a * r_t + b / r_t) / scale
    else:
        # Constriction: the monotone map runs scaled source -> target;
        # invert it by bisection.
        a, b = _shell_coeffs(q0, big_r, p1 - q0)
        lo = np.full_like(r_t, q0)
        hi = np.full_like(r_t, big_r)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            forward = mid + a * mid + b / mid
            high = forward > r_t
            hi = np.where(high, mid, hi)
            lo = np.where(high, lo, mid)
            if float(np.max(hi - lo)) < 1e-9:
                break
        mid = 0.5 * (lo + hi)
        # Snap the boundaries so both boundary conditions hold exactly.
        mid = np.where(r_t == p1, q0, mid)
        mid = np.where(r_t == big_r, big_r, mid)
        r_s = mid / scale

    return float(r_s[0]) if scalar else r_s


def _biomech_radial_map(
    c_src: IrisCircles, c_tgt: IrisCircles, params: BiomechParams
) -> Callable[[np.ndarray], np.ndarray]:
    """Target-u to source-u mapping, tabulated at ``radial_samples`` knots."""
    r_t = np.linspace(c_tgt.pupil.r, c_tgt.iris.r, params.radial_samples)
    r_s = biomech_source_radius(r_t, c_src, c_tgt, params)
    u_t = (r_t - c_tgt.pupil.r) / (c_tgt.iris.r - c_tgt.pupil.r)
    u_s = (r_s - c_src.pupil.r) / (c_src.iris.r - c_src.pupil.r)

    def mapper(u: np.ndarray) -> np.ndarray:
        return np.interp(u, u_t, u_s)

    return mapper


# ---------------------------------------------------------------------------
# Full-image deformation
# ---------------------------------------------------------------------------

def _auto_polar_dims(c: IrisCircles, rows: int | None, cols: int | None):
    """Polar grid dense enough that resampling never drops below 1 sample/px."""
    if rows is None:
        rows = max(64, int(round(c.iris.r - c.pupil.r)) + 1)
    if cols is None:
        cols = max(512, int(round(2.0 * math.pi * c.iris.r)))
    return rows, cols


def _external_deform(img, mask, target_mask, model: External):
    import requests

    from .fileio import decode_gray_png, decode_mask_png, encode_gray_png, encode_mask_png

    files = {
        "image": ("image.png", encode_gray_png(img), "image/png"),
        "mask": ("mask.png", encode_mask_png(mask), "image/png"),
        "target_mask": ("target_mask.png", encode_mask_png(target_mask), "image/png"),
    }
    try:
        reply = requests.post(model.endpoint, files=files, timeout=model.timeout)
    except requests.RequestException as exc:
        raise ExternalUnavailable(f"external deformer unreachable: {exc}") from exc
    if reply.status_code != 200:
        raise ExternalUnavailable(
            f"external deformer returned HTTP {reply.status_code}"
        )
    try:
        out = decode_gray_png(reply.content)
    except Exception as exc:
        raise ExternalUnavailable(f"external deformer reply is not a PNG image: {exc}") from exc
    if out.shape != target_mask.shape:
        raise ExternalUnavailable(
            f"external deformer reply shape {out.shape} != target shape {target_mask.shape}"
        )
    return out


def deform(
    img: np.ndarray,
    mask: np.ndarray,
    target_mask: np.ndarray,
    model: DeformationModel = Linear(),
    rows: int | None = None,
    cols: int | None = None,
):
    """Deform the iris texture of ``img`` to match ``target_mask``.

    Circles are fitted to both masks; the texture is unwrapped under the
    source circles and wrapped back under the target circles, with the
    radial resampling dictated by the model (see module docstring). The
    output image is zero outside the returned mask, which equals
    target_mask intersected with the region the model could compute.

    Returns (uint8 image, bool mask).
    """
    mask = _check_mask(mask)
    target_mask = _check_mask(target_mask, "target_mask")
    imgf = np.asarray(img)
    if imgf.shape != mask.shape:
        raise DimensionMismatch(f"image shape {imgf.shape} != mask shape {mask.shape}")

    if isinstance(model, External):
        out = _external_deform(img, mask, target_mask, model)
        out = out.copy()
        out[~target_mask] = 0
        return out, target_mask.copy()

    c_src = fit_circles(mask)
    c_tgt = fit_circles(target_mask)
    out_h, out_w = target_mask.shape

    n_rows, n_cols = _auto_polar_dims(c_src, rows, cols)
    block = rubber_sheet_normalize(img, mask, c_src, n_rows, n_cols)

    if isinstance(model, Biomechanical):
        radial_map = _biomech_radial_map(c_src, c_tgt, model.params)
    elif isinstance(model, Linear):
        radial_map = None
    else:
        raise TypeError(f"unknown deformation model {model!r}")

    out, computable = rubber_sheet_denormalize(block, c_tgt, out_w, out_h, radial_map)
    out_mask = computable & target_mask
    out = out.copy()
    out[~out_mask] = 0
    return out, out_mask
