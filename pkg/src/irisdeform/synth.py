"""Synthetic iris imagery.

Generates band-limited iris-like textures and renders them into grayscale
eye images with known circle geometry, giving every test and demo an input
whose ground truth is analytically available.
"""

from __future__ import annotations

import numpy as np

from .deformation import NormalizedIris, rubber_sheet_denormalize
from .geometry import Circle, IrisCircles, annulus, disk


def smooth_polar_texture(
    rows: int,
    cols: int,
    rng: np.random.Generator,
    n_components: int = 24,
    max_angular: int = 24,
    max_radial: int = 6,
) -> np.ndarray:
    """Band-limited random texture on the polar grid, values in [0, 1].

    A sum of random 2-D cosines with integer angular harmonics (so columns
    wrap seamlessly) and low radial harmonics. ``max_angular``/``max_radial``
    bound the frequency content, keeping the texture well below the Nyquist
    limit of the default 64x512 normalization grid even after wrapping onto
    a 256 px frame.
    """
    u = np.linspace(0.0, 1.0, rows)[:, None]
    th = (np.arange(cols) / cols)[None, :]
    tex = np.zeros((rows, cols))
    for _ in range(n_components):
        m = int(rng.integers(0, max_angular + 1))
        n = int(rng.integers(0, max_radial + 1))
        if m == 0 and n == 0:
            continue
        amp = float(rng.uniform(0.3, 1.0)) / (1.0 + 0.15 * (m + n))
        phase = float(rng.uniform(0.0, 2.0 * np.pi))
        tex += amp * np.cos(2.0 * np.pi * (m * th + n * u) + phase)
    lo, hi = tex.min(), tex.max()
    if hi - lo < 1e-12:
        return np.full((rows, cols), 0.5)
    return (tex - lo) / (hi - lo)


def render_iris(
    shape,
    c: IrisCircles,
    texture: np.ndarray,
    pupil_level: int = 24,
    sclera_level: int = 210,
    lo: float = 0.2,
    hi: float = 0.85,
) -> np.ndarray:
    """Paint a polar texture onto the annulus of a synthetic eye image.

    The texture block (values in [0, 1]) is wrapped under the given circles;
    the pupil is filled dark and everything outside the iris light, mimicking
    an NIR iris capture.
    """
    h, w = shape
    block = NormalizedIris(
        texture=lo + (hi - lo) * np.asarray(texture, dtype=np.float64),
        validity=np.ones(texture.shape, dtype=bool),
    )
    img, _ = rubber_sheet_denormalize(block, c, w, h)
    out = np.full(shape, sclera_level, dtype=np.uint8)
    ring = annulus(shape, c)
    out[ring] = img[ring]
    out[disk(shape, c.pupil.cx, c.pupil.cy, c.pupil.r)] = pupil_level
    return out


def synthetic_eye(
    shape=(256, 256),
    pupil_r: float = 40.0,
    iris_r: float = 110.0,
    center=None,
    seed: int = 0,
    texture_rows: int = 64,
    texture_cols: int = 512,
):
    """Convenience generator: returns (image, mask, circles, texture block)."""
    h, w = shape
    if center is None:
        center = (w / 2.0, h / 2.0)
    cx, cy = center
    c = IrisCircles(pupil=Circle(cx, cy, pupil_r), iris=Circle(cx, cy, iris_r))
    rng = np.random.default_rng(seed)
    tex = smooth_polar_texture(texture_rows, texture_cols, rng)
    img = render_iris(shape, c, tex)
    return img, annulus(shape, c), c, tex
