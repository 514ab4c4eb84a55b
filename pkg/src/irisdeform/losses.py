"""Numerical training-objective components.

Pure, deterministic functions: cosine embedding loss, the autoencoder and
discriminator identity losses with their data-derived margins, a triplet
wrapper applicable to any pairwise loss, multi-scale structural similarity,
and the sharpness score/loss pair. No gradients here; a host training stack
owns differentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import DimensionMismatch, TooSmall, ZeroNorm
from . import fileio


# ---------------------------------------------------------------------------
# Embedding losses
# ---------------------------------------------------------------------------

def _as_embedding(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise DimensionMismatch(f"{name} must be a 1-D vector, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ZeroNorm(f"{name} contains non-finite entries")
    return v


def cosine_loss(v1, v2) -> float:
    """Cosine distance scaled to [0, 1]: 0.5 * (1 - cos_similarity)."""
    a = _as_embedding(v1, "v1")
    b = _as_embedding(v2, "v2")
    if a.shape != b.shape:
        raise DimensionMismatch(f"embedding dims differ: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroNorm("cosine loss undefined for zero-norm embeddings")
    # Equal and antipodal inputs have exact losses 0 and 1; the general
    # formula misses them by an ulp (sqrt(x)*sqrt(x) != x), which matters
    # because downstream margins subtract these values from themselves.
    if np.array_equal(a, b):
        return 0.0
    if np.array_equal(a, -b):
        return 1.0
    value = 0.5 * (1.0 - float(np.dot(a, b)) / (na * nb))
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class IdentityQuintuple:
    """Embeddings of output, target (anchor), positive, input and negative."""

    eO: np.ndarray
    eT: np.ndarray
    eP: np.ndarray
    eI: np.ndarray
    eN: np.ndarray

    def __post_init__(self):
        dims = {np.asarray(e).shape for e in (self.eO, self.eT, self.eP, self.eI, self.eN)}
        if len(dims) != 1:
            raise DimensionMismatch(f"quintuple embeddings disagree on shape: {dims}")


def autoencoder_identity_loss(q: IdentityQuintuple) -> float:
    """Identity loss steering a generator's output embedding.

    Pulls the output toward the target and positive embeddings, toward the
    input but only as far as the input-target distance (the input has a
    different pupil size), and away from the negative up to the
    negative-target distance. Both margins are computed from the quintuple
    itself.
    """
    margin_it = cosine_loss(q.eI, q.eT)
    margin_nt = cosine_loss(q.eN, q.eT)
    return (
        cosine_loss(q.eO, q.eT)
        + cosine_loss(q.eO, q.eP)
        + max(cosine_loss(q.eO, q.eI) - margin_it, 0.0)
        + max(margin_nt - cosine_loss(q.eO, q.eN), 0.0)
    )


@dataclass(frozen=True)
class DiscriminatorMargins:
    """Hyperparameters of the discriminator loss; margin_D is typically in [0, 1]."""

    margin_D: float = 0.2

    def __post_init__(self):
        if self.margin_D < 0:
            raise ValueError(f"margin_D must be >= 0, got {self.margin_D}")


def discriminator_identity_loss(eO, eT, eP, eN, m: DiscriminatorMargins) -> float:
    """Triplet margin loss plus push-away-from-generated-output hinges.

    The first term is a classical triplet margin loss over (target, positive,
    negative). The remaining hinges push the output embedding at least
    margin_NTP away from each of target, positive and negative, where
    margin_NTP = max(Lcos(N,T), Lcos(N,P)) estimates the largest loss between
    same-pupil-size impostor pairs.
    """
    term = max(cosine_loss(eT, eP) - cosine_loss(eT, eN) + m.margin_D, 0.0)
    margin_ntp = max(cosine_loss(eN, eT), cosine_loss(eN, eP))
    for other in (eT, eP, eN):
        term += max(margin_ntp - cosine_loss(eO, other), 0.0)
    return term


def triplet_wrap(base_loss, o, t, n) -> float:
    """Triplet form of any pairwise loss: L(O,T) + max(L(T,N) - L(O,N), 0).

    The margin is the target-negative loss itself, so the output is pushed
    from the impostor exactly as far as the target is, instead of by a fixed
    hyperparameter. Applies uniformly to every identity and realism loss;
    externally supplied perceptual losses (LPIPS-style networks, patch
    discriminators) plug in unchanged as long as they are pairwise with
    base_loss(x, x) == 0.
    """
    return base_loss(o, t) + max(base_loss(t, n) - base_loss(o, n), 0.0)


# ---------------------------------------------------------------------------
# MS-SSIM
# ---------------------------------------------------------------------------

_MSSSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
_SSIM_WINDOW_SIZE = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    ax = np.arange(size, dtype=np.float64) - size // 2
    g = np.exp(-(ax**2) / (2.0 * sigma**2))
    w = np.outer(g, g)
    return w / w.sum()


def _as_float_pair(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionMismatch("images must be 2-D grayscale")
    if a.shape != b.shape:
        raise DimensionMismatch(f"image shapes differ: {a.shape} vs {b.shape}")
    data_range = 255.0 if a.dtype == np.uint8 or b.dtype == np.uint8 else 1.0
    return a.astype(np.float64), b.astype(np.float64), data_range


def _ssim_maps(a, b, window, c1, c2):
    mu_a = fftconvolve(a, window, mode="valid")
    mu_b = fftconvolve(b, window, mode="valid")
    var_a = fftconvolve(a * a, window, mode="valid") - mu_a * mu_a
    var_b = fftconvolve(b * b, window, mode="valid") - mu_b * mu_b
    cov = fftconvolve(a * b, window, mode="valid") - mu_a * mu_b
    lum = (2.0 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1)
    cs = (2.0 * cov + c2) / (var_a + var_b + c2)
    return lum, cs


def _downsample2(x: np.ndarray) -> np.ndarray:
    h, w = x.shape
    x = x[: h - h % 2, : w - w % 2]
    return 0.25 * (x[0::2, 0::2] + x[0::2, 1::2] + x[1::2, 0::2] + x[1::2, 1::2])


def ms_ssim(a, b, scales: int = 5, data_range: float | None = None) -> float:
    """Multi-scale structural similarity in [0, 1]; 1 means identical.

    Canonical 5-scale weighting: contrast-structure means at every scale,
    luminance folded in at the coarsest, each image halved by 2x2 average
    pooling between scales. Negative contrast-structure means are clamped to
    zero before the fractional powers. The loss form is ``1 - ms_ssim``.
    """
    if not 1 <= scales <= len(_MSSSIM_WEIGHTS):
        raise ValueError(f"scales must be in 1..{len(_MSSSIM_WEIGHTS)}, got {scales}")
    af, bf, inferred_range = _as_float_pair(a, b)
    if data_range is None:
        data_range = inferred_range
    min_dim = min(af.shape)
    if min_dim < 2 ** (scales - 1) * _SSIM_WINDOW_SIZE:
        raise TooSmall(
            f"need min dimension >= {2 ** (scales - 1) * _SSIM_WINDOW_SIZE} "
            f"for {scales} scales, got {min_dim}"
        )
    window = _gaussian_window(_SSIM_WINDOW_SIZE, _SSIM_SIGMA)
    c1 = (_SSIM_K1 * data_range) ** 2
    c2 = (_SSIM_K2 * data_range) ** 2
    weights = np.asarray(_MSSSIM_WEIGHTS[:scales])
    weights = weights / weights.sum()

    value = 1.0
    for level in range(scales):
        lum, cs = _ssim_maps(af, bf, window, c1, c2)
        if level < scales - 1:
            value *= max(float(cs.mean()), 0.0) ** weights[level]
            af = _downsample2(af)
            bf = _downsample2(bf)
        else:
            value *= max(float((lum * cs).mean()), 0.0) ** weights[level]
    return float(value)


def ms_ssim_loss(a, b, scales: int = 5, data_range: float | None = None) -> float:
    return 1.0 - ms_ssim(a, b, scales, data_range)


# ---------------------------------------------------------------------------
# Sharpness
# ---------------------------------------------------------------------------

#: Score mapping constant, calibrated for response power on the 0..255 scale.
DEFAULT_SHARPNESS_C = 10.0


def _dog_kernel(size: int = 15, sigma_narrow: float = 1.0, sigma_wide: float = 2.0):
    """Difference-of-Gaussians band-pass tuned to iris texture frequencies.

    Stand-in for the standards-body sharpness kernel, which is licensed
    text; each Gaussian is normalized to unit sum so the difference is
    exactly zero-sum.
    """
    ax = np.arange(size, dtype=np.float64) - size // 2
    r2 = ax[:, None] ** 2 + ax[None, :] ** 2
    g1 = np.exp(-r2 / (2.0 * sigma_narrow**2))
    g2 = np.exp(-r2 / (2.0 * sigma_wide**2))
    return g1 / g1.sum() - g2 / g2.sum()


def load_sharpness_kernel(path) -> np.ndarray:
    """Replacement kernel from the binary container (imaginary plane ignored)."""
    kernels, _ = fileio.load_kernels(path)
    if not kernels:
        raise ValueError("kernel container is empty")
    return np.real(kernels[0])


def iso_sharpness(img, kernel: np.ndarray | None = None, c: float = DEFAULT_SHARPNESS_C) -> float:
    """Band-pass sharpness score in [0, 100).

    The mean-removed image is filtered with the band-pass kernel; with mean
    squared response power p the score is 100 * p^2 / (p^2 + c^2). Mean
    removal is a mathematical no-op for the zero-sum kernel but makes a
    constant image score exactly 0. Deterministic.
    """
    img = np.asarray(img)
    if img.ndim != 2:
        raise DimensionMismatch(f"image must be 2-D grayscale, got shape {img.shape}")
    if kernel is None:
        kernel = _dog_kernel()
    if img.shape[0] < kernel.shape[0] or img.shape[1] < kernel.shape[1]:
        raise TooSmall(f"image {img.shape} smaller than the {kernel.shape} kernel")
    imgf = img.astype(np.float64)
    resp = fftconvolve(imgf - imgf.mean(), kernel, mode="valid")
    p = float(np.mean(resp * resp))
    return 100.0 * p * p / (p * p + c * c)


def sharpness_loss(out_img, in_img, kernel: np.ndarray | None = None,
                   c: float = DEFAULT_SHARPNESS_C) -> float:
    """Hinge penalizing outputs less sharp than their inputs."""
    return max(iso_sharpness(in_img, kernel, c) - iso_sharpness(out_img, kernel, c), 0.0)
