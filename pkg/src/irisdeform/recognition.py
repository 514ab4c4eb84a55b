"""Filter-bank iris encoding and matching.

A filter bank of complex 2-D kernels is convolved with the normalized iris
block (columns wrap around the angle axis, rows clamp radially). The iris
code takes the sign of the real and imaginary responses; matching is the
fractional Hamming distance over jointly valid bits, minimized over circular
column shifts. The bank also powers a response-space L1 distance between two
images, the filter-based identity measure used during training.

Banks are loadable from the binary kernel container (see ``fileio``), so
learned or standards-specific filters can replace the Gabor default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import minimum_filter
from scipy.signal import fftconvolve

from . import fileio
from .deformation import NormalizedIris, rubber_sheet_normalize
from .errors import DimensionMismatch, KernelTooLarge, NoValidOverlap
from .geometry import IrisCircles

#: Responses below this magnitude quantize to bit 0 (sign-of-zero convention).
SIGN_EPS = 1e-9

#: Default circular shift search: +/-16 columns (~11 degrees at 512 columns).
DEFAULT_MAX_SHIFT = 16


@dataclass(frozen=True)
class FilterBank:
    """Complex 2-D kernels with per-kernel metadata.

    Kernels must have odd spatial dimensions and be DC-free (|sum| < 1e-6),
    so a constant image produces ~zero response everywhere.
    """

    kernels: tuple
    metadata: tuple

    def __post_init__(self):
        if len(self.kernels) != len(self.metadata):
            raise ValueError("one metadata dict per kernel required")
        for i, k in enumerate(self.kernels):
            if k.ndim != 2 or k.shape[0] % 2 == 0 or k.shape[1] % 2 == 0:
                raise ValueError(f"kernel {i} must be 2-D with odd dimensions, got {k.shape}")
            if abs(complex(k.sum())) >= 1e-6:
                raise ValueError(f"kernel {i} is not DC-free (|sum|={abs(k.sum()):.2e})")

    def __len__(self) -> int:
        return len(self.kernels)

    def save(self, path) -> None:
        fileio.save_kernels(path, list(self.kernels), list(self.metadata))

    @classmethod
    def load(cls, path) -> "FilterBank":
        kernels, metadata = fileio.load_kernels(path)
        return cls(kernels=tuple(kernels), metadata=tuple(metadata))


@dataclass(frozen=True)
class IrisCode:
    """Binarized phase responses: bits and valid flags, shape (K, rows, cols, 2).

    The last axis separates real/imaginary sign planes. A valid bit requires
    the normalized-iris validity to hold everywhere under the kernel
    footprint.
    """

    bits: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        if self.bits.shape != self.valid.shape:
            raise DimensionMismatch(
                f"bits shape {self.bits.shape} != valid shape {self.valid.shape}"
            )


def save_code(path, code: IrisCode) -> None:
    """Write an iris code: one JSON header line, then packed bit planes."""
    import json

    header = json.dumps({"shape": list(code.bits.shape)}, sort_keys=True)
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8") + b"\n")
        fh.write(np.packbits(code.bits.reshape(-1)).tobytes())
        fh.write(np.packbits(code.valid.reshape(-1)).tobytes())


def load_code(path) -> IrisCode:
    import json

    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        shape = tuple(header["shape"])
        n = int(np.prod(shape))
        packed = (n + 7) // 8
        bits = np.unpackbits(np.frombuffer(fh.read(packed), dtype=np.uint8))[:n]
        valid = np.unpackbits(np.frombuffer(fh.read(packed), dtype=np.uint8))[:n]
    return IrisCode(
        bits=bits.astype(bool).reshape(shape), valid=valid.astype(bool).reshape(shape)
    )


def _gabor_kernel(wavelength: float, orientation: float) -> np.ndarray:
    """Zero-mean, unit-energy complex Gabor kernel.

    sigma = wavelength/2 truncated at 1.5 sigma keeps the largest default
    kernel (49 px at wavelength 32) inside a 64-row block while holding the
    peak frequency response within 1% of 1/wavelength.
    """
    sigma = 0.5 * wavelength
    half = int(math.ceil(1.5 * sigma))
    y, x = np.mgrid[-half : half + 1, -half : half + 1].astype(np.float64)
    xr = x * math.cos(orientation) + y * math.sin(orientation)
    yr = -x * math.sin(orientation) + y * math.cos(orientation)
    env = np.exp(-(xr**2 + yr**2) / (2.0 * sigma**2))
    k = env * np.exp(1j * 2.0 * math.pi * xr / wavelength)
    k -= k.mean()
    return k / np.sqrt((np.abs(k) ** 2).sum())


def default_gabor_bank() -> FilterBank:
    """The stock bank: wavelengths 8/16/32 px, two orientations each.

    Log-spaced wavelengths span the texture scales that matter at the
    default 64x512 normalization; orientations 0 and pi/2 probe angular and
    radial structure. Deterministic.
    """
    kernels, metadata = [], []
    for wavelength in np.geomspace(8.0, 32.0, 3):
        for orientation in (0.0, math.pi / 2.0):
            k = _gabor_kernel(float(wavelength), orientation)
            kernels.append(k)
            metadata.append(
                {
                    "wavelength": float(wavelength),
                    "orientation": float(orientation),
                    "size": int(k.shape[0]),
                }
            )
    return FilterBank(kernels=tuple(kernels), metadata=tuple(metadata))


# ---------------------------------------------------------------------------
# Responses and encoding
# ---------------------------------------------------------------------------

def _pad_polar(arr: np.ndarray, half_r: int, half_c: int) -> np.ndarray:
    """Clamp radially, wrap angularly: the block is periodic in angle only."""
    arr = np.pad(arr, ((half_r, half_r), (0, 0)), mode="edge")
    return np.pad(arr, ((0, 0), (half_c, half_c)), mode="wrap")


def _kernel_response(n: NormalizedIris, kernel: np.ndarray):
    """Complex response map plus the footprint-eroded validity plane."""
    kh, kw = kernel.shape
    if kh > n.rows:
        raise KernelTooLarge(
            f"kernel of {kh} rows exceeds the {n.rows}-row radial extent"
        )
    if kw > n.cols:
        raise KernelTooLarge(f"kernel of {kw} cols exceeds the {n.cols}-col block")
    half_r, half_c = kh // 2, kw // 2
    padded = _pad_polar(n.texture, half_r, half_c)
    resp = fftconvolve(padded, kernel, mode="valid")

    vpad = _pad_polar(n.validity.astype(np.uint8), half_r, half_c)
    eroded = minimum_filter(vpad, size=(kh, kw))
    valid = eroded[half_r : half_r + n.rows, half_c : half_c + n.cols].astype(bool)
    return resp, valid


def encode(n: NormalizedIris, bank: FilterBank | None = None) -> IrisCode:
    """Quantize filter responses into an iris code.

    Bits are the signs of the real and imaginary response parts (magnitudes
    below SIGN_EPS give bit 0); a bit is valid only if every sample under the
    kernel footprint was valid. Deterministic.
    """
    bank = bank or default_gabor_bank()
    bits, valid = [], []
    for kernel in bank.kernels:
        resp, v = _kernel_response(n, kernel)
        bits.append(np.stack([resp.real > SIGN_EPS, resp.imag > SIGN_EPS], axis=-1))
        valid.append(np.stack([v, v], axis=-1))
    return IrisCode(bits=np.stack(bits), valid=np.stack(valid))


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------

def match_codes(a: IrisCode, b: IrisCode, max_shift: int = DEFAULT_MAX_SHIFT):
    """Best fractional Hamming distance and the column shift achieving it.

    Shifts are scanned in order of increasing magnitude so ties resolve to
    the smallest rotation; only jointly valid bits are compared, and a shift
    with no overlap is skipped.
    """
    if a.bits.shape != b.bits.shape:
        raise DimensionMismatch(
            f"code shapes differ: {a.bits.shape} vs {b.bits.shape}"
        )
    if max_shift < 0:
        raise ValueError(f"max_shift must be >= 0, got {max_shift}")
    best = None
    best_shift = 0
    for shift in sorted(range(-max_shift, max_shift + 1), key=lambda s: (abs(s), s)):
        b_bits = np.roll(b.bits, shift, axis=2)
        b_valid = np.roll(b.valid, shift, axis=2)
        joint = a.valid & b_valid
        total = int(joint.sum())
        if total == 0:
            continue
        hd = float(((a.bits ^ b_bits) & joint).sum()) / total
        if best is None or hd < best:
            best, best_shift = hd, shift
    if best is None:
        raise NoValidOverlap("no jointly valid bits at any shift")
    return best, best_shift


def hamming_distance(a: IrisCode, b: IrisCode, max_shift: int = DEFAULT_MAX_SHIFT) -> float:
    """Shift-compensated fractional Hamming distance in [0, 1].

    0 means identical codes; the genuine/impostor decision treats lower as
    more similar (similarity = 1 - distance where a similarity is needed).
    """
    return match_codes(a, b, max_shift)[0]


def filter_response_distance(
    img1,
    mask1,
    c1: IrisCircles,
    img2,
    mask2,
    c2: IrisCircles,
    bank: FilterBank | None = None,
    rows: int = 64,
    cols: int = 512,
) -> float:
    """L1 distance between filter responses of two normalized irises.

    Both images are rubber-sheet normalized, convolved with every kernel in
    the bank, and the absolute response differences (real plus imaginary)
    are averaged over the jointly valid positions of each kernel and summed
    over kernels. Symmetric; zero for identical images under identical
    geometry. Kernels without any joint support are skipped; if none has
    support, NoValidOverlap is raised.
    """
    bank = bank or default_gabor_bank()
    n1 = rubber_sheet_normalize(img1, mask1, c1, rows, cols)
    n2 = rubber_sheet_normalize(img2, mask2, c2, rows, cols)
    total = 0.0
    any_support = False
    for kernel in bank.kernels:
        r1, v1 = _kernel_response(n1, kernel)
        r2, v2 = _kernel_response(n2, kernel)
        joint = v1 & v2
        if not joint.any():
            continue
        any_support = True
        diff = np.abs(r1.real - r2.real) + np.abs(r1.imag - r2.imag)
        total += float(diff[joint].mean())
    if not any_support:
        raise NoValidOverlap("no kernel has jointly valid support")
    return total
