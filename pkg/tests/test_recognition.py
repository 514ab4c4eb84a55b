import math

import numpy as np
import pytest

from irisdeform.deformation import NormalizedIris, rubber_sheet_normalize
from irisdeform.errors import DimensionMismatch, KernelTooLarge, NoValidOverlap
from irisdeform.geometry import annulus
from irisdeform.recognition import (
    FilterBank,
    default_gabor_bank,
    encode,
    filter_response_distance,
    hamming_distance,
    match_codes,
)
from irisdeform.synth import smooth_polar_texture, synthetic_eye

from conftest import make_circles


def _block(texture, validity=None):
    if validity is None:
        validity = np.ones(texture.shape, dtype=bool)
    return NormalizedIris(texture=texture, validity=validity)


# ---------------------------------------------------------------------------
# Default bank
# ---------------------------------------------------------------------------

def test_default_bank_has_six_dc_free_kernels():
    bank = default_gabor_bank()
    assert len(bank) == 6
    for k in bank.kernels:
        assert abs(complex(k.sum())) < 1e-6
        assert k.shape[0] % 2 == 1 and k.shape[1] % 2 == 1


def test_default_bank_peak_frequency():
    bank = default_gabor_bank()
    for k, meta in zip(bank.kernels, bank.metadata):
        wavelength, orientation = meta["wavelength"], meta["orientation"]
        half = k.shape[0] // 2
        y, x = np.mgrid[-half : half + 1, -half : half + 1].astype(float)
        xr = x * math.cos(orientation) + y * math.sin(orientation)
        freqs = np.linspace(0.3 / wavelength, 3.0 / wavelength, 1501)
        resp = [abs((k * np.exp(-1j * 2 * math.pi * f * xr)).sum()) for f in freqs]
        f_peak = freqs[int(np.argmax(resp))]
        assert abs(f_peak - 1.0 / wavelength) <= 0.05 / wavelength


def test_bank_round_trips_through_kernel_file(tmp_path):
    bank = default_gabor_bank()
    path = tmp_path / "bank.kern"
    bank.save(path)
    loaded = FilterBank.load(path)
    assert len(loaded) == 6
    for a, b, ma, mb in zip(bank.kernels, loaded.kernels, bank.metadata, loaded.metadata):
        assert np.allclose(a, b, atol=1e-6)
        assert ma["wavelength"] == mb["wavelength"]


def test_bank_rejects_dc_or_even_kernels():
    with pytest.raises(ValueError):
        FilterBank(kernels=(np.ones((5, 5), dtype=complex),), metadata=({},))
    with pytest.raises(ValueError):
        FilterBank(kernels=(np.zeros((4, 5), dtype=complex),), metadata=({},))


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

def test_encode_constant_texture_is_deterministic_all_zero_bits():
    block = _block(np.full((64, 512), 0.5))
    c1 = encode(block)
    c2 = encode(block)
    assert (c1.bits == c2.bits).all() and (c1.valid == c2.valid).all()
    assert not c1.bits.any()  # responses ~0 quantize to bit 0
    assert c1.valid.all()     # validity untouched by degenerate texture


def test_encode_shift_equivariance():
    rng = np.random.default_rng(21)
    tex = smooth_polar_texture(64, 512, rng)
    shifted = np.roll(tex, 37, axis=1)
    code = encode(_block(tex))
    code_shifted = encode(_block(shifted))
    assert (np.roll(code.bits, 37, axis=2) == code_shifted.bits).all()
    assert (np.roll(code.valid, 37, axis=2) == code_shifted.valid).all()


def test_encode_kernel_too_large():
    block = _block(np.full((16, 512), 0.5))  # smaller than the 49-row kernel
    with pytest.raises(KernelTooLarge):
        encode(block)


def test_encode_erodes_validity_under_footprint():
    validity = np.ones((64, 512), dtype=bool)
    validity[:, 100] = False
    code = encode(_block(np.full((64, 512), 0.5), validity))
    # The largest kernel (49 px) invalidates half a footprint on each side.
    assert not code.valid[:, :, 100, :].any()
    for k, meta in zip(range(6), default_gabor_bank().metadata):
        half = meta["size"] // 2
        assert not code.valid[k, :, 100 - half : 100 + half + 1, :].any()
        assert code.valid[k, :, 100 + half + 1, :].all()


# ---------------------------------------------------------------------------
# Hamming distance
# ---------------------------------------------------------------------------

def test_hamming_identical_codes_zero():
    rng = np.random.default_rng(3)
    code = encode(_block(smooth_polar_texture(64, 512, rng)))
    assert hamming_distance(code, code) == 0.0


def test_hamming_complement_is_one_at_shift_zero():
    rng = np.random.default_rng(4)
    from irisdeform.recognition import IrisCode

    bits = rng.random((2, 8, 64, 2)) > 0.5
    valid = np.ones_like(bits)
    a = IrisCode(bits=bits, valid=valid)
    b = IrisCode(bits=~bits, valid=valid)
    hd0, _ = match_codes(a, b, max_shift=0)
    assert hd0 == 1.0
    assert hamming_distance(a, b, max_shift=8) <= 1.0  # reported value is min over shifts


def test_hamming_random_codes_near_half():
    rng = np.random.default_rng(5)
    from irisdeform.recognition import IrisCode

    bits_a = rng.random((1, 10, 500, 2)) > 0.5  # 10,000 bits
    bits_b = rng.random((1, 10, 500, 2)) > 0.5
    valid = np.ones_like(bits_a)
    hd, _ = match_codes(IrisCode(bits_a, valid), IrisCode(bits_b, valid), max_shift=0)
    assert 0.47 <= hd <= 0.53


def test_hamming_rotation_compensation():
    rng = np.random.default_rng(6)
    tex = smooth_polar_texture(64, 512, rng)
    code = encode(_block(tex))
    code_rot = encode(_block(np.roll(tex, 9, axis=1)))
    hd, shift = match_codes(code, code_rot, max_shift=16)
    assert hd == 0.0
    assert shift == -9 or shift == 9  # rolled the second argument


def test_hamming_masked_bits_never_influence_score():
    rng = np.random.default_rng(7)
    from irisdeform.recognition import IrisCode

    bits = rng.random((2, 8, 64, 2)) > 0.5
    valid = rng.random((2, 8, 64, 2)) > 0.3
    a = IrisCode(bits, valid)
    flipped = bits.copy()
    flipped[~valid] = ~flipped[~valid]
    b_same = IrisCode(bits.copy(), valid.copy())
    b_flipped = IrisCode(flipped, valid.copy())
    assert hamming_distance(a, b_same, 4) == hamming_distance(a, b_flipped, 4)


def test_hamming_no_valid_overlap():
    from irisdeform.recognition import IrisCode

    bits = np.zeros((1, 4, 16, 2), dtype=bool)
    va = np.zeros_like(bits)
    va[..., :8, :] = True
    vb = np.zeros_like(bits)
    with pytest.raises(NoValidOverlap):
        match_codes(IrisCode(bits, va), IrisCode(bits, vb), max_shift=2)


def test_hamming_shape_mismatch():
    from irisdeform.recognition import IrisCode

    a = IrisCode(np.zeros((1, 4, 16, 2), dtype=bool), np.ones((1, 4, 16, 2), dtype=bool))
    b = IrisCode(np.zeros((1, 4, 32, 2), dtype=bool), np.ones((1, 4, 32, 2), dtype=bool))
    with pytest.raises(DimensionMismatch):
        hamming_distance(a, b)


def test_hamming_symmetric_and_bounded():
    rng = np.random.default_rng(8)
    codes = [encode(_block(smooth_polar_texture(64, 512, rng))) for _ in range(3)]
    for a in codes:
        for b in codes:
            d_ab = hamming_distance(a, b)
            d_ba = hamming_distance(b, a)
            assert 0.0 <= d_ab <= 1.0
            assert d_ab == pytest.approx(d_ba, abs=1e-12)


# ---------------------------------------------------------------------------
# Filter response distance
# ---------------------------------------------------------------------------

def test_filter_distance_identity_and_symmetry():
    img, mask, c, _ = synthetic_eye(seed=9)
    assert filter_response_distance(img, mask, c, img, mask, c) == 0.0
    img2, mask2, c2, _ = synthetic_eye(seed=10)
    d_ab = filter_response_distance(img, mask, c, img2, mask2, c2)
    d_ba = filter_response_distance(img2, mask2, c2, img, mask, c)
    assert d_ab == d_ba
    assert d_ab > 0


def test_filter_distance_orders_noise_vs_blur():
    from scipy.ndimage import gaussian_filter

    img, mask, c, _ = synthetic_eye(seed=11)
    rng = np.random.default_rng(11)
    noise = np.clip(
        rng.integers(0, 256, size=img.shape), 0, 255
    ).astype(np.uint8)
    blurred = np.clip(np.round(gaussian_filter(img.astype(float), 1.0)), 0, 255).astype(np.uint8)
    d_noise = filter_response_distance(img, mask, c, noise, mask, c)
    d_blur = filter_response_distance(img, mask, c, blurred, mask, c)
    assert d_noise > d_blur


def test_filter_distance_triangle_inequality():
    imgs = [synthetic_eye(seed=s) for s in (12, 13, 14)]
    (ia, ma, ca, _), (ib, mb, cb, _), (ic, mc, cc, _) = imgs
    d_ab = filter_response_distance(ia, ma, ca, ib, mb, cb)
    d_bc = filter_response_distance(ib, mb, cb, ic, mc, cc)
    d_ac = filter_response_distance(ia, ma, ca, ic, mc, cc)
    assert d_ac <= d_ab + d_bc + 1e-9
