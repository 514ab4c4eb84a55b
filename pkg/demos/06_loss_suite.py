# The training-objective components as plain numbers: identity losses with
# data-derived margins, the triplet wrapper, MS-SSIM and sharpness.

import numpy as np
from scipy.ndimage import gaussian_filter

from irisdeform import (
    DiscriminatorMargins,
    IdentityQuintuple,
    autoencoder_identity_loss,
    cosine_loss,
    discriminator_identity_loss,
    iso_sharpness,
    ms_ssim,
    sharpness_loss,
    triplet_wrap,
)
from irisdeform.synth import synthetic_eye

rng = np.random.default_rng(5)

# %% Embedding-space identity losses. Margins come from the batch itself:
# the output may stay as far from the input as the target is, and must be
# as far from the impostor as the target is.
target = rng.normal(size=64)
quint = IdentityQuintuple(
    eO=target + 0.1 * rng.normal(size=64),
    eT=target,
    eP=target + 0.05 * rng.normal(size=64),
    eI=rng.normal(size=64),
    eN=rng.normal(size=64),
)
print(f"cosine(output, target)  = {cosine_loss(quint.eO, quint.eT):.4f}")
print(f"autoencoder identity    = {autoencoder_identity_loss(quint):.4f}")
print(f"discriminator identity  = "
      f"{discriminator_identity_loss(quint.eO, quint.eT, quint.eP, quint.eN, DiscriminatorMargins(0.2)):.4f}")

# %% Any pairwise loss gains a triplet form; a perfect output zeroes it.
print(f"triplet(cosine), O=T    = {triplet_wrap(cosine_loss, target, target, quint.eN):.4f}")

# %% Image realism terms.
img, _, _, _ = synthetic_eye(seed=5)
blurred = np.clip(np.round(gaussian_filter(img.astype(float), 2.0)), 0, 255).astype(np.uint8)
print(f"ms_ssim(img, img)       = {ms_ssim(img, img):.4f}")
print(f"ms_ssim(img, blurred)   = {ms_ssim(img, blurred):.4f}")
print(f"sharpness(img)          = {iso_sharpness(img):.2f}")
print(f"sharpness(blurred)      = {iso_sharpness(blurred):.2f}")
print(f"sharpness_loss(blur,img)= {sharpness_loss(blurred, img):.2f}  (hinge active)")
print(f"sharpness_loss(img,blur)= {sharpness_loss(img, blurred):.2f}  (output sharper: 0)")
