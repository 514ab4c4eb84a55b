"""Iris texture deformation, matching and evaluation toolkit."""

from . import errors
from .deformation import (
    Biomechanical,
    BiomechParams,
    DeformationModel,
    External,
    Linear,
    NormalizedIris,
    biomech_source_radius,
    deform,
    rubber_sheet_denormalize,
    rubber_sheet_normalize,
)
from .evaluation import (
    BootstrapConfig,
    ScoreSet,
    auc,
    bootstrap_auc,
    decidability,
    delta_binned_report,
    label_pairs,
)
from .geometry import (
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
from .losses import (
    DiscriminatorMargins,
    IdentityQuintuple,
    autoencoder_identity_loss,
    cosine_loss,
    discriminator_identity_loss,
    iso_sharpness,
    ms_ssim,
    ms_ssim_loss,
    sharpness_loss,
    triplet_wrap,
)
from .pipeline import DatasetConfig, JobResult, center_crop, run_curation
from .recognition import (
    FilterBank,
    IrisCode,
    default_gabor_bank,
    encode,
    filter_response_distance,
    hamming_distance,
    match_codes,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
