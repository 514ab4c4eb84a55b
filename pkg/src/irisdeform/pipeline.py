"""Dataset curation: cropping, ratio binning, cross-bin pair generation.

Batch stages fail soft per item (a bad file marks its row failed and the
rest proceed) and are idempotent: re-running overwrites the same outputs
deterministically. With ``jobs > 1`` items are processed in a thread pool;
results are gathered in input order so outputs are byte-identical whatever
the parallelism.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fileio
from .errors import IrisToolkitError, IrisTooLarge, DimensionMismatch, OutOfRange
from .geometry import (
    Binning,
    Circle,
    IrisCircles,
    ManifestRow,
    assign_bin,
    fit_circles,
    make_pairs,
    pupil_iris_ratio,
)


@dataclass(frozen=True)
class DatasetConfig:
    manifest_path: str
    output_dir: str
    binning: Binning = Binning()
    crop_size: int = 256
    crop_padding: int = 16
    normalized_rows: int = 64
    normalized_cols: int = 512
    jobs: int = 1

    def __post_init__(self):
        if self.crop_size <= 2 * self.crop_padding:
            raise ValueError(
                f"crop_size {self.crop_size} must exceed twice the padding {self.crop_padding}"
            )
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")


@dataclass
class JobResult:
    outputs: list = field(default_factory=list)
    statuses: dict = field(default_factory=dict)
    timing_ms: float = 0.0


def _window_origin(c: IrisCircles, size: int):
    left = int(round(c.iris.cx)) - size // 2
    top = int(round(c.iris.cy)) - size // 2
    return left, top


def _crop_window(arr: np.ndarray, left: int, top: int, size: int) -> np.ndarray:
    """size x size window at (left, top), zero-padded where it leaves the frame."""
    out = np.zeros((size, size), dtype=arr.dtype)
    src_y0, src_x0 = max(top, 0), max(left, 0)
    src_y1 = min(top + size, arr.shape[0])
    src_x1 = min(left + size, arr.shape[1])
    if src_y1 > src_y0 and src_x1 > src_x0:
        out[src_y0 - top : src_y1 - top, src_x0 - left : src_x1 - left] = arr[
            src_y0:src_y1, src_x0:src_x1
        ]
    return out


def center_crop(img: np.ndarray, c: IrisCircles, size: int = 256, padding: int = 16):
    """Crop a size x size window centered on the iris circle.

    Regions beyond the frame are zero-padded. Raises IrisTooLarge when the
    iris cannot fit inside the window minus its padding margin. Returns the
    cropped image and the circles translated into crop coordinates.
    """
    if c.iris.r > size / 2.0 - padding:
        raise IrisTooLarge(
            f"iris radius {c.iris.r:.1f} exceeds {size / 2.0 - padding:.1f} "
            f"(crop {size} with padding {padding})"
        )
    left, top = _window_origin(c, size)
    cropped = _crop_window(np.asarray(img), left, top, size)
    translated = IrisCircles(
        pupil=Circle(c.pupil.cx - left, c.pupil.cy - top, c.pupil.r),
        iris=Circle(c.iris.cx - left, c.iris.cy - top, c.iris.r),
    )
    return cropped, translated


def _curate_one(idx: int, row: ManifestRow, cfg: DatasetConfig):
    """Crop one manifest row; returns (status, curated row or None)."""
    try:
        img = fileio.load_gray_png(row.image_path)
        mask = fileio.load_mask_png(row.mask_path)
        if img.shape != mask.shape:
            raise DimensionMismatch(
                f"image {img.shape} vs mask {mask.shape} for {row.image_path}"
            )
        circles = fit_circles(mask)
        left, top = _window_origin(circles, cfg.crop_size)
        img_c = _crop_window(img, left, top, cfg.crop_size)
        mask_c = _crop_window(mask, left, top, cfg.crop_size)
        _, translated = center_crop(img, circles, cfg.crop_size, cfg.crop_padding)

        ratio = pupil_iris_ratio(translated)
        try:
            assign_bin(ratio, cfg.binning)
        except OutOfRange:
            return f"dropped: ratio {ratio:.3f} outside binning range", None

        stem = f"{idx:05d}_{Path(row.image_path).stem}"
        img_path = os.path.join(cfg.output_dir, f"{stem}.png")
        mask_path = os.path.join(cfg.output_dir, f"{stem}_mask.png")
        fileio.save_gray_png(img_path, img_c)
        fileio.save_mask_png(mask_path, mask_c)
        curated = ManifestRow(
            image_path=img_path,
            mask_path=mask_path,
            identity_id=row.identity_id,
            eye_label=row.eye_label,
            pupil_radius=translated.pupil.r,
            iris_radius=translated.iris.r,
        )
        return "ok", curated
    except (IrisToolkitError, OSError, ValueError) as exc:
        return f"failed: {exc}", None


def run_curation(cfg: DatasetConfig):
    """Crop every manifest image, bin by ratio, emit the cross-bin pair list.

    Rows whose fitted ratio falls outside the binning range are dropped, as
    are rows that fail to load or fit; everything else lands in
    ``curated.csv`` and the ordered pair manifest ``pairs.csv`` under the
    output directory. Returns (curated rows, pairs, JobResult).
    """
    start = time.perf_counter()
    rows = fileio.read_manifest(cfg.manifest_path)
    os.makedirs(cfg.output_dir, exist_ok=True)

    if cfg.jobs > 1 and len(rows) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(lambda a: _curate_one(*a, cfg), enumerate(rows)))
    else:
        results = [_curate_one(i, row, cfg) for i, row in enumerate(rows)]

    result = JobResult()
    curated = []
    for row, (status, new_row) in zip(rows, results):
        result.statuses[row.image_path] = status
        if new_row is not None:
            curated.append(new_row)

    pairs = make_pairs(curated, cfg.binning)
    curated_path = os.path.join(cfg.output_dir, "curated.csv")
    pairs_path = os.path.join(cfg.output_dir, "pairs.csv")
    fileio.write_manifest(curated_path, curated)
    fileio.write_pairs_csv(pairs_path, pairs)
    result.outputs = [curated_path, pairs_path]
    result.timing_ms = (time.perf_counter() - start) * 1000.0
    return curated, pairs, result
