import csv

import numpy as np
import pytest

from irisdeform.geometry import Circle, IrisCircles, annulus


def make_circles(pupil_r=40.0, iris_r=120.0, cx=128.0, cy=128.0, pupil_dx=0.0, pupil_dy=0.0):
    return IrisCircles(
        pupil=Circle(cx + pupil_dx, cy + pupil_dy, pupil_r),
        iris=Circle(cx, cy, iris_r),
    )


def write_eye(directory, name, pupil_r=40.0, iris_r=100.0, shape=(288, 384), seed=0):
    """Render a synthetic eye to <dir>/<name>.png plus its mask; returns paths."""
    from irisdeform.fileio import save_gray_png, save_mask_png
    from irisdeform.synth import synthetic_eye

    img, mask, _, _ = synthetic_eye(
        shape=shape, pupil_r=pupil_r, iris_r=iris_r, seed=seed
    )
    img_path = str(directory / f"{name}.png")
    mask_path = str(directory / f"{name}_mask.png")
    save_gray_png(img_path, img)
    save_mask_png(mask_path, mask)
    return img_path, mask_path


def write_dataset(directory, specs):
    """Synthetic dataset + manifest CSV.

    specs: iterable of (name, identity, eye, pupil_r, iris_r, seed).
    Returns the manifest path.
    """
    rows = []
    for name, identity, eye, pupil_r, iris_r, seed in specs:
        img_path, mask_path = write_eye(
            directory, name, pupil_r=pupil_r, iris_r=iris_r, seed=seed
        )
        rows.append([img_path, mask_path, identity, eye, pupil_r, iris_r])
    manifest = directory / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image", "mask", "identity", "eye", "pupil_r", "iris_r"])
        writer.writerows(rows)
    return str(manifest)


def psnr(a, b, mask=None, peak=255.0):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if mask is not None:
        a, b = a[mask], b[mask]
    mse = float(np.mean((a - b) ** 2))
    if mse == 0:
        return float("inf")
    return 10.0 * np.log10(peak * peak / mse)


@pytest.fixture
def annulus_mask_256():
    """Perfect synthetic annulus: inner r=40, outer r=120, centered (128,128)."""
    return annulus((256, 256), make_circles())
