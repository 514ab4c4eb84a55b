"""On-disk formats: PNG rasters, the dataset manifest CSV, kernel containers.

Masks are stored as 8-bit single-channel PNG with 0 = background and
255 = set; on load any value >= 128 counts as set. The manifest is a CSV
with header ``image,mask,identity,eye,pupil_r,iris_r``; relative paths are
resolved against the CSV's directory.

The kernel container is a plain binary file: one line of JSON metadata
(kernel count plus per-kernel rows/cols/wavelength/orientation), a newline,
then for each kernel its real plane followed by its imaginary plane as
row-major little-endian 32-bit floats.
"""

from __future__ import annotations

import csv
import io
import json
import os

import numpy as np
from PIL import Image

from .geometry import ManifestRow


# ---------------------------------------------------------------------------
# PNG rasters
# ---------------------------------------------------------------------------

def encode_gray_png(img: np.ndarray) -> bytes:
    img = np.asarray(img)
    if img.dtype != np.uint8:
        img = np.clip(np.round(img), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(img, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def decode_gray_png(data: bytes) -> np.ndarray:
    with Image.open(io.BytesIO(data)) as im:
        return np.asarray(im.convert("L"), dtype=np.uint8)


def encode_mask_png(mask: np.ndarray) -> bytes:
    return encode_gray_png(np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8))


def decode_mask_png(data: bytes) -> np.ndarray:
    return decode_gray_png(data) >= 128


def load_gray_png(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("L"), dtype=np.uint8)


def save_gray_png(path, img: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_gray_png(img))


def load_mask_png(path) -> np.ndarray:
    return load_gray_png(path) >= 128


def save_mask_png(path, mask: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_mask_png(mask))


# ---------------------------------------------------------------------------
# Manifest CSV
# ---------------------------------------------------------------------------

MANIFEST_HEADER = ["image", "mask", "identity", "eye", "pupil_r", "iris_r"]


def read_manifest(path) -> list[ManifestRow]:
    base = os.path.dirname(os.path.abspath(path))
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(MANIFEST_HEADER) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"manifest missing columns: {sorted(missing)}")
        for rec in reader:
            rows.append(
                ManifestRow(
                    image_path=os.path.join(base, rec["image"]),
                    mask_path=os.path.join(base, rec["mask"]),
                    identity_id=rec["identity"],
                    eye_label=rec["eye"],
                    pupil_radius=float(rec["pupil_r"]),
                    iris_radius=float(rec["iris_r"]),
                )
            )
    return rows


def write_manifest(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for r in rows:
            writer.writerow(
                [r.image_path, r.mask_path, r.identity_id, r.eye_label,
                 f"{r.pupil_radius:.3f}", f"{r.iris_radius:.3f}"]
            )


def write_pairs_csv(path, pairs) -> None:
    """Cross-bin training pairs: one (input, target) manifest row pair per line."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["input_" + h for h in MANIFEST_HEADER] + ["target_" + h for h in MANIFEST_HEADER]
        )
        for src, dst in pairs:
            writer.writerow(
                [src.image_path, src.mask_path, src.identity_id, src.eye_label,
                 f"{src.pupil_radius:.3f}", f"{src.iris_radius:.3f}",
                 dst.image_path, dst.mask_path, dst.identity_id, dst.eye_label,
                 f"{dst.pupil_radius:.3f}", f"{dst.iris_radius:.3f}"]
            )


# ---------------------------------------------------------------------------
# Kernel container
# ---------------------------------------------------------------------------

def save_kernels(path, kernels, metadata=None) -> None:
    """Write complex 2-D kernels to the binary container format."""
    metadata = metadata or [{} for _ in kernels]
    if len(metadata) != len(kernels):
        raise ValueError("one metadata dict per kernel required")
    entries = []
    for k, meta in zip(kernels, metadata):
        k = np.asarray(k)
        entry = {"rows": int(k.shape[0]), "cols": int(k.shape[1])}
        entry.update(meta)
        entries.append(entry)
    header = json.dumps({"kernels": len(kernels), "entries": entries}, sort_keys=True)
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8") + b"\n")
        for k in kernels:
            k = np.asarray(k, dtype=np.complex128)
            fh.write(np.ascontiguousarray(k.real, dtype="<f4").tobytes())
            fh.write(np.ascontiguousarray(k.imag, dtype="<f4").tobytes())


def load_kernels(path):
    """Read a kernel container; returns (list of complex arrays, list of metadata)."""
    with open(path, "rb") as fh:
        header_line = fh.readline()
        header = json.loads(header_line.decode("utf-8"))
        kernels, metadata = [], []
        for entry in header["entries"]:
            rows, cols = entry["rows"], entry["cols"]
            count = rows * cols
            real = np.frombuffer(fh.read(4 * count), dtype="<f4").reshape(rows, cols)
            imag = np.frombuffer(fh.read(4 * count), dtype="<f4").reshape(rows, cols)
            kernels.append(real.astype(np.float64) + 1j * imag.astype(np.float64))
            metadata.append({k: v for k, v in entry.items() if k not in ("rows", "cols")})
    return kernels, metadata
