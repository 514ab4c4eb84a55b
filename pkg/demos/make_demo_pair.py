# Generates the bundled examiner-UI demo pair: a probe at ratio 0.30 and a
# same-identity gallery at ratio 0.55 produced by the biomechanical model
# (plus seeded sensor noise), so compensating the probe at the gallery's
# ratio measurably improves the match. Writes into frontend/public/demo/.

import os

import numpy as np

from irisdeform import Biomechanical, deform
from irisdeform.fileio import save_gray_png, save_mask_png
from irisdeform.geometry import Circle, IrisCircles, annulus
from irisdeform.synth import synthetic_eye

OUT = os.path.join(os.path.dirname(__file__), "..", "frontend", "public", "demo")


def main():
    os.makedirs(OUT, exist_ok=True)
    probe, probe_mask, _, _ = synthetic_eye(
        shape=(256, 256), pupil_r=33.0, iris_r=110.0, seed=77
    )
    gallery_circles = IrisCircles(pupil=Circle(128, 128, 60.5), iris=Circle(128, 128, 110))
    gallery_mask = annulus((256, 256), gallery_circles)
    gallery, gallery_mask = deform(probe, probe_mask, gallery_mask, Biomechanical())
    rng = np.random.default_rng(78)
    gallery = np.clip(
        np.round(gallery.astype(float) + rng.normal(0.0, 1.5, gallery.shape)), 0, 255
    ).astype(np.uint8)
    gallery[~gallery_mask] = 0

    save_gray_png(os.path.join(OUT, "probe.png"), probe)
    save_mask_png(os.path.join(OUT, "probe_mask.png"), probe_mask)
    save_gray_png(os.path.join(OUT, "gallery.png"), gallery)
    save_mask_png(os.path.join(OUT, "gallery_mask.png"), gallery_mask)
    print(f"wrote demo pair (probe ratio 0.30, gallery ratio 0.55) to {os.path.abspath(OUT)}")


if __name__ == "__main__":
    main()
