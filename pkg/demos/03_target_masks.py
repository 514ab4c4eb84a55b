# Target-mask estimation under eyelid occlusion: dilation cuts a larger
# pupil, constriction fills and re-cuts (then the eyelid mask removes the
# residue), and the circular variant rectifies any pupil shape to ratio alpha.

import numpy as np

from irisdeform import (
    circular_target_mask,
    fit_circles,
    full_frame,
    target_mask_constrict,
    target_mask_dilate,
)
from irisdeform.geometry import Circle, IrisCircles, annulus

c = IrisCircles(pupil=Circle(128, 128, 60), iris=Circle(128, 128, 105))
eyelid = full_frame((256, 256))
eyelid[:70, :] = False  # upper lid covers the top of the eye
mask = annulus((256, 256), c) & eyelid

# %% Dilation: strictly a subset of the input, so nothing is hallucinated.
dilated = target_mask_dilate(mask, c, new_pupil_r=80)
print(f"dilate:    {int(mask.sum())} -> {int(dilated.sum())} px (subset: "
      f"{not (dilated & ~mask).any()})")

# %% Constriction: the filled pupil would poke out from under the lid; the
# eyelid intersection removes the residue.
constricted = target_mask_constrict(mask, c, new_pupil_r=30, eyelid=eyelid)
print(f"constrict: residue above lid = {int((constricted & ~eyelid).sum())} px")

# %% Circular rectification targets for a sweep of pupil-to-iris ratios.
ratios = [round(a, 2) for a in np.arange(0.2, 0.71, 0.05)]
inner = []
for alpha in ratios:
    ring = circular_target_mask(c, alpha, eyelid)
    inner.append(fit_circles(ring).pupil.r)
print("alpha sweep fitted pupil radii:",
      ", ".join(f"{a:.2f}->{r:.0f}px" for a, r in zip(ratios, inner)))

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

fig, axes = plt.subplots(1, 4, figsize=(14, 4))
for ax, m, title in ((axes[0], mask, "occluded input"),
                     (axes[1], dilated, "dilate to r=80"),
                     (axes[2], constricted, "constrict to r=30"),
                     (axes[3], circular_target_mask(c, 0.35, eyelid), "circular alpha=0.35")):
    ax.imshow(m, cmap="gray"); ax.set_title(title)
    ax.set_xticks([]); ax.set_yticks([])
fig.tight_layout()
fig.savefig("demo_target_masks.png", dpi=110)
print("wrote demo_target_masks.png")
