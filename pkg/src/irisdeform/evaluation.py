"""Biometric verification statistics: ROC/AUC, bootstrap, d', binned reports.

Scores are canonicalized to similarities at ingestion (higher = same
identity); distance-valued inputs are converted as ``1 - distance``. The
bootstrap resamples genuine and impostor lists independently with
replacement, drawing ceil(fraction * n) per class from a PCG64 generator
seeded per iteration with SeedSequence([seed, iteration]), so serial and
parallel runs agree bit for bit. At fraction 1.0 every iteration is the
full sample and the bootstrap degenerates to the plain AUC with zero
spread.

Score files are CSV with header ``pair_id,label,score,delta`` and label in
{genuine, impostor}; reports render as CSV or an aligned text table with
one mean+/-std column per method.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyClass
from .geometry import ratio_delta  # noqa: F401  (re-exported for callers pairing scores)


@dataclass(frozen=True)
class ScoreSet:
    """Genuine and impostor similarity scores, each with its pair's delta."""

    genuine_scores: np.ndarray
    genuine_deltas: np.ndarray
    impostor_scores: np.ndarray
    impostor_deltas: np.ndarray

    def __post_init__(self):
        for name in ("genuine", "impostor"):
            scores = getattr(self, f"{name}_scores")
            deltas = getattr(self, f"{name}_deltas")
            if scores.shape != deltas.shape or scores.ndim != 1:
                raise ValueError(f"{name} scores/deltas must be matching 1-D arrays")
            if scores.size and not np.isfinite(scores).all():
                raise ValueError(f"{name} scores must be finite")

    @classmethod
    def from_pairs(cls, genuine, impostor, distances: bool = False) -> "ScoreSet":
        """Build from iterables of (score, delta); set ``distances`` for
        lower-is-more-similar scores (converted as 1 - score)."""

        def unpack(entries):
            entries = list(entries)
            if not entries:
                return np.empty(0), np.empty(0)
            scores = np.asarray([e[0] for e in entries], dtype=np.float64)
            deltas = np.asarray([e[1] for e in entries], dtype=np.float64)
            if distances:
                scores = 1.0 - scores
            return scores, deltas

        gs, gd = unpack(genuine)
        is_, id_ = unpack(impostor)
        return cls(gs, gd, is_, id_)

    def subset_by_delta(self, lo: float, hi: float, include_lo: bool) -> "ScoreSet":
        def pick(scores, deltas):
            if include_lo:
                sel = (deltas >= lo) & (deltas <= hi)
            else:
                sel = (deltas > lo) & (deltas <= hi)
            return scores[sel], deltas[sel]

        gs, gd = pick(self.genuine_scores, self.genuine_deltas)
        is_, id_ = pick(self.impostor_scores, self.impostor_deltas)
        return ScoreSet(gs, gd, is_, id_)


@dataclass(frozen=True)
class BootstrapConfig:
    fraction: float = 0.10
    iterations: int = 100
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError(f"fraction must be in (0, 1], got {self.fraction}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


@dataclass(frozen=True)
class LabeledPair:
    """One unordered comparison with its genuine/impostor label and delta."""

    index_a: int
    index_b: int
    genuine: bool
    delta: float


def label_pairs(rows) -> list[LabeledPair]:
    """All unordered cross-image pairs of a manifest, labeled and delta-annotated.

    A pair is genuine when identity and eye both match (images of the same
    iris), impostor otherwise. Order is deterministic: (i, j) with i < j in
    manifest order.
    """
    pairs = []
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            a, b = rows[i], rows[j]
            genuine = a.identity_id == b.identity_id and a.eye_label == b.eye_label
            pairs.append(
                LabeledPair(
                    index_a=i,
                    index_b=j,
                    genuine=genuine,
                    delta=abs(a.ratio - b.ratio),
                )
            )
    return pairs


# ---------------------------------------------------------------------------
# AUC and friends
# ---------------------------------------------------------------------------

def _auc_values(genuine: np.ndarray, impostor: np.ndarray) -> float:
    """Mann-Whitney AUC with ties counted half, via midranks."""
    n_g, n_i = len(genuine), len(impostor)
    if n_g == 0 or n_i == 0:
        raise EmptyClass("AUC needs at least one genuine and one impostor score")
    from scipy.stats import rankdata

    ranks = rankdata(np.concatenate([genuine, impostor]))
    r_g = float(ranks[:n_g].sum())
    return (r_g - n_g * (n_g + 1) / 2.0) / (n_g * n_i)


def auc(s: ScoreSet) -> float:
    """Probability a random genuine sample outscores a random impostor one."""
    return _auc_values(s.genuine_scores, s.impostor_scores)


def bootstrap_auc(s: ScoreSet, cfg: BootstrapConfig = BootstrapConfig()) -> dict:
    """Mean and standard deviation of AUC over resampled score subsets.

    Each iteration draws ceil(fraction*n) genuine then impostor indices with
    replacement from its own seeded generator (see module docstring) and
    computes the AUC of the draw. The standard deviation is the sample std
    (ddof=1); a single iteration reports 0.0.
    """
    n_g, n_i = len(s.genuine_scores), len(s.impostor_scores)
    if n_g == 0 or n_i == 0:
        raise EmptyClass("bootstrap needs non-empty genuine and impostor scores")
    take_g = math.ceil(cfg.fraction * n_g)
    take_i = math.ceil(cfg.fraction * n_i)
    values = np.empty(cfg.iterations)
    for it in range(cfg.iterations):
        if cfg.fraction == 1.0:
            idx_g = np.arange(n_g)
            idx_i = np.arange(n_i)
        else:
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, it])))
            idx_g = rng.integers(0, n_g, take_g)
            idx_i = rng.integers(0, n_i, take_i)
        values[it] = _auc_values(s.genuine_scores[idx_g], s.impostor_scores[idx_i])
    if cfg.iterations == 1 or np.all(values == values[0]):
        # Identical draws have zero spread; summing them would smear an
        # ulp of rounding into the std.
        return {"mean": float(values[0]), "std": 0.0}
    return {"mean": float(values.mean()), "std": float(values.std(ddof=1))}


def decidability(s: ScoreSet) -> float:
    """d' separation between genuine and impostor score distributions.

    |mu_g - mu_i| / sqrt((var_g + var_i) / 2) with sample statistics. When
    both variances vanish the result is 0.0 for equal means and +inf
    otherwise (documented sentinel).
    """
    if len(s.genuine_scores) < 2 or len(s.impostor_scores) < 2:
        raise EmptyClass("decidability needs at least two scores per class")
    mu_g, mu_i = float(s.genuine_scores.mean()), float(s.impostor_scores.mean())
    var_g = float(s.genuine_scores.var(ddof=1))
    var_i = float(s.impostor_scores.var(ddof=1))
    denom = math.sqrt((var_g + var_i) / 2.0)
    if denom == 0.0:
        return 0.0 if mu_g == mu_i else math.inf
    return abs(mu_g - mu_i) / denom


def delta_binned_report(
    s: ScoreSet, edges, cfg: BootstrapConfig = BootstrapConfig()
) -> list[dict]:
    """Bootstrap AUC per delta bin: [e0,e1], (e1,e2], ...

    Bins where either class is empty are omitted rather than reported as
    zero. Each row carries the bin bounds, bootstrap mean/std and the class
    counts feeding it.
    """
    edges = [float(e) for e in edges]
    if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError("edges must be strictly increasing with at least two entries")
    rows = []
    for k, (lo, hi) in enumerate(zip(edges, edges[1:])):
        sub = s.subset_by_delta(lo, hi, include_lo=(k == 0))
        if len(sub.genuine_scores) == 0 or len(sub.impostor_scores) == 0:
            continue
        stats = bootstrap_auc(sub, cfg)
        rows.append(
            {
                "delta_lo": lo,
                "delta_hi": hi,
                "auc_mean": stats["mean"],
                "auc_std": stats["std"],
                "n_genuine": len(sub.genuine_scores),
                "n_impostor": len(sub.impostor_scores),
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Rendering and score file I/O
# ---------------------------------------------------------------------------

def format_mean_std(mean: float, std: float) -> str:
    return f"{mean:.3f}±{std:.3f}"


def _bin_label(lo: float, hi: float, first: bool) -> str:
    left = "[" if first else "("
    return f"{left}{lo:g}, {hi:g}]"


def format_report_table(reports: dict) -> str:
    """Aligned text table: one row per delta bin, one column per method."""
    bins = []
    for rows in reports.values():
        for r in rows:
            key = (r["delta_lo"], r["delta_hi"])
            if key not in bins:
                bins.append(key)
    bins.sort()
    methods = list(reports)
    header = ["delta"] + methods
    lines = [header]
    for lo, hi in bins:
        label = _bin_label(lo, hi, first=(lo, hi) == bins[0])
        cells = [label]
        for m in methods:
            row = next(
                (r for r in reports[m] if (r["delta_lo"], r["delta_hi"]) == (lo, hi)), None
            )
            cells.append(format_mean_std(row["auc_mean"], row["auc_std"]) if row else "-")
        lines.append(cells)
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() for line in lines
    )


def report_to_csv(path, reports: dict) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["method", "delta_lo", "delta_hi", "auc_mean", "auc_std", "n_genuine", "n_impostor"]
        )
        for method, rows in reports.items():
            for r in rows:
                writer.writerow(
                    [method, f"{r['delta_lo']:g}", f"{r['delta_hi']:g}",
                     f"{r['auc_mean']:.6f}", f"{r['auc_std']:.6f}",
                     r["n_genuine"], r["n_impostor"]]
                )


def read_scores_csv(path, distances: bool = False) -> ScoreSet:
    genuine, impostor = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"pair_id", "label", "score", "delta"}
        missing = required - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"score file missing columns: {sorted(missing)}")
        for rec in reader:
            entry = (float(rec["score"]), float(rec["delta"]))
            label = rec["label"].strip().lower()
            if label == "genuine":
                genuine.append(entry)
            elif label == "impostor":
                impostor.append(entry)
            else:
                raise ValueError(f"unknown label {rec['label']!r} in {path}")
    return ScoreSet.from_pairs(genuine, impostor, distances=distances)


def write_scores_csv(path, entries) -> None:
    """Entries: iterable of (pair_id, label, score, delta)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair_id", "label", "score", "delta"])
        for pair_id, label, score, delta in entries:
            writer.writerow([pair_id, label, f"{score:.9f}", f"{delta:.6f}"])
