import math

import numpy as np
import pytest

from irisdeform.errors import EmptyClass
from irisdeform.evaluation import (
    BootstrapConfig,
    ScoreSet,
    auc,
    bootstrap_auc,
    decidability,
    delta_binned_report,
    format_mean_std,
    format_report_table,
    label_pairs,
    read_scores_csv,
    write_scores_csv,
)
from irisdeform.geometry import ManifestRow


def make_scores(genuine, impostor, g_deltas=None, i_deltas=None):
    return ScoreSet.from_pairs(
        zip(genuine, g_deltas or [0.0] * len(genuine)),
        zip(impostor, i_deltas or [0.0] * len(impostor)),
    )


def _brute_force_auc(genuine, impostor):
    wins = 0.0
    for g in genuine:
        for i in impostor:
            if g > i:
                wins += 1.0
            elif g == i:
                wins += 0.5
    return wins / (len(genuine) * len(impostor))


# ---------------------------------------------------------------------------
# label_pairs
# ---------------------------------------------------------------------------

def _row(i, identity, eye="L", pupil=30.0):
    return ManifestRow(f"i{i}.png", f"m{i}.png", identity, eye, pupil, 100.0)


def test_label_pairs_two_identities_two_images():
    rows = [_row(0, "a", pupil=30), _row(1, "a", pupil=50),
            _row(2, "b", pupil=35), _row(3, "b", pupil=60)]
    pairs = label_pairs(rows)
    assert len(pairs) == 6
    genuine = [p for p in pairs if p.genuine]
    impostor = [p for p in pairs if not p.genuine]
    assert len(genuine) == 2 and len(impostor) == 4
    ab = next(p for p in pairs if (p.index_a, p.index_b) == (0, 1))
    assert ab.delta == pytest.approx(0.2)


def test_label_pairs_single_image_and_same_identity():
    assert label_pairs([_row(0, "a")]) == []
    rows = [_row(i, "a", pupil=30 + i) for i in range(3)]
    assert all(p.genuine for p in label_pairs(rows))


def test_label_pairs_different_eyes_are_impostors():
    rows = [_row(0, "a", eye="L"), _row(1, "a", eye="R")]
    assert not label_pairs(rows)[0].genuine


# ---------------------------------------------------------------------------
# AUC
# ---------------------------------------------------------------------------

def test_auc_perfect_separation():
    assert auc(make_scores([1.0, 1.0, 1.0], [0.0, 0.0])) == 1.0


def test_auc_identical_distributions():
    assert auc(make_scores([0.3, 0.7, 0.5], [0.3, 0.7, 0.5])) == 0.5


def test_auc_small_case_matches_pairwise_oracle():
    # (0.9 > 0.5) wins, (0.4 > 0.5) loses: 1 of 2 comparisons.
    genuine, impostor = [0.9, 0.4], [0.5]
    expected = _brute_force_auc(genuine, impostor)
    assert expected == 0.5
    assert auc(make_scores(genuine, impostor)) == expected


def test_auc_matches_pairwise_oracle_randomized():
    rng = np.random.default_rng(17)
    for _ in range(30):
        genuine = list(np.round(rng.normal(0.6, 0.2, size=rng.integers(1, 20)), 2))
        impostor = list(np.round(rng.normal(0.4, 0.2, size=rng.integers(1, 20)), 2))
        assert auc(make_scores(genuine, impostor)) == pytest.approx(
            _brute_force_auc(genuine, impostor), abs=1e-12
        )


def test_auc_invariant_under_monotone_transform():
    rng = np.random.default_rng(18)
    genuine = list(rng.normal(0.7, 0.1, 40))
    impostor = list(rng.normal(0.3, 0.1, 60))
    base = auc(make_scores(genuine, impostor))
    warped = auc(make_scores([math.exp(3 * g) for g in genuine],
                             [math.exp(3 * i) for i in impostor]))
    assert warped == pytest.approx(base, abs=1e-12)


def test_auc_swap_classes_complements():
    rng = np.random.default_rng(19)
    genuine = list(rng.normal(0.7, 0.2, 25))
    impostor = list(rng.normal(0.4, 0.2, 35))
    a = auc(make_scores(genuine, impostor))
    b = auc(make_scores(impostor, genuine))
    assert a + b == pytest.approx(1.0, abs=1e-12)


def test_auc_empty_class():
    with pytest.raises(EmptyClass):
        auc(make_scores([], [0.1]))


def test_distance_ingestion_flips_polarity():
    s = ScoreSet.from_pairs([(0.1, 0.0)], [(0.9, 0.0)], distances=True)
    assert s.genuine_scores[0] == pytest.approx(0.9)
    assert auc(s) == 1.0


# ---------------------------------------------------------------------------
# Bootstrap
# ---------------------------------------------------------------------------

def test_bootstrap_perfectly_separated():
    s = make_scores(list(np.linspace(0.8, 1.0, 50)), list(np.linspace(0.0, 0.2, 50)))
    out = bootstrap_auc(s, BootstrapConfig(fraction=0.1, iterations=50, seed=3))
    assert out["mean"] == 1.0
    assert out["std"] == 0.0


def test_bootstrap_fixed_seed_reproducible():
    rng = np.random.default_rng(20)
    s = make_scores(list(rng.normal(0.7, 0.1, 200)), list(rng.normal(0.5, 0.1, 300)))
    cfg = BootstrapConfig(fraction=0.1, iterations=100, seed=42)
    a = bootstrap_auc(s, cfg)
    b = bootstrap_auc(s, cfg)
    assert a == b
    c = bootstrap_auc(s, BootstrapConfig(fraction=0.1, iterations=100, seed=43))
    assert c != a


def test_bootstrap_fraction_one_is_degenerate():
    rng = np.random.default_rng(21)
    s = make_scores(list(rng.normal(0.7, 0.1, 80)), list(rng.normal(0.5, 0.1, 90)))
    out = bootstrap_auc(s, BootstrapConfig(fraction=1.0, iterations=25, seed=7))
    assert out["std"] == 0.0
    assert out["mean"] == pytest.approx(auc(s), abs=1e-15)


def test_bootstrap_table_style_formatting():
    assert format_mean_std(0.996, 0.0015) == "0.996±0.002"
    assert format_mean_std(0.9962, 0.001) == "0.996±0.001"


def test_bootstrap_config_validation():
    with pytest.raises(ValueError):
        BootstrapConfig(fraction=0.0)
    with pytest.raises(ValueError):
        BootstrapConfig(iterations=0)
    with pytest.raises(ValueError):
        BootstrapConfig(seed=-1)


# ---------------------------------------------------------------------------
# Decidability
# ---------------------------------------------------------------------------

def test_decidability_analytic_cases():
    rng = np.random.default_rng(22)
    g = list(1.0 + rng.normal(0, 1, 20000))
    i = list(rng.normal(0, 1, 20000))
    assert decidability(make_scores(g, i)) == pytest.approx(1.0, abs=0.05)

    same = list(rng.normal(0.5, 0.2, 500))
    assert decidability(make_scores(same, same)) == 0.0


def test_decidability_formula_exact():
    # mu_g=2, mu_i=0, sigma_g=1, sigma_i=3 -> 2/sqrt(5).
    g = [1.0, 2.0, 3.0]  # mean 2, sample std 1
    i = [-3.0, 0.0, 3.0]  # mean 0, sample std 3
    assert decidability(make_scores(g, i)) == pytest.approx(2.0 / math.sqrt(5.0), abs=1e-9)


def test_decidability_zero_variance_sentinel():
    assert decidability(make_scores([1.0, 1.0], [0.0, 0.0])) == math.inf
    assert decidability(make_scores([1.0, 1.0], [1.0, 1.0])) == 0.0


def test_decidability_affine_invariance():
    rng = np.random.default_rng(23)
    g = list(rng.normal(0.8, 0.1, 50))
    i = list(rng.normal(0.3, 0.2, 70))
    base = decidability(make_scores(g, i))
    mapped = decidability(make_scores([7 * x + 2 for x in g], [7 * x + 2 for x in i]))
    assert mapped == pytest.approx(base, abs=1e-9)


def test_decidability_needs_two_per_class():
    with pytest.raises(EmptyClass):
        decidability(make_scores([1.0], [0.0, 0.1]))


# ---------------------------------------------------------------------------
# Delta-binned report
# ---------------------------------------------------------------------------

def _monotone_scores(rng, n=400):
    genuine, impostor = [], []
    for _ in range(n):
        delta = float(rng.uniform(0.0, 0.4))
        # Separation shrinks as delta grows: AUC should fall with the bin.
        genuine.append((float(rng.normal(0.9 - 1.2 * delta, 0.05)), delta))
        impostor.append((float(rng.normal(0.3, 0.05)), delta))
    return ScoreSet.from_pairs(genuine, impostor)


def test_report_reproduces_four_bin_structure():
    rng = np.random.default_rng(24)
    s = _monotone_scores(rng)
    rows = delta_binned_report(s, [0.0, 0.1, 0.2, 0.3, 0.4], BootstrapConfig(seed=1))
    assert [(r["delta_lo"], r["delta_hi"]) for r in rows] == [
        (0.0, 0.1), (0.1, 0.2), (0.2, 0.3), (0.3, 0.4),
    ]
    aucs = [r["auc_mean"] for r in rows]
    assert all(b <= a for a, b in zip(aucs, aucs[1:]))


def test_report_single_bin_when_all_in_one():
    s = make_scores([0.9] * 5, [0.1] * 5, [0.05] * 5, [0.05] * 5)
    rows = delta_binned_report(s, [0.0, 0.1, 0.2], BootstrapConfig(iterations=5))
    assert len(rows) == 1
    assert rows[0]["delta_lo"] == 0.0


def test_report_skips_empty_bins_rather_than_zeroing():
    s = make_scores([0.9, 0.8], [0.1, 0.2], [0.05, 0.15], [0.05, 0.15])
    rows = delta_binned_report(s, [0.0, 0.1, 0.2, 0.3], BootstrapConfig(iterations=5))
    assert all((r["delta_lo"], r["delta_hi"]) != (0.2, 0.3) for r in rows)


def test_report_edges_validation():
    s = make_scores([1.0], [0.0])
    with pytest.raises(ValueError):
        delta_binned_report(s, [0.3, 0.2])


def test_report_table_rendering():
    rng = np.random.default_rng(25)
    s = _monotone_scores(rng)
    rows = delta_binned_report(s, [0.0, 0.1, 0.2], BootstrapConfig(seed=2))
    text = format_report_table({"linear": rows, "biomech": rows})
    lines = text.splitlines()
    assert lines[0].split() == ["delta", "linear", "biomech"]
    assert "[0, 0.1]" in lines[1]
    assert "±" in lines[1]


# ---------------------------------------------------------------------------
# Score CSV round trip
# ---------------------------------------------------------------------------

def test_scores_csv_round_trip(tmp_path):
    path = tmp_path / "scores.csv"
    entries = [
        ("p0", "genuine", 0.91, 0.05),
        ("p1", "impostor", 0.42, 0.05),
        ("p2", "genuine", 0.83, 0.31),
        ("p3", "impostor", 0.40, 0.31),
    ]
    write_scores_csv(path, entries)
    s = read_scores_csv(path)
    assert list(s.genuine_scores) == pytest.approx([0.91, 0.83])
    assert list(s.impostor_deltas) == pytest.approx([0.05, 0.31])


def test_scores_csv_rejects_unknown_label(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("pair_id,label,score,delta\np0,unsure,0.5,0.1\n")
    with pytest.raises(ValueError):
        read_scores_csv(path)
