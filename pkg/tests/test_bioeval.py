import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exhaustive_eer, exhaustive_roc
from tinydse.bioeval import (
    Embedding,
    ScoreSet,
    distance,
    eer,
    eer_point,
    frr_at_far,
    fuse,
    histogram,
    load_embeddings,
    load_scores,
    roc,
    score_embeddings,
)
from tinydse.errors import EvaluationError, ParseError

FOUR = ScoreSet(np.array([1.0, 2, 3, 4]), np.array([3.0, 4, 5, 6]))
SEPARABLE = ScoreSet(np.array([0.1]), np.array([0.9]))

score_lists = st.lists(st.integers(0, 40).map(lambda k: k / 8), min_size=1, max_size=30)


def test_distance_examples():
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=64), rng.normal(size=64)
    assert distance(a, a) == 0
    assert distance(np.eye(3)[0], np.eye(3)[1]) == pytest.approx(math.sqrt(2))
    oracle = math.sqrt(sum((x - y) ** 2 for x, y in zip(a.tolist(), b.tolist())))
    assert distance(Embedding(a), Embedding(b)) == pytest.approx(oracle, rel=1e-12)
    with pytest.raises(ValueError, match="mismatch"):
        distance(np.zeros(3), np.zeros(4))


def test_embedding_normalization():
    e = Embedding(np.array([3.0, 4.0])).normalized()
    assert np.linalg.norm(e.values) == pytest.approx(1, abs=1e-6)
    with pytest.raises(EvaluationError):
        Embedding(np.zeros(4)).normalized()


def unit_pairs(rng, dim):
    return tuple(Embedding(rng.normal(size=dim)).normalized() for _ in range(2))


def test_fuse_against_concatenation_oracle():
    rng = np.random.default_rng(7)
    for _ in range(20):
        face, voice = unit_pairs(rng, 512), unit_pairs(rng, 512)
        left = np.concatenate([face[0].values, voice[0].values])
        right = np.concatenate([face[1].values, voice[1].values])
        assert left.size == 1024
        assert np.linalg.norm(left) == pytest.approx(math.sqrt(2))
        assert fuse(face, voice) == pytest.approx(float(np.sqrt(((left - right) ** 2).sum())), rel=1e-12)


def test_fuse_identical_is_zero():
    rng = np.random.default_rng(3)
    f, v = unit_pairs(rng, 8)[0], unit_pairs(rng, 4)[0]
    assert fuse((f, f), (v, v)) == 0
    with pytest.raises(ValueError, match="voice"):
        fuse((f, f), (v, Embedding(np.ones(5))))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 32), st.integers(1, 32), st.integers(0, 2**31))
def test_fuse_pythagorean(df, dv, seed):
    rng = np.random.default_rng(seed)
    face, voice = unit_pairs(rng, df), unit_pairs(rng, dv)
    fused = fuse(face, voice)
    assert fused**2 == pytest.approx(distance(*face) ** 2 + distance(*voice) ** 2, rel=1e-9, abs=1e-12)


def test_roc_four_point_example():
    curve = roc(FOUR)
    i = int(np.flatnonzero(curve.thresholds == 3.5)[0])
    assert (curve.far[i], curve.frr[i]) == (0.25, 0.25)


def test_roc_separable_and_degenerate():
    curve = roc(SEPARABLE)
    assert np.any((curve.far == 0) & (curve.frr == 0))
    flat = roc(ScoreSet(np.full(3, 0.7), np.full(5, 0.7)))
    assert len(flat) == 2
    assert flat.far.tolist() == [0, 1] and flat.frr.tolist() == [1, 0]


def test_roc_single_class_error():
    with pytest.raises(EvaluationError):
        roc(ScoreSet(np.array([1.0]), np.array([])))
    with pytest.raises(EvaluationError):
        roc(ScoreSet(np.array([]), np.array([1.0])))


def test_eer_examples():
    assert eer(roc(SEPARABLE)) == 0.0
    thr, rate = eer_point(roc(FOUR))
    assert rate == 0.25 and thr == 3.5


def test_eer_interpolates_between_sweep_points():
    # FAR - FRR jumps from -1/3 to +1/3 with no exact crossing
    s = ScoreSet(np.array([1.0, 2.0, 3.0]), np.array([1.5, 2.5, 3.5]))
    assert eer(roc(s)) == pytest.approx(exhaustive_eer([1, 2, 3], [1.5, 2.5, 3.5]))
    assert 0 < eer(roc(s)) < 1


def test_eer_random_labels_is_half():
    rng = np.random.default_rng(11)
    d = rng.random(10_000)
    same = rng.random(10_000) < 0.5
    assert eer(roc(ScoreSet(d[same], d[~same]))) == pytest.approx(0.5, abs=0.05)


def test_frr_at_far_examples():
    t, frr = frr_at_far(roc(FOUR), 0.25)
    assert (t, frr) == (3.5, 0.25)
    curve = roc(FOUR)
    t1, f1 = frr_at_far(curve, 1.0)
    assert t1 == curve.thresholds[-1] and f1 == 0.0
    assert frr_at_far(roc(SEPARABLE), 0.01)[1] == 0.0
    t0, f0 = frr_at_far(curve, 0.0)
    assert curve.far[np.searchsorted(curve.thresholds, t0)] == 0
    with pytest.raises(ValueError):
        frr_at_far(curve, 1.5)


@settings(max_examples=200, deadline=None)
@given(score_lists, score_lists)
def test_roc_matches_exhaustive_oracle(gen, imp):
    curve = roc(ScoreSet(np.array(gen), np.array(imp)))
    ts, far, frr = exhaustive_roc(gen, imp)
    assert curve.thresholds.tolist() == ts
    assert curve.far.tolist() == far
    assert curve.frr.tolist() == frr
    assert eer(curve) == pytest.approx(exhaustive_eer(gen, imp), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(score_lists, score_lists)
def test_roc_invariants(gen, imp):
    curve = roc(ScoreSet(np.array(gen), np.array(imp)))
    assert np.all(np.diff(curve.thresholds) > 0)
    assert np.all(np.diff(curve.far) >= 0)
    assert np.all(np.diff(curve.frr) <= 0)
    for arr in (curve.far, curve.frr):
        assert np.all((arr >= 0) & (arr <= 1))
    assert 0 <= eer(curve) <= 1
    targets = np.linspace(0, 1, 11)
    frrs = [frr_at_far(curve, f)[1] for f in targets]
    assert all(a >= b for a, b in zip(frrs, frrs[1:]))


@settings(max_examples=200, deadline=None)
@given(score_lists, score_lists)
def test_eer_label_swap_symmetry(gen, imp):
    c = 10.0
    swapped = ScoreSet(c - np.array(imp), c - np.array(gen))
    assert eer(roc(swapped)) == pytest.approx(eer(roc(ScoreSet(np.array(gen), np.array(imp)))), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(score_lists, score_lists)
def test_separable_sets_have_zero_eer(gen, imp):
    shifted = np.array(imp) + max(gen) + 0.5 - min(imp)
    assert eer(roc(ScoreSet(np.array(gen), shifted))) == 0.0


def test_fusion_dominance_gaussian():
    rng = np.random.default_rng(2024)
    wins = []
    margins = []
    for _ in range(30):
        n = 2_000
        # independent per-modality distances, genuine pairs closer on average
        gf, imf = rng.normal(0.8, 0.25, n), rng.normal(1.3, 0.25, n)
        gv, imv = rng.normal(0.9, 0.3, n), rng.normal(1.3, 0.3, n)
        gf, imf, gv, imv = (np.abs(a) for a in (gf, imf, gv, imv))
        e_face = eer(roc(ScoreSet(gf, imf)))
        e_voice = eer(roc(ScoreSet(gv, imv)))
        e_fused = eer(roc(ScoreSet(np.hypot(gf, gv), np.hypot(imf, imv))))
        wins.append(e_fused <= min(e_face, e_voice))
        margins.append(min(e_face, e_voice) - e_fused)
    assert np.mean(margins) > 0
    assert np.mean(wins) > 0.9


def test_histogram_examples():
    h = histogram(ScoreSet(np.array([0.4]), np.array([5.0])))
    assert h.same[0] == 1 and h.same.sum() == 1
    assert h.different[-1] == 1
    assert h.edges.size == 16
    assert h.edges[0] == 0.4 and h.edges[-1] == 1.7
    low = histogram(ScoreSet(np.array([0.0]), np.array([1.0])), bins=2, range=(0.5, 1.5))
    assert low.same.tolist() == [1, 0]
    assert low.different.tolist() == [0, 1]  # left-closed: 1.0 opens the second bin
    with pytest.raises(ValueError):
        histogram(FOUR, bins=0)
    with pytest.raises(ValueError):
        histogram(FOUR, range=(1.0, 1.0))


def test_histogram_uniform_counts():
    rng = np.random.default_rng(5)
    vals = rng.uniform(0.4, 1.7, 15_000)
    h = histogram(ScoreSet(vals, vals[:10]))
    assert h.same.sum() == 15_000
    sd = math.sqrt(15_000 * (1 / 15) * (14 / 15))
    assert np.all(np.abs(h.same - 1_000) < 5 * sd)
    # direct counting oracle
    edges = h.edges
    direct = [int(((vals >= edges[i]) & (vals < edges[i + 1])).sum()) for i in range(15)]
    direct[-1] += int((vals >= edges[-1]).sum())
    assert h.same.tolist() == direct


def test_load_scores(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("label,distance\nsame,1\nsame,2\nsame,3\nsame,4\ndifferent,3\ndifferent,4\ndifferent,5\ndifferent,6\n")
    s = load_scores(p)
    assert eer(roc(s)) == 0.25
    p.write_text("label,distance\nsame,1\nmaybe,2\n")
    with pytest.raises(ParseError) as err:
        load_scores(p)
    assert err.value.line == 3
    p.write_text("label,distance\nsame,-1\n")
    with pytest.raises(ParseError):
        load_scores(p)
    p.write_text("distance,label\n")
    with pytest.raises(ParseError):
        load_scores(p)


def write_embeddings(path, rows, dim, label=True):
    head = "pair_id,side,modality" + (",label" if label else "") + "".join(f",v{i}" for i in range(dim))
    path.write_text(head + "\n" + "\n".join(rows) + "\n")


def test_load_and_score_embeddings(tmp_path):
    p = tmp_path / "e.csv"
    rows = [
        "p1,enroll,face,same,1,0",
        "p1,probe,face,same,1,0",
        "p1,enroll,voice,same,0,2",
        "p1,probe,voice,same,0,3",
        "p2,enroll,face,different,1,0",
        "p2,probe,face,different,0,1",
        "p2,enroll,voice,different,1,0",
        "p2,probe,voice,different,0,5",
    ]
    write_embeddings(p, rows, 2)
    pairs = load_embeddings(p)
    assert np.linalg.norm(pairs["p1"].sides["voice"]["enroll"].values) == pytest.approx(1)
    sets = score_embeddings(pairs)
    assert set(sets) == {"face", "voice", "fusion"}
    assert sets["face"].genuine.tolist() == [0.0]
    assert sets["fusion"].impostor[0] == pytest.approx(2.0)
    assert eer(roc(sets["fusion"])) == 0.0


def test_embedding_file_errors(tmp_path):
    p = tmp_path / "e.csv"
    write_embeddings(p, ["p1,enroll,face,same,1,0", "p1,probe,face,same,1"], 2)
    with pytest.raises(ParseError, match="fields"):
        load_embeddings(p)
    write_embeddings(p, ["p1,enroll,face,same,1,0", "p1,probe,face,same,1,"], 2)
    with pytest.raises(ParseError, match="dimension") as err:
        load_embeddings(p)
    assert err.value.line == 3
    write_embeddings(p, ["p1,sideways,face,same,1,0"], 2)
    with pytest.raises(ParseError, match="side"):
        load_embeddings(p)
    write_embeddings(p, ["p1,enroll,face,1,0"], 2, label=False)
    with pytest.raises(EvaluationError, match="no label"):
        score_embeddings(load_embeddings(p))
    write_embeddings(p, ["p1,enroll,face,same,1,0"], 2)
    with pytest.raises(EvaluationError, match="probe"):
        score_embeddings(load_embeddings(p))
