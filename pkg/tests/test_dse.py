import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DATA, family_spec
from oracles import dominated_mask
from tinydse.archmodel import ArchSpec
from tinydse.errors import EvaluationError, ParseError, SpecError
from tinydse.footprint import MB, DEFAULT_SCHEMES, PrecisionScheme
from tinydse.hwcatalog import load_catalog
from tinydse.dse import (
    MODALITIES,
    DesignPoint,
    EvalOptions,
    ResultRow,
    ResultsTable,
    enumerate_space,
    evaluate,
    explore,
    front_candidates,
    load_results,
    metric_value,
    pareto_front,
    pareto_mask,
)

F32 = PrecisionScheme.float32()


def make_point(catalog, blocks=(1, 1), scheme=F32, modality="face", proc="esp32s3"):
    return DesignPoint(family_spec(blocks), scheme, modality, catalog.get("processor", proc))


def test_enumerate_180(archs, catalog):
    pts = enumerate_space(list(archs.values()), DEFAULT_SCHEMES, MODALITIES, catalog.processors)
    assert len(pts) == 180
    assert len({p.name for p in pts}) == 180
    fusion = [p for p in pts if p.modality == "fusion"]
    assert all(p.sensors == {"camera", "microphone"} for p in fusion)
    assert all(p.sensors == {"camera"} for p in pts if p.modality == "face")
    assert all(p.sensors == {"microphone"} for p in pts if p.modality == "voice")


def test_enumerate_single_and_empty(catalog, resnet6):
    assert len(enumerate_space([resnet6], [F32], ["voice"], [catalog.get("processor", "esp32c3")])) == 1
    with pytest.raises(SpecError):
        enumerate_space([], [F32], ["voice"], catalog.processors)


def test_evaluate_face_float_resnet6(catalog, coeffs):
    p = evaluate(make_point(catalog), catalog, coeffs)
    assert p.feasible
    assert p.metrics.param_bytes == 1_518_848
    assert p.metrics.param_bytes / MB == pytest.approx(1.449, abs=1e-3)
    assert p.metrics.peak_bytes == 3_211_264
    assert p.board.flash.capacity_mb == 2
    assert p.board.psram.capacity_mb == 4
    assert p.board.sensor_names == {"camera"}
    assert p.metrics.cost_cents == 352 + 760 + 281 + 57


def test_evaluate_fusion(catalog, coeffs):
    face = evaluate(make_point(catalog, modality="face"), catalog, coeffs)
    fus = evaluate(make_point(catalog, modality="fusion"), catalog, coeffs)
    assert fus.metrics.param_bytes == 2 * face.metrics.param_bytes
    assert fus.metrics.peak_bytes == face.metrics.peak_bytes
    assert fus.metrics.latency_s == face.metrics.latency_s
    assert fus.board.sensor_names == {"camera", "microphone"}
    single = evaluate(make_point(catalog, modality="fusion", proc="esp32c3"), catalog, coeffs)
    assert single.metrics.latency_s == pytest.approx(2 * face.metrics.latency_s)
    summed = evaluate(make_point(catalog, modality="fusion"), catalog, coeffs, options=EvalOptions(fusion_memory="sum"))
    assert summed.metrics.peak_bytes == 2 * face.metrics.peak_bytes


def test_evaluate_infeasible_is_retained(catalog, coeffs):
    p = evaluate(make_point(catalog, blocks=(2, 2, 2, 2)), catalog, coeffs)
    assert not p.feasible
    assert "flash" in p.reason
    assert p.board is None and p.metrics.cost_cents is None
    keep, dropped = front_candidates([p], "cost_cents", "latency_s")
    assert keep == [] and dropped == [p.name]


def test_missing_join_has_no_eer(catalog, coeffs):
    p = evaluate(make_point(catalog), catalog, coeffs, ResultsTable())
    assert p.metrics.eer_pct is None
    assert p.metrics.effective_latency_s == ()
    with pytest.raises(EvaluationError, match="resnet|r11"):
        pareto_front([p], "param_bytes", "eer_pct")
    assert pareto_front([p], "param_bytes", "latency_s") == [p]


def test_join_and_effective_latency(catalog, coeffs):
    pt = make_point(catalog)
    table = ResultsTable({pt.key: ResultRow(12.5, ((1.0, 50.0), (10.0, 0.0), (5.0, 100.0)))})
    p = evaluate(pt, catalog, coeffs, table)
    assert p.metrics.eer_pct == 12.5
    assert p.metrics.effective(1.0) == pytest.approx(2 * p.metrics.latency_s)
    assert p.metrics.effective(10.0) == p.metrics.latency_s
    assert p.metrics.effective(5.0) == float("inf")
    assert metric_value(p, "frr@1") == 50.0
    assert metric_value(p, "effective_latency_s@10") == p.metrics.latency_s


def test_evaluate_is_deterministic(catalog, coeffs):
    a = evaluate(make_point(catalog, modality="fusion"), catalog, coeffs)
    b = evaluate(make_point(catalog, modality="fusion"), catalog, coeffs)
    assert repr(a.metrics) == repr(b.metrics)


def test_feasibility_monotone_under_relaxed_catalog(archs, catalog, coeffs, base_catalog_file):
    tight = load_catalog(base_catalog_file)
    args = (list(archs.values()), DEFAULT_SCHEMES, MODALITIES)
    small = {p.name for p in explore(*args, tight, coeffs) if p.feasible}
    big = {p.name for p in explore(*args, catalog, coeffs) if p.feasible}
    assert small <= big
    assert len(big) > len(small)
    shrunk = {p.name for p in explore(*args, catalog, coeffs, options=EvalOptions(code_size_bytes=0)) if p.feasible}
    assert big <= shrunk


def test_explore_order_independent(archs, catalog, coeffs):
    specs = list(archs.values())
    a = explore(specs, DEFAULT_SCHEMES, MODALITIES, catalog, coeffs)
    b = explore(specs[::-1], DEFAULT_SCHEMES[::-1], MODALITIES[::-1], catalog, coeffs)
    assert [(p.name, repr(p.metrics)) for p in a] == [(p.name, repr(p.metrics)) for p in b]


def test_pareto_examples():
    assert pareto_mask([1, 2, 3], [5, 3, 4]).tolist() == [True, True, False]
    assert pareto_mask([7], [7]).tolist() == [True]
    assert pareto_mask([1, 1, 2], [2, 2, 1]).tolist() == [True, True, True]
    assert pareto_mask([1, 1], [2, 3]).tolist() == [True, False]


def test_pareto_random_1000_vs_oracle():
    rng = np.random.default_rng(42)
    x, y = rng.random(1000), rng.random(1000)
    assert np.array_equal(pareto_mask(x, y), ~dominated_mask(x, y))


coords = st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=1, max_size=40)


@settings(max_examples=300, deadline=None)
@given(coords)
def test_pareto_matches_oracle_with_ties(pts):
    x, y = zip(*pts)
    mask = pareto_mask(x, y)
    assert np.array_equal(mask, ~dominated_mask(x, y))
    # every non-member is dominated by some member
    xs, ys = np.array(x), np.array(y)
    for i in np.flatnonzero(~mask):
        m = mask & (xs <= xs[i]) & (ys <= ys[i]) & ((xs < xs[i]) | (ys < ys[i]))
        assert m.any()


@settings(max_examples=200, deadline=None)
@given(coords, st.integers(0, 39))
def test_pareto_stable_under_duplication(pts, k):
    k %= len(pts)
    x, y = zip(*pts)
    before = {pts[i] for i in np.flatnonzero(pareto_mask(x, y))}
    dup = pts + [pts[k]]
    x2, y2 = zip(*dup)
    after = {dup[i] for i in np.flatnonzero(pareto_mask(x2, y2))}
    assert before == after


@settings(max_examples=200, deadline=None)
@given(coords, st.integers(0, 39), st.integers(0, 1), st.integers(1, 5))
def test_improving_front_member_keeps_it(pts, k, axis, delta):
    x, y = (list(v) for v in zip(*pts))
    members = np.flatnonzero(pareto_mask(x, y))
    i = members[k % members.size]
    (x if axis == 0 else y)[i] -= delta
    assert pareto_mask(x, y)[i]


def test_pareto_front_sorted_and_named(catalog, coeffs, archs):
    pts = explore(list(archs.values()), DEFAULT_SCHEMES, MODALITIES, catalog, coeffs)
    keep, _ = front_candidates(pts, "cost_cents", "latency_s")
    front = pareto_front(keep, "cost_cents", "latency_s")
    xs = [p.metrics.cost_cents for p in front]
    ys = [p.metrics.latency_s for p in front]
    assert xs == sorted(xs)
    assert all(a > b for a, b in zip(ys, ys[1:]))
    assert front[0].modality == "voice"


def test_load_results(tmp_path):
    table = load_results(DATA / "results_synthetic.csv")
    assert len(table) == 90
    row = table.get(("resnet10", "xnor_2_1", "fusion"))
    assert row is not None and 0 <= row.eer_pct <= 100
    assert [f for f, _ in row.frr_at_far_pct] == [1.0, 5.0, 10.0]
    p = tmp_path / "r.csv"
    head = "arch,scheme,modality,eer_pct,frr_at_far_1_pct,frr_at_far_5_pct,frr_at_far_10_pct\n"
    p.write_text(head + "resnet6,xnor2/1,face,10,,,\n")
    assert load_results(p).get(("resnet6", "xnor_2_1", "face")) == ResultRow(10.0, ())
    for bad, line in [
        ("resnet6,float32,face,101,1,1,1\n", 2),
        ("resnet6,float32,face,1,1,1,1\nresnet6,float32,face,2,1,1,1\n", 3),
        ("resnet6,int4,face,1,1,1,1\n", 2),
        ("resnet6,float32,iris,1,1,1,1\n", 2),
        ("resnet6,float32,face,1,1\n", 2),
    ]:
        p.write_text(head + bad)
        with pytest.raises(ParseError) as err:
            load_results(p)
        assert err.value.line == line


def test_design_point_rejects_unknown_modality(catalog):
    with pytest.raises(SpecError):
        DesignPoint(ArchSpec("a", (1,)), F32, "iris", catalog.get("processor", "esp32c3"))
