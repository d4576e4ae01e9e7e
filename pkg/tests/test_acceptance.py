"""End-to-end acceptance checks, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v``; a PASS/FAIL summary line per
criterion is printed at the end of the session.
"""

import itertools
import math
import time

import numpy as np
import pytest

from onionlearn.descriptors import GEOMETRIC, VISUAL, Descriptor, DescriptorConfig, normalize_pose, shape_descriptor
from onionlearn.geometry import Polygon, PointSet, convex_hull, generate_polygon, onion_peel
from onionlearn.harness import evaluation
from onionlearn.harness.cli import main
from onionlearn.harness.dataset import generate_records
from onionlearn.harness.state import dumps_state, load_state, loads_state
from onionlearn.learner import LearnerConfig
from onionlearn.metrics import CORRELATION, EUCLIDEAN, MetricConfig, aligned_distance, correlation_distance, distance
from oracles import brute_hull_vertices, brute_layers, min_over_shifts

pytestmark = pytest.mark.acceptance

FAMILIES = ["triangle", "square", "hexagon"]
TRAIN_SEED = 11
HELDOUT_SEED = 12


def as_set(xy):
    return {tuple(p) for p in np.asarray(xy).tolist()}


def test_hull_oracle_equivalence(criterion):
    with criterion(1, "hull matches brute-force oracle on 1000 sets"):
        rng = np.random.default_rng(1)
        sets = [rng.random((int(rng.integers(3, 13)), 2)) for _ in range(1000)]
        t0 = time.perf_counter()
        hulls = [convex_hull(pts) for pts in sets]
        elapsed = time.perf_counter() - t0
        mismatches = sum(as_set(h.xy) != brute_hull_vertices(p) for h, p in zip(hulls, sets))
        assert mismatches == 0, f"{mismatches}/1000 mismatches"
        assert elapsed < 5.0, f"{elapsed:.2f}s"


def test_onion_peel_partition(criterion):
    with criterion(2, "onion peel partitions 200 sets into brute-force layers"):
        rng = np.random.default_rng(2)
        sets = [rng.random((int(rng.integers(1, 101)), 2)) for _ in range(200)]
        t0 = time.perf_counter()
        stacks = [onion_peel(pts) for pts in sets]
        elapsed = time.perf_counter() - t0
        failures = 0
        for pts, stack in zip(sets, stacks):
            layers = [as_set(layer.xy) for layer in stack.layers]
            union = set().union(*layers, as_set(stack.residual.xy))
            disjoint = sum(map(len, layers)) + len(stack.residual) == len(union)
            expected_layers, expected_residual = brute_layers(pts)
            ok = (
                disjoint
                and union == as_set(pts)
                and stack.points() == PointSet(pts)
                and layers == expected_layers
                and as_set(stack.residual.xy) == expected_residual
            )
            failures += not ok
        assert failures == 0, f"{failures}/200 failures"
        assert elapsed < 10.0, f"{elapsed:.2f}s"


def _random_polygons(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        family = ("random-star", "perturbed")[i % 2]
        n = int(rng.integers(3, 13))
        jitter = 0.05 if family == "perturbed" else 0.0
        out.append(generate_polygon(family, n, jitter, float(rng.uniform(0, 2 * math.pi)), float(rng.uniform(0.2, 5)), seed=i))
    return out


def test_descriptor_invariances(criterion):
    with criterion(3, "descriptor translation, scale, rotation and mass invariances"):
        cfg = DescriptorConfig()
        step = 2 * math.pi / cfg.samples
        rng = np.random.default_rng(3)
        metric = MetricConfig(EUCLIDEAN)
        bad = {"translation": 0, "scale": 0, "rotation": 0, "mass": 0}
        for poly in _random_polygons(100, 30):
            # grid-aligned coordinates so the offsets below are exact in floating point
            q = Polygon(np.round(poly.xy * 2**20) / 2**20)
            offset = rng.integers(-2**20, 2**20, size=2) / 2**10
            moved = Polygon(q.xy + offset)
            for kind in (GEOMETRIC, VISUAL):
                if shape_descriptor(q, kind) != shape_descriptor(moved, kind):
                    bad["translation"] += 1

            factor = float(rng.uniform(0.01, 100))
            for kind in (GEOMETRIC, VISUAL):
                a = shape_descriptor(poly, kind).values
                b = shape_descriptor(Polygon(poly.xy * factor), kind).values
                if not np.allclose(a, b, rtol=0, atol=1e-9):
                    bad["scale"] += 1

            k = int(rng.integers(1, cfg.samples))
            c, s = math.cos(k * step), math.sin(k * step)
            rotated = Polygon(poly.xy @ np.array([[c, s], [-s, c]]))
            d, _ = aligned_distance(shape_descriptor(poly, GEOMETRIC), shape_descriptor(rotated, GEOMETRIC), metric)
            if not d < 1e-6:
                bad["rotation"] += 1

            if abs(shape_descriptor(poly, VISUAL).values.sum() - 1.0) > 1e-12:
                bad["mass"] += 1
        assert not any(bad.values()), bad


def _random_pair(rng, kind):
    cfg = DescriptorConfig()
    h = cfg.config_hash(kind)
    length = cfg.length(kind)
    rings = cfg.rings if kind == VISUAL else 1
    scale = 10.0 ** rng.uniform(-3, 3)
    a = Descriptor(rng.normal(size=length) * scale, kind, h, rings)
    b = Descriptor(rng.normal(size=length) * scale + rng.normal() * scale, kind, h, rings)
    return a, b


def test_metric_contracts(criterion):
    with criterion(4, "metric symmetry, identity, alignment, range and affine invariance"):
        rng = np.random.default_rng(4)
        bad = {"symmetry": 0, "identity": 0, "aligned": 0, "range": 0, "affine": 0}
        for i in range(1000):
            kind = (GEOMETRIC, VISUAL)[i % 2]
            a, b = _random_pair(rng, kind)
            for metric in (EUCLIDEAN, CORRELATION):
                if distance(a, b, metric) != distance(b, a, metric):
                    bad["symmetry"] += 1
                if distance(a, a, metric) != 0.0 or aligned_distance(a, a, MetricConfig(metric))[0] != 0.0:
                    bad["identity"] += 1
                if aligned_distance(a, b, MetricConfig(metric))[0] > distance(a, b, metric):
                    bad["aligned"] += 1
            dc = correlation_distance(a, b)
            if not 0.0 <= dc <= 2.0:
                bad["range"] += 1
            alpha, beta = 10.0 ** rng.uniform(-3, 3), rng.normal() * 100
            a2 = Descriptor(a.values * alpha + beta, kind, a.config_hash, a.rings)
            if abs(correlation_distance(a2, b) - dc) > 1e-9:
                bad["affine"] += 1
        assert not any(bad.values()), bad


def _separation_run():
    train = generate_records(FAMILIES, 20, 0.02, seed=TRAIN_SEED)
    heldout = generate_records(FAMILIES, 10, 0.02, seed=HELDOUT_SEED)
    tau, _ = evaluation.calibrate_tau(train)
    cfg = LearnerConfig(tau=tau)
    learner, _ = evaluation.learn_records(train, cfg)
    return train, heldout, cfg, learner


def test_clean_separation(criterion):
    with criterion(5, "three families give three templates and held-out accuracy >= 0.95"):
        t0 = time.perf_counter()
        train, heldout, cfg, learner = _separation_run()
        report = evaluation.evaluate_classification(heldout, learner)
        elapsed = time.perf_counter() - t0
        assert len(learner.library) == 3, f"{len(learner.library)} templates at tau={cfg.tau}"
        assert report.n_observations == 30
        assert report.accuracy >= 0.95, f"accuracy {report.accuracy}"

        # audit with an independent shift search: every cross-family pair of
        # training observations is dissimilar at the calibrated tau, so no
        # template can absorb two families
        descs = [shape_descriptor(normalize_pose(r.polygon), GEOMETRIC).values for r in train]
        worst = 0.0
        for (ra, da), (rb, db) in itertools.combinations(zip(train, descs), 2):
            if ra.label != rb.label:
                d, _ = min_over_shifts(da, db, "euclidean")
                worst = max(worst, 1 / (1 + d))
        assert worst < cfg.tau, f"cross-family similarity {worst:.4f} >= tau {cfg.tau}"
        assert elapsed < 10.0, f"{elapsed:.2f}s"


def _jitter_free(tau):
    records = generate_records(FAMILIES, 20, 0.0, seed=TRAIN_SEED)
    learner, _ = evaluation.learn_records(records, LearnerConfig(tau=tau))
    return records, learner


def test_tau_extremes(criterion):
    with criterion(6, "tau 0.99 keeps families apart; tau 0.01 gives one template"):
        records, high = _jitter_free(0.99)
        assert len(high.library) >= 3
        labels_by_template = {}
        for rec, mem in zip(records, high.memory):
            labels_by_template.setdefault(mem.category_id, set()).add(rec.label)
        mixed = {t: ls for t, ls in labels_by_template.items() if len(ls) > 1}
        assert not mixed, f"templates mixing families: {mixed}"
        _, low = _jitter_free(0.01)
        assert len(low.library) == 1


def test_monotone_refinement(criterion):
    with criterion(7, "template count never decreases and embeddings track library size"):
        learners = [_separation_run()[3], _jitter_free(0.99)[1], _jitter_free(0.01)[1]]
        violations = 0
        for learner in learners:
            curve = [size for _, size in evaluation.template_count_curve(learner)]
            violations += sum(b < a for a, b in zip(curve, curve[1:]))
            violations += sum(len(m.embedding) != size for m, size in zip(learner.memory, curve))
            # the library only grows by one per created template, so the size at
            # record i is the number of distinct categories seen so far
            seen = set()
            for m, size in zip(learner.memory, curve):
                seen.add(m.category_id)
                violations += len(seen) != size
        assert violations == 0, f"{violations} violations"


def _pipeline(root):
    data, state, report = root / "data.jsonl", root / "state.jsonl", root / "report.json"
    assert main(["generate", "--families", ",".join(FAMILIES), "--per-family", "20", "--jitter", "0.02", "--seed", "5", "--out", str(data)]) == 0
    assert main(["learn", str(data), "--out", str(state)]) == 0
    assert main(["eval", str(data), "--json", str(report)]) == 0
    return [p.read_bytes() for p in (data, state, state.with_suffix(".decisions.jsonl"), report)], state


def test_determinism_and_round_trip(criterion, tmp_path):
    with criterion(8, "repeated runs are byte-identical and state round-trips"):
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        first, state = _pipeline(tmp_path / "a")
        second, _ = _pipeline(tmp_path / "b")
        names = ["dataset", "state", "decision log", "report"]
        differing = [n for n, x, y in zip(names, first, second) if x != y]
        assert not differing, f"differs between runs: {differing}"
        learner = load_state(state)
        again = loads_state(dumps_state(learner))
        assert again.config == learner.config
        assert again.library == learner.library
        assert again.memory == learner.memory
