import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from onionlearn.errors import DatasetFormatError, EvalRequiresLabelsError, StateFormatError
from onionlearn.geometry import PointSet, Polygon, generate_polygon
from onionlearn.harness import evaluation
from onionlearn.harness.cli import main
from onionlearn.harness.dataset import DatasetRecord, generate_records, parse_record, read_records, write_records
from onionlearn.harness.state import dumps_state, load_state, loads_state, save_state
from onionlearn.harness.svg import template_svg
from onionlearn.learner import Learner, LearnerConfig
from onionlearn.templates import build_template

SVG_NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "data.jsonl"
    write_records(generate_records(["triangle", "square", "hexagon"], 10, 0.02, seed=7), path)
    return path


# ---------------------------------------------------------------- datasets


def test_generate_round_trip(dataset):
    lines = dataset.read_text().splitlines()
    assert len(lines) == 30
    records = read_records(dataset)
    assert records == generate_records(["triangle", "square", "hexagon"], 10, 0.02, seed=7)
    assert sorted(r.label for r in records).count("square") == 10
    first = json.loads(lines[0])
    assert list(first) == ["id", "label", "vertices"]


def test_generate_is_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert main(["generate", "--per-family", "10", "--jitter", "0.02", "--seed", "7", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


def test_jitter_free_records_are_valid_regular_polygons():
    for rec in generate_records(["triangle", "square", "pentagon", "octagon"], 5, 0.0, seed=1):
        poly = Polygon(rec.vertices)
        c = poly.xy.mean(axis=0)
        r = np.hypot(*(poly.xy - c).T)
        assert np.allclose(r, r[0], rtol=1e-9)


def test_unknown_family():
    with pytest.raises(ValueError):
        generate_records(["blob"], 1)


@pytest.mark.parametrize(
    "line",
    [
        "{not json",
        '{"label":"x","vertices":[[0,0],[1,0],[0,1]]}',
        '{"id":1,"label":"x"}',
        '{"id":1,"label":"x","vertices":[[0,0],[1,1],[1,0],[0,1]]}',
        '{"id":1,"label":3,"vertices":[[0,0],[1,0],[0,1]]}',
    ],
)
def test_malformed_records(line):
    with pytest.raises(DatasetFormatError):
        parse_record(line, 4)


def test_read_reports_line_number(tmp_path):
    path = tmp_path / "d.jsonl"
    path.write_text('{"id":0,"vertices":[[0,0],[1,0],[0,1]]}\n\n{"id":1,"vertices":[[0,0]]}\n')
    with pytest.raises(DatasetFormatError) as info:
        read_records(path)
    assert info.value.line == 3


def test_duplicate_ids(tmp_path):
    path = tmp_path / "d.jsonl"
    rec = '{"id":0,"vertices":[[0,0],[1,0],[0,1]]}\n'
    path.write_text(rec + rec)
    with pytest.raises(DatasetFormatError, match="duplicate"):
        read_records(path)


def test_unlabelled_record_round_trip():
    rec = DatasetRecord(3, None, ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0)))
    assert rec.to_json() == '{"id":3,"vertices":[[0.0,0.0],[1.0,0.0],[0.0,1.0]]}'
    assert parse_record(rec.to_json()) == rec


# ---------------------------------------------------------------- state files


def _trained(cfg=None, n=12):
    records = generate_records(["triangle", "square", "star"], n // 3, 0.03, seed=2)
    learner, _ = evaluation.learn_records(records, cfg)
    return learner


@pytest.mark.parametrize(
    "cfg",
    [LearnerConfig(), LearnerConfig(tau=0.9, descriptor_kind="visual", template_update=True, classify_mode="knn", k=2)],
)
def test_state_round_trip(cfg):
    learner = _trained(cfg)
    text = dumps_state(learner)
    again = loads_state(text)
    assert again.config == learner.config
    assert again.library == learner.library
    assert again.memory == learner.memory
    assert dumps_state(again) == text


def test_state_rejects_tampering():
    text = dumps_state(_trained())
    header, rest = text.split("\n", 1)
    obj = json.loads(header)
    obj["config"]["tau"] = 0.5
    with pytest.raises(StateFormatError):
        loads_state(json.dumps(obj) + "\n" + rest)
    with pytest.raises(StateFormatError):
        loads_state(text.rsplit("\n", 2)[0] + "\n")
    with pytest.raises(StateFormatError):
        loads_state("")


def test_reloaded_state_classifies_identically(tmp_path):
    learner = _trained()
    save_state(learner, tmp_path / "s.jsonl")
    again = load_state(tmp_path / "s.jsonl")
    probe = generate_polygon("perturbed", 4, 0.02, seed=5)
    assert again.classify(probe) == learner.classify(probe)


# ---------------------------------------------------------------- evaluation


def test_matched_accuracy_and_confusion():
    labels = ["a", "a", "b", "b", "b", "c"]
    cats = [5, 5, 2, 2, 5, 9]
    names, ids, mat = evaluation.confusion_matrix(labels, cats)
    assert names == ["a", "b", "c"] and ids == [2, 5, 9]
    assert mat.tolist() == [[0, 2, 0], [2, 1, 0], [0, 0, 1]]
    assert evaluation.matched_accuracy(mat) == pytest.approx(5 / 6)


def test_matched_accuracy_can_fall_below_majority_baseline():
    # one category per observation: matching can credit at most one per label
    labels = ["a", "a", "a", "b"]
    _, _, mat = evaluation.confusion_matrix(labels, [0, 1, 2, 3])
    assert evaluation.matched_accuracy(mat) == 0.5 < evaluation.majority_baseline(labels) == 0.75


def test_identical_observations_make_one_template():
    poly = generate_polygon("regular", 5)
    records = [DatasetRecord(i, "pentagon", tuple(map(tuple, poly.xy.tolist()))) for i in range(6)]
    rep = evaluation.evaluate_learning(records)
    assert rep.template_count == 1 and rep.accuracy == 1.0


def test_confusion_rows_sum_to_label_counts(dataset):
    records = read_records(dataset)
    for cfg in (LearnerConfig(tau=0.9), LearnerConfig(tau=0.5, descriptor_kind="visual")):
        rep = evaluation.evaluate_learning(records, cfg)
        counts = {name: sum(r.label == name for r in records) for name in rep.labels}
        assert [sum(row) for row in rep.confusion] == [counts[n] for n in rep.labels]
        assert len(rep.template_count_curve) == len(records)


def test_sweep_has_twenty_cells(dataset):
    reports = evaluation.sweep(read_records(dataset))
    assert len(reports) == 20
    cells = {(r.config["metric_config"]["metric"], r.config["descriptor_kind"], r.config["tau"]) for r in reports}
    assert len(cells) == 20


def test_parallel_sweep_matches_serial(dataset):
    records = read_records(dataset)
    serial = evaluation.sweep(records, taus=(0.6, 0.8), metrics=("euclidean",))
    parallel = evaluation.sweep(records, taus=(0.6, 0.8), metrics=("euclidean",), jobs=2)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]


def test_eval_requires_labels():
    rec = DatasetRecord(0, None, ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0)))
    with pytest.raises(EvalRequiresLabelsError):
        evaluation.evaluate_learning([rec])


def test_calibrate_tau_prefers_correct_template_count(dataset):
    tau, reports = evaluation.calibrate_tau(read_records(dataset))
    chosen = reports[list(evaluation.SWEEP_TAUS).index(tau)]
    assert chosen.template_count == 3


# ---------------------------------------------------------------- svg


def _square_template():
    return build_template([PointSet(generate_polygon("regular", 4).xy)], 0)


def test_svg_square_single_closed_path():
    root = ET.fromstring(template_svg(_square_template()))
    paths = root.findall(f"{SVG_NS}path")
    assert len(paths) == 1
    d = paths[0].get("d").split()
    assert d.count("M") == 1 and d.count("L") == 3 and d[-1] == "Z"


def test_svg_layer_count_and_residual_dots():
    pts = np.random.default_rng(0).random((40, 2))
    t = build_template([PointSet(pts)], 0)
    root = ET.fromstring(template_svg(t))
    assert len(root.findall(f"{SVG_NS}path")) == len(t.layers.layers)
    assert len(root.findall(f"{SVG_NS}circle")) == len(t.layers.residual)
    x0, y0, w, h = map(float, root.get("viewBox").split())
    allpts = t.layers.points().xy * (1, -1)
    assert x0 < allpts[:, 0].min() and x0 + w > allpts[:, 0].max()
    assert y0 < allpts[:, 1].min() and y0 + h > allpts[:, 1].max()


# ---------------------------------------------------------------- cli


def test_cli_learn_eval_export(dataset, tmp_path, capsys):
    state = tmp_path / "s.jsonl"
    assert main(["learn", str(dataset), "--out", str(state)]) == 0
    log = state.with_suffix(".decisions.jsonl")
    rows = [json.loads(x) for x in log.read_text().splitlines()]
    assert len(rows) == 30 and set(rows[0]) == {"id", "kind", "category", "best_similarity"}
    assert main(["eval", str(dataset), "--state", str(state), "--json", str(tmp_path / "r.json")]) == 0
    report = json.loads((tmp_path / "r.json").read_text())
    assert report["mode"] == "classify" and report["accuracy"] == 1.0
    svg = tmp_path / "t.svg"
    assert main(["export-svg", "--state", str(state), "--template-id", "0", "--out", str(svg)]) == 0
    ET.parse(svg)
    assert main(["export-svg", "--state", str(state), "--template-id", "99", "--out", str(svg)]) == 1
    assert "no template" in capsys.readouterr().err


def test_cli_classify(dataset, tmp_path):
    state = tmp_path / "s.jsonl"
    main(["learn", str(dataset), "--out", str(state)])
    out = tmp_path / "c.jsonl"
    assert main(["classify", str(dataset), "--state", str(state), "--classify-mode", "knn", "--k", "3", "--out", str(out)]) == 0
    rows = [json.loads(x) for x in out.read_text().splitlines()]
    assert len(rows) == 30 and all(len(r["ranking"]) == 3 for r in rows)


def test_cli_empty_dataset(tmp_path, capsys):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    state = tmp_path / "s.jsonl"
    assert main(["learn", str(empty), "--out", str(state)]) == 0
    assert "no observations" in capsys.readouterr().err
    assert len(load_state(state).library) == 0


def test_cli_single_record(tmp_path):
    one = tmp_path / "one.jsonl"
    one.write_text('{"id":0,"label":"t","vertices":[[0,0],[1,0],[0,1]]}\n')
    state = tmp_path / "s.jsonl"
    assert main(["learn", str(one), "--out", str(state)]) == 0
    learner = load_state(state)
    assert len(learner.library) == 1
    save_state(learner, tmp_path / "again.jsonl")
    assert (tmp_path / "again.jsonl").read_bytes() == state.read_bytes()


def test_cli_malformed_record_halts(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id":0,"vertices":[[0,0],[1,0],[0,1]]}\n{"id":1,"vertices":"x"}\n')
    assert main(["learn", str(bad), "--out", str(tmp_path / "s.jsonl")]) == 1
    assert "line 2" in capsys.readouterr().err
    assert not (tmp_path / "s.jsonl").exists()


def test_cli_eval_without_labels(tmp_path, capsys):
    d = tmp_path / "d.jsonl"
    d.write_text('{"id":0,"vertices":[[0,0],[1,0],[0,1]]}\n')
    assert main(["eval", str(d)]) == 1
    assert "label" in capsys.readouterr().err


def test_cli_sweep_json(dataset, tmp_path):
    out = tmp_path / "sweep.json"
    assert main(["eval", str(dataset), "--sweep", "--json", str(out)]) == 0
    assert len(json.loads(out.read_text())) == 20


def test_cli_calibrate(dataset, capsys):
    assert main(["eval", str(dataset), "--calibrate"]) == 0
    assert "calibrated tau" in capsys.readouterr().out


def test_sweep_accuracy_beats_majority_baseline(dataset):
    records = read_records(dataset)
    baseline = evaluation.majority_baseline([r.label for r in records])
    for rep in evaluation.sweep(records):
        assert rep.accuracy >= baseline, rep.config
