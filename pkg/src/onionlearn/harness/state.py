"""Learner state files.

Layout, one JSON object per line:

* a header with ``format``, ``format_version``, ``config_hash``, the full
  learner config and the template/record counts;
* one ``template`` line per template, in id order;
* one ``record`` line per memory record, in observation order.

Floats are written with ``repr`` precision, so load followed by dump
reproduces the file byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..descriptors import Descriptor
from ..errors import StateFormatError
from ..geometry import DegenerateHull, LayerStack, Point2, PointSet, Polygon
from ..learner import Learner, LearnerConfig, MemoryRecord
from ..templates import Embedding, Template, TemplateLibrary

FORMAT = "onionlearn-state"
FORMAT_VERSION = 1


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def _template_obj(t: Template) -> dict:
    return {
        "type": "template",
        "id": t.id,
        "member_ids": list(t.member_ids),
        "member_count": t.member_count,
        "layers": [layer.xy.tolist() for layer in t.layers.layers],
        "residual": t.layers.residual.xy.tolist(),
        "descriptors": [d.values.tolist() for d in t.layer_descriptors],
    }


def _record_obj(r: MemoryRecord) -> dict:
    return {
        "type": "record",
        "observation_id": r.observation_id,
        "category_id": r.category_id,
        "decision_kind": r.decision_kind,
        "points": r.points.xy.tolist(),
        "descriptor": r.descriptor.values.tolist(),
        "embedding": list(r.embedding.values),
        "library_version": r.embedding.library_version,
    }


def dumps_state(learner: Learner) -> str:
    cfg = learner.config
    header = {
        "format": FORMAT,
        "format_version": FORMAT_VERSION,
        "config_hash": cfg.config_hash(),
        "config": cfg.to_dict(),
        "templates": len(learner.library),
        "records": len(learner.memory),
    }
    lines = [_dumps(header)]
    lines += [_dumps(_template_obj(t)) for t in learner.library.templates]
    lines += [_dumps(_record_obj(r)) for r in learner.memory]
    return "\n".join(lines) + "\n"


def save_state(learner: Learner, path: str | Path) -> None:
    Path(path).write_text(dumps_state(learner), encoding="utf-8")


def _layer(xy) -> Polygon | DegenerateHull:
    arr = np.array(xy, dtype=np.float64).reshape(-1, 2)
    if len(arr) >= 3:
        return Polygon._trusted(arr)
    return DegenerateHull(tuple(Point2(x, y) for x, y in arr.tolist()))


def loads_state(text: str) -> Learner:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise StateFormatError("empty state file")
    try:
        objs = [json.loads(ln) for ln in lines]
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"invalid JSON in state file: {exc.msg}") from None
    header, body = objs[0], objs[1:]
    if header.get("format") != FORMAT:
        raise StateFormatError("not an onionlearn state file")
    if header.get("format_version") != FORMAT_VERSION:
        raise StateFormatError(f"unsupported state format version {header.get('format_version')}")
    cfg = LearnerConfig.from_dict(header["config"])
    if cfg.config_hash() != header.get("config_hash"):
        raise StateFormatError("config hash does not match the stored config")
    kind = cfg.descriptor_kind
    dcfg = cfg.descriptor_config
    chash = dcfg.config_hash(kind)
    rings = dcfg.rings if kind == "visual" else 1

    def desc(values) -> Descriptor:
        if len(values) != dcfg.length(kind):
            raise StateFormatError("descriptor length does not match the stored config")
        return Descriptor(np.array(values, dtype=np.float64), kind, chash, rings)

    templates, records = [], []
    for obj in body:
        if obj.get("type") == "template":
            stack = LayerStack(
                tuple(_layer(xy) for xy in obj["layers"]),
                PointSet._from_sorted(np.array(obj["residual"], dtype=np.float64)),
            )
            templates.append(
                Template(
                    obj["id"],
                    stack,
                    tuple(desc(v) for v in obj["descriptors"]),
                    tuple(obj["member_ids"]),
                    obj["member_count"],
                )
            )
        elif obj.get("type") == "record":
            records.append(
                MemoryRecord(
                    obj["observation_id"],
                    PointSet._from_sorted(np.array(obj["points"], dtype=np.float64)),
                    desc(obj["descriptor"]),
                    Embedding(tuple(obj["embedding"]), obj["library_version"]),
                    obj["category_id"],
                    obj["decision_kind"],
                )
            )
        else:
            raise StateFormatError(f"unknown state line type {obj.get('type')!r}")
    if len(templates) != header.get("templates") or len(records) != header.get("records"):
        raise StateFormatError("state file is truncated or has extra lines")

    learner = Learner(cfg)
    learner.library = TemplateLibrary(kind, dcfg, cfg.metric_config, tuple(templates))
    learner.memory = records
    return learner


def load_state(path: str | Path) -> Learner:
    return loads_state(Path(path).read_text(encoding="utf-8"))
