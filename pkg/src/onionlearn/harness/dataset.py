"""Line-delimited polygon datasets and their synthetic generation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..errors import DatasetFormatError, GenerationError, InvalidInputError
from ..geometry import Polygon, generate_polygon

# family name -> (generator family, vertex count)
FAMILIES = {
    "triangle": ("perturbed", 3),
    "square": ("perturbed", 4),
    "pentagon": ("perturbed", 5),
    "hexagon": ("perturbed", 6),
    "heptagon": ("perturbed", 7),
    "octagon": ("perturbed", 8),
    "star": ("random-star", 8),
}


@dataclass(frozen=True)
class DatasetRecord:
    id: int
    label: str | None
    vertices: tuple[tuple[float, float], ...]

    @property
    def polygon(self) -> Polygon:
        return Polygon(self.vertices)

    def to_json(self) -> str:
        obj = {"id": self.id, "label": self.label, "vertices": [list(v) for v in self.vertices]}
        if self.label is None:
            del obj["label"]
        return json.dumps(obj, separators=(",", ":"))


def generate_records(
    families: Sequence[str],
    per_family: int,
    jitter: float = 0.02,
    seed: int = 0,
    shuffle: bool = True,
    random_pose: bool = True,
) -> list[DatasetRecord]:
    """Draw ``per_family`` polygons of each family, deterministically in ``seed``.

    With ``random_pose`` every polygon gets a uniform rotation, a scale in
    [0.5, 2] and a translation in [-5, 5]^2. Ids follow the final order.
    """
    rng = np.random.default_rng(seed)
    drawn = []
    for name in families:
        if name not in FAMILIES:
            raise InvalidInputError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
        family, n = FAMILIES[name]
        if family == "perturbed" and jitter == 0:
            family = "regular"
        for _ in range(per_family):
            if random_pose:
                rotation = float(rng.uniform(0.0, 2 * math.pi))
                scale = float(rng.uniform(0.5, 2.0))
                offset = rng.uniform(-5.0, 5.0, 2)
            else:
                rotation, scale, offset = 0.0, 1.0, np.zeros(2)
            sub_seed = int(rng.integers(2**31))
            try:
                poly = generate_polygon(family, n, jitter, rotation, scale, sub_seed)
            except GenerationError as exc:
                raise GenerationError(f"family {name!r}: {exc}") from exc
            xy = poly.xy + offset
            drawn.append((name, tuple(map(tuple, xy.tolist()))))
    if shuffle:
        drawn = [drawn[i] for i in rng.permutation(len(drawn))]
    return [DatasetRecord(i, label, verts) for i, (label, verts) in enumerate(drawn)]


def write_records(records: Iterable[DatasetRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def parse_record(line: str, lineno: int | None = None) -> DatasetRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"invalid JSON ({exc.msg})", lineno) from None
    if not isinstance(obj, dict):
        raise DatasetFormatError("record must be a JSON object", lineno)
    rid = obj.get("id")
    if not isinstance(rid, int) or isinstance(rid, bool):
        raise DatasetFormatError("field 'id' must be an integer", lineno)
    label = obj.get("label")
    if label is not None and not isinstance(label, str):
        raise DatasetFormatError("field 'label' must be a string", lineno)
    verts = obj.get("vertices")
    if not isinstance(verts, list):
        raise DatasetFormatError("field 'vertices' must be a list of [x, y] pairs", lineno)
    try:
        pairs = tuple((float(x), float(y)) for x, y in verts)
        Polygon(pairs)
    except (TypeError, ValueError) as exc:
        raise DatasetFormatError(f"bad vertices: {exc}", lineno) from None
    return DatasetRecord(rid, label, pairs)


def read_records(path: str | Path) -> list[DatasetRecord]:
    """Parse a dataset file; blank lines are skipped, anything malformed halts."""
    records = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            rec = parse_record(line, lineno)
            if rec.id in seen:
                raise DatasetFormatError(f"duplicate id {rec.id}", lineno)
            seen.add(rec.id)
            records.append(rec)
    return records
