"""Shape descriptors: centroid-distance signature and log-polar occupancy histogram."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .geometry import Polygon, _as_xy, _canonical_start

GEOMETRIC = "geometric"
VISUAL = "visual"
KINDS = (GEOMETRIC, VISUAL)

_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class DescriptorConfig:
    samples: int = 64
    rings: int = 5
    wedges: int = 16
    inner_radius: float = 0.125
    outer_radius: float = 2.5

    def __post_init__(self):
        if self.samples < 8:
            raise InvalidInputError("samples must be >= 8")
        if self.rings < 2:
            raise InvalidInputError("rings must be >= 2")
        if self.wedges < 4:
            raise InvalidInputError("wedges must be >= 4")
        if not 0 < self.inner_radius < self.outer_radius:
            raise InvalidInputError("need 0 < inner_radius < outer_radius")

    @property
    def ring_edges(self) -> np.ndarray:
        """Ring boundaries; ``rings - 1`` log-spaced edges from inner to outer radius."""
        return np.geomspace(self.inner_radius, self.outer_radius, self.rings - 1)

    def length(self, kind: str) -> int:
        return self.samples if kind == GEOMETRIC else self.rings * self.wedges

    def config_hash(self, kind: str) -> str:
        if kind == GEOMETRIC:
            payload = {"kind": kind, "samples": self.samples}
        elif kind == VISUAL:
            payload = {
                "kind": kind,
                "samples": self.samples,
                "wedges": self.wedges,
                "ring_edges": [float(e) for e in self.ring_edges],
            }
        else:
            raise InvalidInputError(f"unknown descriptor kind {kind!r}")
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "rings": self.rings,
            "wedges": self.wedges,
            "inner_radius": self.inner_radius,
            "outer_radius": self.outer_radius,
        }


@dataclass(frozen=True, eq=False)
class Descriptor:
    values: np.ndarray
    kind: str
    config_hash: str
    rings: int = field(default=1)

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 1 or not np.all(np.isfinite(arr)):
            raise InvalidInputError("descriptor values must be a finite 1-D vector")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Descriptor):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.config_hash == other.config_hash
            and self.rings == other.rings
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def _exact_centered(xy: np.ndarray) -> np.ndarray:
    """Vertices minus the area centroid, each correctly rounded from exact arithmetic.

    Because nothing is rounded before the final division, translating the input
    by any offset that is itself exact in floating point leaves the output
    bit-identical.
    """
    ratios = [v.as_integer_ratio() for v in xy.ravel().tolist()]
    denom = max(q for _, q in ratios)  # all powers of two
    ints = [p * (denom // q) for p, q in ratios]
    xs, ys = ints[0::2], ints[1::2]
    k = len(xs)
    area6 = 0
    num_x = 0
    num_y = 0
    for i in range(k):
        j = (i + 1) % k
        c = xs[i] * ys[j] - xs[j] * ys[i]
        area6 += c
        num_x += (xs[i] + xs[j]) * c
        num_y += (ys[i] + ys[j]) * c
    area6 *= 3
    if area6 <= 0:
        raise InvalidInputError("polygon has zero area")
    scale = area6 * denom
    out = np.empty_like(xy)
    for i in range(k):
        out[i, 0] = (xs[i] * area6 - num_x) / scale
        out[i, 1] = (ys[i] * area6 - num_y) / scale
    return out


def boundary_rms_radius(xy: np.ndarray) -> float:
    """RMS distance to the origin of a point moving uniformly along the closed boundary."""
    p = xy
    d = np.roll(xy, -1, axis=0) - p
    lengths = np.hypot(d[:, 0], d[:, 1])
    per_edge = (
        np.einsum("ij,ij->i", p, p)
        + np.einsum("ij,ij->i", p, d)
        + np.einsum("ij,ij->i", d, d) / 3.0
    )
    return math.sqrt(float(np.dot(lengths, per_edge) / lengths.sum()))


def normalize_pose(poly: Polygon) -> Polygon:
    """Centre on the area centroid and scale to unit boundary RMS radius.

    Rotation is left alone; descriptors handle it through circular alignment.
    """
    centered = _exact_centered(np.asarray(poly.xy))
    out = centered / boundary_rms_radius(centered)
    return Polygon._trusted(_canonical_start(out))


def _start_index(xy: np.ndarray) -> int:
    r = np.hypot(xy[:, 0], xy[:, 1])
    cand = np.flatnonzero(r >= r.max() * (1.0 - _TIE_RTOL))
    angles = np.mod(np.arctan2(xy[cand, 1], xy[cand, 0]), 2 * math.pi)
    return int(cand[np.argmin(angles)])


def boundary_samples(poly: Polygon, n: int) -> np.ndarray:
    """``n`` points equally spaced by arc length, CCW from the farthest vertex.

    The farthest-from-origin vertex starts the walk; near-ties (relative
    1e-9) go to the one with the smallest polar angle in [0, 2pi).
    """
    xy = np.roll(poly.xy, -_start_index(poly.xy), axis=0)
    ring = np.vstack([xy, xy[:1]])
    seg = np.hypot(*np.diff(ring, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = cum[-1] * np.arange(n) / n
    return np.column_stack([np.interp(targets, cum, ring[:, 0]), np.interp(targets, cum, ring[:, 1])])


def geometric_descriptor(poly: Polygon, cfg: DescriptorConfig | None = None) -> Descriptor:
    """Centroid-distance signature of an already pose-normalized polygon."""
    cfg = cfg or DescriptorConfig()
    pts = boundary_samples(poly, cfg.samples)
    return Descriptor(np.hypot(pts[:, 0], pts[:, 1]), GEOMETRIC, cfg.config_hash(GEOMETRIC))


def visual_descriptor(points, cfg: DescriptorConfig | None = None) -> Descriptor:
    """Log-polar occupancy histogram of pose-normalized points.

    Rings are finer near the centre; the innermost ring takes every point
    closer than the first edge and the outermost every point beyond the last.
    Layout is ring-major: entry ``ring * wedges + wedge``.
    """
    cfg = cfg or DescriptorConfig()
    xy = _as_xy(points)
    if len(xy) == 0:
        raise InvalidInputError("visual descriptor needs at least one point")
    r = np.hypot(xy[:, 0], xy[:, 1])
    ring = np.searchsorted(cfg.ring_edges, r, side="right")
    theta = np.mod(np.arctan2(xy[:, 1], xy[:, 0]), 2 * math.pi)
    wedge = np.minimum((theta * cfg.wedges / (2 * math.pi)).astype(np.int64), cfg.wedges - 1)
    counts = np.bincount(ring * cfg.wedges + wedge, minlength=cfg.rings * cfg.wedges)
    return Descriptor(counts / len(xy), VISUAL, cfg.config_hash(VISUAL), rings=cfg.rings)


def describe_normalized(poly: Polygon, kind: str, cfg: DescriptorConfig | None = None) -> Descriptor:
    """Descriptor of the given kind for a polygon already in normalized pose.

    The visual kind histograms the same arc-length boundary samples the
    geometric signature uses.
    """
    cfg = cfg or DescriptorConfig()
    if kind == GEOMETRIC:
        return geometric_descriptor(poly, cfg)
    if kind == VISUAL:
        return visual_descriptor(boundary_samples(poly, cfg.samples), cfg)
    raise InvalidInputError(f"unknown descriptor kind {kind!r}")


def shape_descriptor(poly: Polygon, kind: str, cfg: DescriptorConfig | None = None) -> Descriptor:
    """Pose-normalize, then describe."""
    return describe_normalized(normalize_pose(poly), kind, cfg)

