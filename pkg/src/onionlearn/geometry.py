"""Planar primitives: point sets, polygons, strict convex hulls and convex layers.

Orientation tests treat ``|cross| <= EPS`` as collinear. Callers are expected
to work at unit scale (pose-normalized data), where that tolerance is far
below any meaningful area.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

import numpy as np

from . import _kernels
from .errors import GenerationError, InvalidInputError

EPS = 1e-12

FAMILIES = ("regular", "perturbed", "random-star")
_FAMILY_ALIASES = {
    "regular-n-gon": "regular",
    "perturbed-n-gon": "perturbed",
    "star": "random-star",
}


class Point2(NamedTuple):
    x: float
    y: float


def _as_xy(points) -> np.ndarray:
    if isinstance(points, (PointSet, Polygon)):
        return points.xy
    arr = np.asarray(points, dtype=np.float64)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidInputError(f"expected an (n, 2) array of points, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("point coordinates must be finite")
    return arr


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def _sort_unique(xy: np.ndarray) -> np.ndarray:
    xy = xy + 0.0  # folds -0.0 into 0.0 so exact-equality dedup is consistent
    if len(xy) == 0:
        return xy
    order = np.lexsort((xy[:, 1], xy[:, 0]))
    xy = xy[order]
    keep = np.ones(len(xy), dtype=bool)
    keep[1:] = np.any(xy[1:] != xy[:-1], axis=1)
    return xy[keep]


class PointSet:
    """Unordered, duplicate-free set of 2-D points.

    Points are stored sorted lexicographically (x, then y), so two sets with
    the same members compare equal and have identical arrays.
    """

    __slots__ = ("_xy",)

    def __init__(self, points: Iterable):
        xy = _sort_unique(_as_xy(points))
        if len(xy) == 0:
            raise InvalidInputError("a point set needs at least one point")
        self._xy = _readonly(xy)

    @classmethod
    def _from_sorted(cls, xy: np.ndarray) -> PointSet:
        obj = cls.__new__(cls)
        obj._xy = _readonly(xy.reshape(-1, 2))
        return obj

    @classmethod
    def empty(cls) -> PointSet:
        return cls._from_sorted(np.empty((0, 2)))

    @property
    def xy(self) -> np.ndarray:
        return self._xy

    def union(self, *others: PointSet) -> PointSet:
        stacked = np.vstack([self._xy, *(o.xy for o in others)])
        return PointSet._from_sorted(_sort_unique(stacked))

    def __len__(self) -> int:
        return len(self._xy)

    def __iter__(self):
        return (Point2(x, y) for x, y in self._xy.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return np.array_equal(self._xy, other._xy)

    def __hash__(self) -> int:
        return hash(self._xy.tobytes())

    def __repr__(self) -> str:
        return f"PointSet(n={len(self)})"


def _cross_at(xy: np.ndarray) -> np.ndarray:
    prev = np.roll(xy, 1, axis=0)
    nxt = np.roll(xy, -1, axis=0)
    return (xy[:, 0] - prev[:, 0]) * (nxt[:, 1] - prev[:, 1]) - (xy[:, 1] - prev[:, 1]) * (
        nxt[:, 0] - prev[:, 0]
    )


def _shoelace2(xy: np.ndarray) -> float:
    x, y = xy[:, 0], xy[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _orient(a, b, c):
    v = (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (
        c[..., 0] - a[..., 0]
    )
    return np.where(np.abs(v) <= EPS, 0, np.sign(v))


def _on_segment(a, b, c):
    return (
        (np.minimum(a[..., 0], b[..., 0]) - EPS <= c[..., 0])
        & (c[..., 0] <= np.maximum(a[..., 0], b[..., 0]) + EPS)
        & (np.minimum(a[..., 1], b[..., 1]) - EPS <= c[..., 1])
        & (c[..., 1] <= np.maximum(a[..., 1], b[..., 1]) + EPS)
    )


def is_simple(xy) -> bool:
    """True if no two non-adjacent edges of the closed ring touch or cross."""
    xy = np.asarray(xy, dtype=np.float64)
    k = len(xy)
    if k < 4:
        return True
    i, j = np.triu_indices(k, 2)
    keep = ~((i == 0) & (j == k - 1))
    i, j = i[keep], j[keep]
    if len(i) == 0:
        return True
    nxt = np.roll(xy, -1, axis=0)
    p1, q1, p2, q2 = xy[i], nxt[i], xy[j], nxt[j]
    o1, o2 = _orient(p1, q1, p2), _orient(p1, q1, q2)
    o3, o4 = _orient(p2, q2, p1), _orient(p2, q2, q1)
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    hit |= (o1 == 0) & _on_segment(p1, q1, p2)
    hit |= (o2 == 0) & _on_segment(p1, q1, q2)
    hit |= (o3 == 0) & _on_segment(p2, q2, p1)
    hit |= (o4 == 0) & _on_segment(p2, q2, q1)
    return not bool(np.any(hit))


def _canonical_start(xy: np.ndarray) -> np.ndarray:
    start = int(np.lexsort((xy[:, 1], xy[:, 0]))[0])
    return np.roll(xy, -start, axis=0)


class Polygon:
    """Simple polygon with at least three vertices, stored in canonical form.

    Canonical form is counter-clockwise order starting at the lexicographically
    smallest vertex, so equal polygons have identical vertex arrays. Clockwise
    input is reversed rather than rejected.
    """

    __slots__ = ("_xy",)

    def __init__(self, vertices: Iterable):
        xy = _as_xy(vertices) + 0.0
        if len(xy) < 3:
            raise InvalidInputError(f"a polygon needs at least 3 vertices, got {len(xy)}")
        area2 = _shoelace2(xy)
        if not area2 > EPS:
            if area2 < -EPS:
                xy = xy[::-1]
            else:
                raise InvalidInputError("polygon has zero area")
        if np.any(np.abs(_cross_at(xy)) <= EPS):
            raise InvalidInputError("polygon has repeated or collinear consecutive vertices")
        if not is_simple(xy):
            raise InvalidInputError("polygon is self-intersecting")
        self._xy = _readonly(_canonical_start(xy))

    @classmethod
    def _trusted(cls, xy: np.ndarray) -> Polygon:
        # caller guarantees a CCW strictly convex ring starting at the lex-min vertex
        obj = cls.__new__(cls)
        obj._xy = _readonly(xy)
        return obj

    @property
    def xy(self) -> np.ndarray:
        return self._xy

    @property
    def vertices(self) -> list[Point2]:
        return [Point2(x, y) for x, y in self._xy.tolist()]

    def to_pointset(self) -> PointSet:
        return PointSet(self._xy)

    def is_convex(self) -> bool:
        return bool(np.all(_cross_at(self._xy) > EPS))

    def __len__(self) -> int:
        return len(self._xy)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polygon):
            return NotImplemented
        return np.array_equal(self._xy, other._xy)

    def __hash__(self) -> int:
        return hash(self._xy.tobytes())

    def __repr__(self) -> str:
        return f"Polygon(k={len(self)})"


@dataclass(frozen=True)
class DegenerateHull:
    """Hull of fewer than three points or of a collinear set: its extreme points."""

    points: tuple[Point2, ...]

    @property
    def xy(self) -> np.ndarray:
        return np.array(self.points, dtype=np.float64).reshape(-1, 2)

    def __len__(self) -> int:
        return len(self.points)


Layer = Union[Polygon, DegenerateHull]


@dataclass(frozen=True, eq=False)
class LayerStack:
    """Convex layers of a point set, outermost first, plus the unpeeled residual."""

    layers: tuple[Layer, ...]
    residual: PointSet

    @property
    def polygons(self) -> list[Polygon]:
        return [layer for layer in self.layers if isinstance(layer, Polygon)]

    def points(self) -> PointSet:
        parts = [layer.xy for layer in self.layers] + [self.residual.xy]
        return PointSet._from_sorted(_sort_unique(np.vstack(parts)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LayerStack):
            return NotImplemented
        return self.layers == other.layers and self.residual == other.residual

    def __len__(self) -> int:
        return len(self.layers)


def _as_pointset(points) -> PointSet:
    return points if isinstance(points, PointSet) else PointSet(points)


def _layer_from(xy: np.ndarray) -> Layer:
    if len(xy) >= 3:
        return Polygon._trusted(xy)
    return DegenerateHull(tuple(Point2(x, y) for x, y in xy.tolist()))


def convex_hull(points) -> Layer:
    """Strict convex hull (collinear boundary points are not vertices).

    Returns a Polygon whose vertices run counter-clockwise from the
    lexicographically smallest one, or a DegenerateHull holding the extreme
    points when fewer than three points are given or all are collinear.
    """
    ps = _as_pointset(points)
    idx = _kernels.hull_indices(ps.xy, EPS)
    return _layer_from(ps.xy[idx])


def onion_peel(points) -> LayerStack:
    ps = _as_pointset(points)
    xy = ps.xy
    layers = _kernels.peel_layers(xy, EPS)
    used = np.zeros(len(xy), dtype=bool)
    for layer in layers:
        used[layer] = True
    return LayerStack(
        layers=tuple(_layer_from(xy[layer]) for layer in layers),
        residual=PointSet._from_sorted(xy[~used]),
    )


def signed_area(poly: Polygon) -> float:
    return 0.5 * _shoelace2(poly.xy)


def centroid(poly: Polygon) -> Point2:
    xy = poly.xy
    x, y = xy[:, 0], xy[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    six_area = 3.0 * cross.sum()
    return Point2(float(np.dot(x + xn, cross) / six_area), float(np.dot(y + yn, cross) / six_area))


def regular_vertices(n: int, rotation: float = 0.0, scale: float = 1.0) -> np.ndarray:
    """Vertices of a regular n-gon centred at the origin; the first sits at 90° + rotation."""
    angles = math.pi / 2 + rotation + 2 * math.pi * np.arange(n) / n
    return scale * np.column_stack([np.cos(angles), np.sin(angles)])


def generate_polygon(
    family: str,
    n: int,
    jitter: float = 0.0,
    rotation: float = 0.0,
    scale: float = 1.0,
    seed: int = 0,
    max_retries: int = 100,
) -> Polygon:
    """Synthesize a polygon deterministically from ``seed``.

    ``regular`` ignores ``jitter``. ``perturbed`` moves each regular vertex
    radially and tangentially by uniform noise of amplitude ``jitter * scale``.
    ``random-star`` draws ``n`` sorted angles and radii in ``[0.5, 1] * scale``.
    Invalid draws are regenerated from a derived sub-seed.
    """
    family = _FAMILY_ALIASES.get(family, family)
    if family not in FAMILIES:
        raise InvalidInputError(f"unknown polygon family {family!r}")
    if n < 3:
        raise InvalidInputError("n must be at least 3")
    if not 0.0 <= jitter < 0.5:
        raise InvalidInputError("jitter must lie in [0, 0.5)")
    if not scale > 0 or not math.isfinite(scale) or not math.isfinite(rotation):
        raise InvalidInputError("scale must be positive and finite, rotation finite")

    last_error = None
    for attempt in range(max_retries):
        rng = np.random.default_rng([seed, attempt])
        if family == "regular":
            xy = regular_vertices(n, rotation, scale)
        elif family == "perturbed":
            angles = math.pi / 2 + rotation + 2 * math.pi * np.arange(n) / n
            amp = jitter * scale
            radial = scale + rng.uniform(-amp, amp, n)
            tangential = rng.uniform(-amp, amp, n)
            c, s = np.cos(angles), np.sin(angles)
            xy = np.column_stack([radial * c - tangential * s, radial * s + tangential * c])
        else:
            angles = np.sort(rng.uniform(0.0, 2 * math.pi, n)) + rotation
            radii = scale * rng.uniform(0.5, 1.0, n)
            xy = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
        try:
            return Polygon(xy)
        except InvalidInputError as exc:
            last_error = exc
    raise GenerationError(
        f"could not generate a valid {family} polygon (n={n}) in {max_retries} attempts: {last_error}"
    )
