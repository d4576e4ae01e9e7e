"""Distances and similarities between descriptors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .descriptors import Descriptor
from .errors import IncomparableDescriptorsError, InvalidInputError, ZeroVarianceError

EUCLIDEAN = "euclidean"
CORRELATION = "correlation"
METRICS = (EUCLIDEAN, CORRELATION)

NO_ALIGNMENT = "none"
CIRCULAR_SHIFT = "circular-shift"
ALIGNMENTS = (NO_ALIGNMENT, CIRCULAR_SHIFT)
_ALIGNMENT_ALIASES = {"shift": CIRCULAR_SHIFT}

_KERNEL_METRIC = {EUCLIDEAN: _kernels.EUCLIDEAN, CORRELATION: _kernels.CORRELATION}


@dataclass(frozen=True)
class MetricConfig:
    metric: str = EUCLIDEAN
    alignment: str = CIRCULAR_SHIFT

    def __post_init__(self):
        object.__setattr__(self, "alignment", _ALIGNMENT_ALIASES.get(self.alignment, self.alignment))
        if self.metric not in METRICS:
            raise InvalidInputError(f"unknown metric {self.metric!r}")
        if self.alignment not in ALIGNMENTS:
            raise InvalidInputError(f"unknown alignment {self.alignment!r}")

    def to_dict(self) -> dict:
        return {"metric": self.metric, "alignment": self.alignment}


def _check_comparable(a: Descriptor, b: Descriptor) -> None:
    if a.config_hash != b.config_hash or a.kind != b.kind or len(a) != len(b):
        raise IncomparableDescriptorsError(
            f"descriptors from different configurations ({a.config_hash} vs {b.config_hash})"
        )


def euclidean_distance(a: Descriptor, b: Descriptor) -> float:
    _check_comparable(a, b)
    diff = a.values - b.values
    return float(np.sqrt(np.dot(diff, diff)))


def _require_variance(d: Descriptor) -> None:
    if np.ptp(d.values) == 0.0:
        raise ZeroVarianceError("correlation distance is undefined for a constant descriptor")


def _standardized(v: np.ndarray) -> np.ndarray:
    # centred and scaled to unit max-abs, so the norms below cannot underflow
    c = v - v.mean()
    return c / np.max(np.abs(c))


def correlation_distance(a: Descriptor, b: Descriptor) -> float:
    """``1 - pearson(a, b)``, in [0, 2]."""
    _check_comparable(a, b)
    _require_variance(a)
    _require_variance(b)
    ca = _standardized(a.values)
    cb = _standardized(b.values)
    r = np.dot(ca, cb) / np.sqrt(np.dot(ca, ca) * np.dot(cb, cb))
    return float(np.clip(1.0 - r, 0.0, 2.0))


def distance(a: Descriptor, b: Descriptor, metric: str = EUCLIDEAN) -> float:
    if metric == EUCLIDEAN:
        return euclidean_distance(a, b)
    if metric == CORRELATION:
        return correlation_distance(a, b)
    raise InvalidInputError(f"unknown metric {metric!r}")


def aligned_distance(a: Descriptor, b: Descriptor, cfg: MetricConfig | None = None) -> tuple[float, int]:
    """Smallest distance over circular shifts of ``b``, and the shift achieving it.

    Shift ``s`` compares ``a`` with ``b`` rolled left by ``s`` positions; for
    visual descriptors the roll is over wedges and applied to every ring alike.
    Ties go to the smallest shift.
    """
    cfg = cfg or MetricConfig()
    plain = distance(a, b, cfg.metric)
    if cfg.alignment == NO_ALIGNMENT:
        return plain, 0
    rings = a.rings if a.kind == "visual" else 1
    va, vb = a.values, b.values
    if cfg.metric == CORRELATION:
        va, vb = _standardized(va), _standardized(vb)
    dists = _kernels.shift_distances(va, vb, rings, _KERNEL_METRIC[cfg.metric])
    dists[0] = plain  # shift 0 is the plain metric by definition; keeps aligned <= plain exact
    shift = int(np.argmin(dists))
    return float(dists[shift]), shift


def similarity(d: float) -> float:
    """Map a distance to (0, 1]: ``1 / (1 + d)``."""
    if not d >= 0:
        raise InvalidInputError(f"distance must be non-negative, got {d}")
    return 1.0 / (1.0 + d)
