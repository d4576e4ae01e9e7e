"""Templates built by onion peeling, template distances and template-space embeddings."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .descriptors import GEOMETRIC, KINDS, Descriptor, DescriptorConfig, shape_descriptor
from .errors import EmptyLibraryError, InvalidInputError, UnusableTemplateError, ZeroVarianceError
from .geometry import LayerStack, PointSet, onion_peel
from .metrics import CORRELATION, EUCLIDEAN, MetricConfig, aligned_distance, similarity

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Template:
    id: int
    layers: LayerStack
    layer_descriptors: tuple[Descriptor, ...]
    member_ids: tuple[int, ...] = ()
    member_count: int = 1

    @property
    def points(self) -> PointSet:
        return self.layers.points()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Template):
            return NotImplemented
        return (
            self.id == other.id
            and self.member_ids == other.member_ids
            and self.member_count == other.member_count
            and self.layers == other.layers
            and self.layer_descriptors == other.layer_descriptors
        )

    __hash__ = None


def layer_weights(n_layers: int) -> np.ndarray:
    """Normalized weights ``2**-i`` for layers ``i = 0..n-1`` (outermost first)."""
    w = 0.5 ** np.arange(n_layers)
    return w / w.sum()


def build_template(
    members: Sequence[PointSet],
    template_id: int,
    kind: str = GEOMETRIC,
    descriptor_config: DescriptorConfig | None = None,
    member_ids: Sequence[int] = (),
) -> Template:
    """Pool member points, peel them, and describe each polygonal layer.

    Pooling is a set union, so the result does not depend on member order.
    Each layer is pose-normalized before it is described.
    """
    if not members:
        raise InvalidInputError("a template needs at least one member")
    if kind not in KINDS:
        raise InvalidInputError(f"unknown descriptor kind {kind!r}")
    cfg = descriptor_config or DescriptorConfig()
    pooled = members[0].union(*members[1:])
    stack = onion_peel(pooled)
    descriptors = tuple(shape_descriptor(layer, kind, cfg) for layer in stack.polygons)
    count = len(member_ids) if member_ids else len(members)
    return Template(template_id, stack, descriptors, tuple(member_ids), count)


def layer_distances(
    desc: Descriptor, template: Template, cfg: MetricConfig | None = None, zero_variance: str = "raise"
) -> list[float]:
    """Aligned distance from ``desc`` to each descriptor layer of ``template``.

    With ``zero_variance="euclidean"``, a correlation comparison involving a
    constant vector is replaced by the euclidean distance for that pair.
    """
    cfg = cfg or MetricConfig()
    out = []
    for i, layer_desc in enumerate(template.layer_descriptors):
        try:
            d, _ = aligned_distance(desc, layer_desc, cfg)
        except ZeroVarianceError:
            if zero_variance != "euclidean" or cfg.metric != CORRELATION:
                raise
            log.info("template %d layer %d: zero variance, falling back to euclidean", template.id, i)
            d, _ = aligned_distance(desc, layer_desc, MetricConfig(EUCLIDEAN, cfg.alignment))
        out.append(d)
    return out


def template_distance(
    desc: Descriptor, template: Template, cfg: MetricConfig | None = None, zero_variance: str = "raise"
) -> float:
    """Layer distances averaged with outermost-dominant weights ``2**-i``."""
    if not template.layer_descriptors:
        raise UnusableTemplateError(f"template {template.id} has no polygonal layer")
    d = np.asarray(layer_distances(desc, template, cfg, zero_variance))
    return float(np.dot(layer_weights(len(d)), d))


@dataclass(frozen=True)
class Embedding:
    values: tuple[float, ...]
    library_version: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def padded(self, size: int) -> np.ndarray:
        """Values extended with zeros up to ``size`` entries."""
        out = np.zeros(size)
        out[: len(self.values)] = self.values
        return out


@dataclass(frozen=True)
class TemplateLibrary:
    kind: str = GEOMETRIC
    descriptor_config: DescriptorConfig = field(default_factory=DescriptorConfig)
    metric_config: MetricConfig = field(default_factory=MetricConfig)
    templates: tuple[Template, ...] = ()

    def __post_init__(self):
        for i, t in enumerate(self.templates):
            if t.id != i:
                raise InvalidInputError(f"template ids must be 0..T-1 in order; slot {i} holds {t.id}")

    def __len__(self) -> int:
        return len(self.templates)

    def __getitem__(self, template_id: int) -> Template:
        return self.templates[template_id]

    @property
    def version(self) -> int:
        return len(self.templates)

    def appended(self, template: Template) -> TemplateLibrary:
        return TemplateLibrary(self.kind, self.descriptor_config, self.metric_config, self.templates + (template,))

    def replaced(self, template: Template) -> TemplateLibrary:
        templates = list(self.templates)
        templates[template.id] = template
        return TemplateLibrary(self.kind, self.descriptor_config, self.metric_config, tuple(templates))

    def build(self, members: Sequence[PointSet], member_ids: Sequence[int] = (), template_id: int | None = None):
        tid = len(self.templates) if template_id is None else template_id
        return build_template(members, tid, self.kind, self.descriptor_config, member_ids)


def embed(desc: Descriptor, library: TemplateLibrary, zero_variance: str = "raise") -> Embedding:
    """Similarity of ``desc`` to every template, in template-id order."""
    if len(library) == 0:
        raise EmptyLibraryError("cannot embed against an empty template library")
    values = [
        similarity(template_distance(desc, t, library.metric_config, zero_variance)) for t in library.templates
    ]
    return Embedding(tuple(values), library.version)
