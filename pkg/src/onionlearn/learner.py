"""Online loop: normalize, describe, compare, then assign or create a template."""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .descriptors import GEOMETRIC, KINDS, Descriptor, DescriptorConfig, normalize_pose, shape_descriptor
from .errors import CannotClassifyError, EmptyLibraryError, InvalidInputError, ObservationError, OnionLearnError
from .geometry import PointSet, Polygon
from .metrics import MetricConfig
from .templates import Embedding, TemplateLibrary, embed

log = logging.getLogger(__name__)

ASSIGNED = "assigned"
CREATED = "created"

TEMPLATE_MODE = "max-template-similarity"
KNN_MODE = "knn-in-template-space"
CLASSIFY_MODES = (TEMPLATE_MODE, KNN_MODE)
_MODE_ALIASES = {"template": TEMPLATE_MODE, "knn": KNN_MODE}


@dataclass(frozen=True)
class LearnerConfig:
    tau: float = 0.8
    descriptor_kind: str = GEOMETRIC
    descriptor_config: DescriptorConfig = field(default_factory=DescriptorConfig)
    metric_config: MetricConfig = field(default_factory=MetricConfig)
    template_update: bool = False
    classify_mode: str = TEMPLATE_MODE
    k: int = 1

    def __post_init__(self):
        object.__setattr__(self, "classify_mode", _MODE_ALIASES.get(self.classify_mode, self.classify_mode))
        if not 0.0 < self.tau < 1.0:
            raise InvalidInputError("tau must lie strictly between 0 and 1")
        if self.descriptor_kind not in KINDS:
            raise InvalidInputError(f"unknown descriptor kind {self.descriptor_kind!r}")
        if self.classify_mode not in CLASSIFY_MODES:
            raise InvalidInputError(f"unknown classify mode {self.classify_mode!r}")
        if self.k < 1:
            raise InvalidInputError("k must be >= 1")

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "descriptor_kind": self.descriptor_kind,
            "descriptor_config": self.descriptor_config.to_dict(),
            "metric_config": self.metric_config.to_dict(),
            "template_update": self.template_update,
            "classify_mode": self.classify_mode,
            "k": self.k,
        }

    @classmethod
    def from_dict(cls, d: dict) -> LearnerConfig:
        return cls(
            tau=d["tau"],
            descriptor_kind=d["descriptor_kind"],
            descriptor_config=DescriptorConfig(**d["descriptor_config"]),
            metric_config=MetricConfig(**d["metric_config"]),
            template_update=d["template_update"],
            classify_mode=d["classify_mode"],
            k=d["k"],
        )

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class Decision:
    kind: str
    category_id: int
    best_similarity: float
    embedding: Embedding


@dataclass(frozen=True, eq=False)
class MemoryRecord:
    observation_id: int
    points: PointSet
    descriptor: Descriptor
    embedding: Embedding
    category_id: int
    decision_kind: str

    def __eq__(self, other) -> bool:
        if not isinstance(other, MemoryRecord):
            return NotImplemented
        return (
            self.observation_id == other.observation_id
            and self.points == other.points
            and self.descriptor == other.descriptor
            and self.embedding == other.embedding
            and self.category_id == other.category_id
            and self.decision_kind == other.decision_kind
        )

    __hash__ = None


class Learner:
    """Single-writer learner state: template library plus append-only memory.

    ``observe`` mutates; ``classify`` and ``describe`` only read. Callers that
    share a learner across threads must serialize ``observe`` against everything
    else.
    """

    def __init__(self, config: LearnerConfig | None = None):
        self.config = config or LearnerConfig()
        self.library = TemplateLibrary(
            self.config.descriptor_kind, self.config.descriptor_config, self.config.metric_config
        )
        self.memory: list[MemoryRecord] = []

    @property
    def next_observation_id(self) -> int:
        return self.memory[-1].observation_id + 1 if self.memory else 0

    def _prepare(self, obs: Polygon) -> tuple[Polygon, Descriptor]:
        if not isinstance(obs, Polygon):
            obs = Polygon(obs)
        normalized = normalize_pose(obs)
        # same path template layers take, so a convex member reproduces its descriptor bit for bit
        desc = shape_descriptor(normalized, self.config.descriptor_kind, self.config.descriptor_config)
        return normalized, desc

    def _embed(self, desc: Descriptor) -> Embedding:
        return embed(desc, self.library, zero_variance="euclidean")

    def observe(self, obs: Polygon, observation_id: int | None = None) -> Decision:
        oid = self.next_observation_id if observation_id is None else observation_id
        if self.memory and oid <= self.memory[-1].observation_id:
            raise InvalidInputError(f"observation ids must increase; got {oid} after {self.memory[-1].observation_id}")
        try:
            normalized, desc = self._prepare(obs)
            if len(self.library) == 0:
                best, best_id, emb = 0.0, -1, None
            else:
                emb = self._embed(desc)
                best_id = int(np.argmax(emb.values))  # first maximum = lowest id
                best = emb.values[best_id]
            points = PointSet(normalized.xy)
            if best_id < 0 or best < self.config.tau:
                template = self.library.build([points], member_ids=[oid])
                self.library = self.library.appended(template)
                emb = self._embed(desc)
                decision = Decision(CREATED, template.id, best, emb)
            else:
                if self.config.template_update:
                    old = self.library[best_id]
                    rebuilt = self.library.build(
                        [old.points, points], member_ids=old.member_ids + (oid,), template_id=best_id
                    )
                    self.library = self.library.replaced(rebuilt)
                decision = Decision(ASSIGNED, best_id, best, emb)
        except OnionLearnError as exc:
            raise ObservationError(oid, exc) from exc
        self.memory.append(MemoryRecord(oid, points, desc, decision.embedding, decision.category_id, decision.kind))
        return decision

    def describe(self, obs: Polygon) -> Embedding:
        if len(self.library) == 0:
            raise EmptyLibraryError("no templates learned yet")
        _, desc = self._prepare(obs)
        return self._embed(desc)

    def classify(self, obs: Polygon) -> list[tuple[int, float]]:
        """Rank every category for ``obs``, best first.

        Template mode scores each category by its embedding entry. kNN mode
        scores by vote share among the ``k`` nearest memory records in
        template space; vote ties go to the category of the nearest neighbour.
        """
        if len(self.library) == 0:
            raise CannotClassifyError("cannot classify before any template exists")
        emb = self.describe(obs)
        if self.config.classify_mode == TEMPLATE_MODE:
            order = sorted(range(len(emb)), key=lambda i: (-emb.values[i], i))
            return [(i, emb.values[i]) for i in order]
        return self._knn_ranking(emb)

    def _knn_ranking(self, emb: Embedding) -> list[tuple[int, float]]:
        size = len(self.library)
        query = emb.padded(size)
        stored = np.array([rec.embedding.padded(size) for rec in self.memory])
        dists = np.sqrt(((stored - query) ** 2).sum(axis=1))
        k = min(self.config.k, len(self.memory))
        nearest = np.argsort(dists, kind="stable")[:k]
        votes: dict[int, int] = {}
        closest: dict[int, int] = {}  # category -> rank of its nearest neighbour
        for rank, idx in enumerate(nearest):
            cat = self.memory[idx].category_id
            votes[cat] = votes.get(cat, 0) + 1
            closest.setdefault(cat, rank)
        ranked = sorted(votes, key=lambda c: (-votes[c], closest[c]))
        out = [(c, votes[c] / k) for c in ranked]
        out += [(c, 0.0) for c in range(size) if c not in votes]
        return out
