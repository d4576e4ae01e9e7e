"""Scoring discovered categories against ground-truth labels."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..errors import EvalRequiresLabelsError
from ..learner import Learner, LearnerConfig
from ..metrics import MetricConfig
from .dataset import DatasetRecord

SWEEP_TAUS = (0.5, 0.6, 0.7, 0.8, 0.9)
SWEEP_METRICS = ("euclidean", "correlation")
SWEEP_DESCRIPTORS = ("geometric", "visual")


def confusion_matrix(labels: Sequence[str], categories: Sequence[int]):
    """Counts of each (label, category) pair; rows and columns sorted."""
    label_names = sorted(set(labels))
    cat_ids = sorted(set(categories))
    li = {name: i for i, name in enumerate(label_names)}
    ci = {c: j for j, c in enumerate(cat_ids)}
    mat = np.zeros((len(label_names), len(cat_ids)), dtype=np.int64)
    for lab, cat in zip(labels, categories):
        mat[li[lab], ci[cat]] += 1
    return label_names, cat_ids, mat


def matched_accuracy(mat: np.ndarray) -> float:
    """Accuracy under the best one-to-one label/category matching."""
    total = mat.sum()
    if total == 0:
        return 0.0
    rows, cols = linear_sum_assignment(mat, maximize=True)
    return float(mat[rows, cols].sum() / total)


def majority_baseline(labels: Sequence[str]) -> float:
    if not labels:
        return 0.0
    _, counts = np.unique(np.asarray(labels), return_counts=True)
    return float(counts.max() / len(labels))


@dataclass
class EvalReport:
    accuracy: float
    labels: list[str]
    categories: list[int]
    confusion: list[list[int]]
    template_count_curve: list[tuple[int, int]]
    config: dict
    mode: str = "learn"
    n_observations: int = 0
    template_count: int = 0
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "accuracy": self.accuracy,
            "n_observations": self.n_observations,
            "template_count": self.template_count,
            "labels": self.labels,
            "categories": self.categories,
            "confusion": self.confusion,
            "template_count_curve": [list(p) for p in self.template_count_curve],
            "config": self.config,
            **self.extras,
        }

    def to_text(self) -> str:
        c = self.config
        head = (
            f"[{self.mode}] tau={c['tau']} metric={c['metric_config']['metric']} "
            f"descriptor={c['descriptor_kind']} alignment={c['metric_config']['alignment']}"
        )
        lines = [
            head,
            f"  observations={self.n_observations} templates={self.template_count} "
            f"matched accuracy={self.accuracy:.4f}",
        ]
        width = max([len(s) for s in self.labels] + [5])
        lines.append("  " + " " * width + " " + " ".join(f"{c:>4d}" for c in self.categories))
        for name, row in zip(self.labels, self.confusion):
            lines.append(f"  {name:>{width}} " + " ".join(f"{v:>4d}" for v in row))
        return "\n".join(lines)


def _require_labels(records: Sequence[DatasetRecord]) -> list[str]:
    missing = [r.id for r in records if r.label is None]
    if missing:
        raise EvalRequiresLabelsError(f"evaluation needs a label on every record; missing for ids {missing[:5]}")
    return [r.label for r in records]


def template_count_curve(learner: Learner) -> list[tuple[int, int]]:
    """(observation index, library size after it) for every memory record."""
    return [(i, rec.embedding.library_version) for i, rec in enumerate(learner.memory)]


def _report(labels, cats, learner, mode, extras=None) -> EvalReport:
    names, cat_ids, mat = confusion_matrix(labels, cats)
    return EvalReport(
        accuracy=matched_accuracy(mat),
        labels=names,
        categories=cat_ids,
        confusion=mat.tolist(),
        template_count_curve=template_count_curve(learner),
        config=learner.config.to_dict(),
        mode=mode,
        n_observations=len(labels),
        template_count=len(learner.library),
        extras=extras or {},
    )


def learn_records(records: Sequence[DatasetRecord], config: LearnerConfig | None = None):
    """Stream ``records`` through a fresh learner; returns it and its decisions."""
    learner = Learner(config)
    decisions = [learner.observe(rec.polygon) for rec in records]
    return learner, decisions


def evaluate_learning(records: Sequence[DatasetRecord], config: LearnerConfig | None = None) -> EvalReport:
    labels = _require_labels(records)
    learner, decisions = learn_records(records, config)
    return _report(labels, [d.category_id for d in decisions], learner, "learn")


def evaluate_classification(records: Sequence[DatasetRecord], learner: Learner) -> EvalReport:
    """Top-1 classification of ``records`` against an already trained learner."""
    labels = _require_labels(records)
    cats = [learner.classify(rec.polygon)[0][0] for rec in records]
    return _report(labels, cats, learner, "classify")


def sweep_configs(
    base: LearnerConfig | None = None,
    taus: Sequence[float] = SWEEP_TAUS,
    metrics: Sequence[str] = SWEEP_METRICS,
    descriptors: Sequence[str] = SWEEP_DESCRIPTORS,
) -> list[LearnerConfig]:
    base = base or LearnerConfig()
    return [
        replace(base, tau=tau, descriptor_kind=kind, metric_config=MetricConfig(metric, base.metric_config.alignment))
        for metric, kind, tau in itertools.product(metrics, descriptors, taus)
    ]


def _eval_cell(args):
    records, cfg = args
    return evaluate_learning(records, cfg)


def sweep(
    records: Sequence[DatasetRecord],
    base: LearnerConfig | None = None,
    taus: Sequence[float] = SWEEP_TAUS,
    metrics: Sequence[str] = SWEEP_METRICS,
    descriptors: Sequence[str] = SWEEP_DESCRIPTORS,
    jobs: int = 1,
) -> list[EvalReport]:
    """One fresh learn-and-score per grid cell, ordered metric, descriptor, tau."""
    _require_labels(records)
    cells = [(list(records), cfg) for cfg in sweep_configs(base, taus, metrics, descriptors)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_eval_cell, cells))
    return [_eval_cell(c) for c in cells]


def calibrate_tau(
    records: Sequence[DatasetRecord], base: LearnerConfig | None = None, taus: Sequence[float] = SWEEP_TAUS
) -> tuple[float, list[EvalReport]]:
    """Pick the tau whose template count is closest to the number of labels.

    Ties go to higher matched accuracy, then to the tau nearest the base
    config's own.
    """
    base = base or LearnerConfig()
    n_labels = len(set(_require_labels(records)))
    reports = [evaluate_learning(records, replace(base, tau=t)) for t in taus]

    def key(pair):
        tau, rep = pair
        return (abs(rep.template_count - n_labels), -rep.accuracy, abs(tau - base.tau), tau)

    best_tau, _ = min(zip(taus, reports), key=key)
    return best_tau, reports
