"""Command-line entry point: generate, learn, classify, eval, export-svg."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from ..descriptors import DescriptorConfig
from ..errors import NotFoundError, ObservationError, OnionLearnError
from ..learner import LearnerConfig
from ..metrics import MetricConfig
from . import evaluation
from .dataset import FAMILIES, generate_records, read_records, write_records
from .state import load_state, save_state
from .svg import write_template_svg


def _config_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("learner config")
    g.add_argument("--tau", type=float, default=0.8, help="similarity needed to join a template (default 0.8)")
    g.add_argument("--metric", choices=["euclidean", "correlation"], default="euclidean")
    g.add_argument("--descriptor", choices=["geometric", "visual"], default="geometric")
    g.add_argument("--alignment", choices=["none", "shift"], default="shift")
    g.add_argument("--classify-mode", choices=["template", "knn"], default=None)
    g.add_argument("--k", type=int, default=None, help="neighbours for knn classification (default 1)")
    g.add_argument("--update-templates", action="store_true", help="rebuild a template when it gains a member")
    g.add_argument("--samples", type=int, default=64, help="boundary samples per descriptor")
    g.add_argument("--rings", type=int, default=5)
    g.add_argument("--wedges", type=int, default=16)


def _config_from(args) -> LearnerConfig:
    return LearnerConfig(
        tau=args.tau,
        descriptor_kind=args.descriptor,
        descriptor_config=DescriptorConfig(args.samples, args.rings, args.wedges),
        metric_config=MetricConfig(args.metric, args.alignment),
        template_update=args.update_templates,
        classify_mode=args.classify_mode or "template",
        k=args.k or 1,
    )


def _with_classify_overrides(learner, args):
    cfg = learner.config
    if args.classify_mode is not None:
        cfg = replace(cfg, classify_mode=args.classify_mode)
    if args.k is not None:
        cfg = replace(cfg, k=args.k)
    learner.config = cfg
    return learner


def cmd_generate(args) -> int:
    families = [f.strip() for f in args.families.split(",") if f.strip()]
    records = generate_records(
        families, args.per_family, args.jitter, args.seed, shuffle=not args.no_shuffle, random_pose=not args.fixed_pose
    )
    write_records(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def cmd_learn(args) -> int:
    records = read_records(args.dataset)
    cfg = _config_from(args)
    try:
        learner, decisions = evaluation.learn_records(records, cfg)
    except ObservationError as exc:
        rec = records[exc.observation_id]
        raise OnionLearnError(f"record id {rec.id}: {exc.cause}") from exc
    save_state(learner, args.out)
    log_path = Path(args.log) if args.log else Path(args.out).with_suffix(".decisions.jsonl")
    with open(log_path, "w", encoding="utf-8") as fh:
        for rec, dec in zip(records, decisions):
            row = {"id": rec.id, "kind": dec.kind, "category": dec.category_id, "best_similarity": dec.best_similarity}
            fh.write(json.dumps(row, separators=(",", ":")) + "\n")
    if not records:
        print("no observations: dataset is empty, wrote an empty library", file=sys.stderr)
    print(f"learned {len(learner.library)} templates from {len(records)} observations -> {args.out}")
    return 0


def cmd_classify(args) -> int:
    learner = _with_classify_overrides(load_state(args.state), args)
    records = read_records(args.dataset)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for rec in records:
            ranking = learner.classify(rec.polygon)
            row = {"id": rec.id, "ranking": [[c, s] for c, s in ranking]}
            out.write(json.dumps(row, separators=(",", ":")) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_eval(args) -> int:
    records = read_records(args.dataset)
    if args.state:
        learner = _with_classify_overrides(load_state(args.state), args)
        reports = [evaluation.evaluate_classification(records, learner)]
    elif args.sweep:
        reports = evaluation.sweep(records, _config_from(args), jobs=args.jobs)
    elif args.calibrate:
        tau, _ = evaluation.calibrate_tau(records, _config_from(args))
        print(f"calibrated tau = {tau}")
        reports = [evaluation.evaluate_learning(records, replace(_config_from(args), tau=tau))]
    else:
        reports = [evaluation.evaluate_learning(records, _config_from(args))]
    for rep in reports:
        print(rep.to_text())
    if args.json:
        payload = [r.to_dict() for r in reports] if args.sweep else reports[0].to_dict()
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_export_svg(args) -> int:
    learner = load_state(args.state)
    if not 0 <= args.template_id < len(learner.library):
        raise NotFoundError(f"no template with id {args.template_id} (library has {len(learner.library)})")
    write_template_svg(learner.library[args.template_id], args.out)
    print(f"wrote template {args.template_id} to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="onionlearn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic labelled polygon dataset")
    p.add_argument("--families", default="triangle,square,hexagon", help=f"comma list from {sorted(FAMILIES)}")
    p.add_argument("--per-family", type=int, default=10)
    p.add_argument("--jitter", type=float, default=0.02)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--fixed-pose", action="store_true", help="no random rotation, scale or translation")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("learn", help="stream a dataset through a fresh learner")
    p.add_argument("dataset")
    p.add_argument("--out", required=True, help="state file to write")
    p.add_argument("--log", help="decision log path (default: <out stem>.decisions.jsonl)")
    _config_args(p)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("classify", help="rank categories for each record against a saved state")
    p.add_argument("dataset")
    p.add_argument("--state", required=True)
    p.add_argument("--classify-mode", choices=["template", "knn"], default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("eval", help="score learning (or classification against --state) on labels")
    p.add_argument("dataset")
    p.add_argument("--state", help="classify with this state instead of learning afresh")
    p.add_argument("--sweep", action="store_true", help="tau x metric x descriptor grid (20 cells)")
    p.add_argument("--calibrate", action="store_true", help="pick tau by template-count correctness first")
    p.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    p.add_argument("--json", help="also write the machine-readable report here")
    _config_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export-svg", help="draw a template's convex layers")
    p.add_argument("--state", required=True)
    p.add_argument("--template-id", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_svg)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OnionLearnError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
