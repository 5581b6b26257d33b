"""Command-line interface: generate datasets, run baseline bots, evaluate
candidate files, inspect instances.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .captions import GenerationError
from .datapipeline import (
    BOTS,
    DatasetError,
    DatasetSpec,
    build_run,
    generate_dataset,
    load_dataset,
    make_baseline,
    read_candidates,
)
from .metrics import evaluate_run
from .semantics import evaluate_caption
from .worldmodel import TASKS, SamplingError, world_to_record


def _cmd_generate(args: argparse.Namespace) -> int:
    spec = DatasetSpec(
        task=args.task,
        n_train=args.train,
        n_val=args.val,
        n_test=args.test,
        n_refs=args.refs,
        master_seed=args.seed,
    )
    manifest = generate_dataset(spec, args.out)
    counts = manifest["counts"]
    print(
        f"wrote {manifest['task']} dataset to {args.out} "
        f"(train={counts['train']} val={counts['val']} test={counts['test']} "
        f"refs={counts['refs']} seed={manifest['master_seed']})"
    )
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.dataset)
    candidates = read_candidates(args.candidates)
    report = evaluate_run(build_run(dataset, candidates))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report.to_json_dict(), fh, indent=2)
        fh.write("\n")
    print(report.summary_line())
    return 0


def _cmd_baseline(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.dataset)
    if args.bot == "relation-flip" and not dataset.task.startswith("spatial"):
        print(
            f"error: bot {args.bot!r} cannot run on task {dataset.task!r}",
            file=sys.stderr,
        )
        return 2
    make_baseline(dataset, args.bot, args.out)
    print(f"wrote {args.bot} candidates for {dataset.split_size('test')} instances to {args.out}")
    return 0


def _cmd_inspect(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.dataset)
    split = args.id.split("-")[0]
    if split not in ("train", "val", "test"):
        print(f"error: unknown id {args.id!r}", file=sys.stderr)
        return 1
    for inst in dataset.iter_split(split):
        if inst.id != args.id:
            continue
        print(f"id: {inst.id}")
        print(f"world: {json.dumps(world_to_record(inst.world), ensure_ascii=False)}")
        for i, caption in enumerate(inst.captions):
            verdict = evaluate_caption(caption, inst.world)
            print(f"caption[{i}]: {caption}  [{verdict.value}]")
        return 0
    print(f"error: unknown id {args.id!r}", file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shapecap",
        description="Generate shape-scene caption datasets and score candidate captions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a dataset variant")
    p.add_argument("--task", required=True, choices=TASKS)
    p.add_argument("--train", type=int, default=200_000)
    p.add_argument("--val", type=int, default=4096)
    p.add_argument("--test", type=int, default=4096)
    p.add_argument("--refs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("evaluate", help="score a candidate file against a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--candidates", required=True)
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("baseline", help="write a degenerate candidate file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--bot", required=True, choices=BOTS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("inspect", help="print one instance with truth verdicts")
    p.add_argument("--dataset", required=True)
    p.add_argument("--id", required=True)
    p.set_defaults(func=_cmd_inspect)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, SamplingError, GenerationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
