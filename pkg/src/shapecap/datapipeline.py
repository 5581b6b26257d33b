"""Dataset generation and loading for the six scene-caption task variants.

On-disk layout under the output directory:

    meta.json
    {train,val,test}/images/NNNNNN.png
    {train,val,test}/worlds.jsonl
    {train,val}/captions.jsonl        {"id", "caption"}
    test/references.jsonl             {"id", "captions": [n_refs]}

Every instance is derived from a stable 64-bit hash of (master_seed, split,
index), so any instance can be regenerated in isolation and full runs are
byte-reproducible.  Test worlds are stored for evaluation only; consumers
are expected to read test images and references, never test worlds.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from random import Random
from typing import Iterator, Mapping

from .captions import GenerationError, generate_caption, random_caption
from .grammar import Relation, Spatial, grammar_fingerprint, parse, realize
from .metrics import RunInput, RunInstance
from .render import CANVAS_SIZE, color_table_fingerprint, render, write_png
from .worldmodel import (
    TASKS,
    WorldModel,
    sample_world,
    task_world_spec,
    world_from_json,
    world_to_json,
)

FORMAT_VERSION = 1
SPLITS = ("train", "val", "test")
BOTS = ("echo-first-ref", "constant-generic", "relation-flip", "random-grammar")

MAX_WORLD_ATTEMPTS = 50

_FLIP = {
    Relation.ABOVE: Relation.BELOW,
    Relation.BELOW: Relation.ABOVE,
    Relation.LEFT_OF: Relation.RIGHT_OF,
    Relation.RIGHT_OF: Relation.LEFT_OF,
}


class DatasetError(Exception):
    """Invalid, corrupt or mismatched dataset or candidate files."""


@dataclass(frozen=True)
class DatasetSpec:
    task: str
    n_train: int = 200_000
    n_val: int = 4096
    n_test: int = 4096
    n_refs: int = 10
    master_seed: int = 0


@dataclass(frozen=True)
class Instance:
    id: str
    world: WorldModel
    captions: tuple[str, ...]


def validate_dataset_spec(spec: DatasetSpec) -> None:
    if spec.task not in TASKS:
        raise DatasetError(f"unknown task {spec.task!r}, expected one of {', '.join(TASKS)}")
    for name, value in (
        ("n_train", spec.n_train),
        ("n_val", spec.n_val),
        ("n_test", spec.n_test),
        ("n_refs", spec.n_refs),
    ):
        if value < 1:
            raise DatasetError(f"{name} must be >= 1, got {value}")


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary key parts (not Python's hash())."""
    text = ":".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


def generate_instance(spec: DatasetSpec, split: str, index: int) -> Instance:
    """Generate instance `index` of a split, independently of all others."""
    instance_seed = derive_seed(spec.master_seed, split, index)
    instance_id = f"{split}-{index:06d}"
    world_spec = task_world_spec(spec.task)
    n_captions = spec.n_refs if split == "test" else 1
    for attempt in range(MAX_WORLD_ATTEMPTS):
        world_rng = Random(derive_seed(instance_seed, "world", attempt))
        world = sample_world(world_spec, world_rng, world_id=instance_id)
        try:
            captions = tuple(
                generate_caption(
                    world, spec.task, Random(derive_seed(instance_seed, "world", attempt, "cap", j))
                )[0]
                for j in range(n_captions)
            )
        except GenerationError:
            continue
        return Instance(id=instance_id, world=world, captions=captions)
    raise DatasetError(
        f"could not generate captions for {instance_id} after {MAX_WORLD_ATTEMPTS} worlds"
    )


def generate_eval_instances(
    task: str, n: int, n_refs: int = 10, master_seed: int = 0
) -> list[Instance]:
    """Test-style instances (world + references) without touching disk."""
    spec = DatasetSpec(task=task, n_test=n, n_refs=n_refs, master_seed=master_seed)
    return [generate_instance(spec, "test", i) for i in range(n)]


def _split_sizes(spec: DatasetSpec) -> dict[str, int]:
    return {"train": spec.n_train, "val": spec.n_val, "test": spec.n_test}


def generate_dataset(spec: DatasetSpec, out_dir) -> dict:
    """Write a full dataset; returns the manifest dict stored in meta.json."""
    validate_dataset_spec(spec)
    out_dir = os.fspath(out_dir)
    manifest = {
        "format_version": FORMAT_VERSION,
        "task": spec.task,
        "counts": dict(_split_sizes(spec), refs=spec.n_refs),
        "master_seed": spec.master_seed,
        "canvas_size": CANVAS_SIZE,
        "grammar_version": grammar_fingerprint(),
        "color_table": color_table_fingerprint(),
        "test_worlds": "evaluation-only",
    }
    os.makedirs(out_dir, exist_ok=True)
    for split, count in _split_sizes(spec).items():
        split_dir = os.path.join(out_dir, split)
        images_dir = os.path.join(split_dir, "images")
        os.makedirs(images_dir, exist_ok=True)
        captions_name = "references.jsonl" if split == "test" else "captions.jsonl"
        with open(os.path.join(split_dir, "worlds.jsonl"), "w", encoding="utf-8", newline="\n") as worlds_fh, open(
            os.path.join(split_dir, captions_name), "w", encoding="utf-8", newline="\n"
        ) as captions_fh:
            for index in range(count):
                inst = generate_instance(spec, split, index)
                write_png(render(inst.world), os.path.join(images_dir, f"{index:06d}.png"))
                worlds_fh.write(world_to_json(inst.world) + "\n")
                if split == "test":
                    record = {"id": inst.id, "captions": list(inst.captions)}
                else:
                    record = {"id": inst.id, "caption": inst.captions[0]}
                captions_fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    with open(os.path.join(out_dir, "meta.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _count_lines(path: str) -> int:
    with open(path, "rb") as fh:
        return sum(1 for _ in fh)


class DatasetHandle:
    """Read access to a generated dataset; instances stream lazily."""

    def __init__(self, root: str, meta: dict):
        self.root = root
        self.meta = meta
        self.task: str = meta["task"]
        self.counts: dict = meta["counts"]
        self.n_refs: int = meta["counts"]["refs"]

    def split_size(self, split: str) -> int:
        return self.counts[split]

    def image_path(self, split: str, index: int) -> str:
        return os.path.join(self.root, split, "images", f"{index:06d}.png")

    def iter_split(self, split: str) -> Iterator[Instance]:
        if split not in SPLITS:
            raise DatasetError(f"unknown split {split!r}")
        captions_name = "references.jsonl" if split == "test" else "captions.jsonl"
        worlds_path = os.path.join(self.root, split, "worlds.jsonl")
        captions_path = os.path.join(self.root, split, captions_name)
        expected = self.split_size(split)
        n = 0
        with open(worlds_path, "r", encoding="utf-8") as worlds_fh, open(
            captions_path, "r", encoding="utf-8"
        ) as captions_fh:
            for world_line, caption_line in zip(worlds_fh, captions_fh):
                world = world_from_json(world_line)
                record = json.loads(caption_line)
                if record["id"] != world.id:
                    raise DatasetError(
                        f"{split}: id mismatch between worlds ({world.id}) "
                        f"and captions ({record['id']})"
                    )
                captions = tuple(record["captions"]) if split == "test" else (record["caption"],)
                yield Instance(id=world.id, world=world, captions=captions)
                n += 1
        if n != expected:
            raise DatasetError(f"{split}: expected {expected} instances, found {n}")

    def test_instances(self) -> list[Instance]:
        return list(self.iter_split("test"))


def load_dataset(root) -> DatasetHandle:
    """Open a dataset directory, refusing on version or count mismatches."""
    root = os.fspath(root)
    meta_path = os.path.join(root, "meta.json")
    try:
        with open(meta_path, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except FileNotFoundError:
        raise DatasetError(f"no dataset at {root}: missing meta.json") from None
    except json.JSONDecodeError as exc:
        raise DatasetError(f"corrupt meta.json: {exc}") from None
    if meta.get("format_version") != FORMAT_VERSION:
        raise DatasetError(
            f"dataset format version {meta.get('format_version')} does not match "
            f"this build's version {FORMAT_VERSION}"
        )
    if meta.get("grammar_version") != grammar_fingerprint():
        raise DatasetError(
            "dataset was generated with a different grammar version; "
            "regenerate it before evaluating"
        )
    if meta.get("color_table") != color_table_fingerprint():
        raise DatasetError("dataset was generated with a different color table")
    for split in SPLITS:
        expected = meta["counts"][split]
        captions_name = "references.jsonl" if split == "test" else "captions.jsonl"
        for name in ("worlds.jsonl", captions_name):
            path = os.path.join(root, split, name)
            if not os.path.exists(path):
                raise DatasetError(f"corrupt dataset: missing {split}/{name}")
            lines = _count_lines(path)
            if lines != expected:
                raise DatasetError(
                    f"corrupt dataset: {split}/{name} has {lines} lines, expected {expected}"
                )
    return DatasetHandle(root, meta)


def read_candidates(path) -> dict[str, str]:
    """Read a candidate file (JSON-lines of {"id", "caption"}) into a map."""
    captions: dict[str, str] = {}
    with open(os.fspath(path), "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                cid = record["id"]
                caption = record["caption"]
            except (json.JSONDecodeError, TypeError, KeyError) as exc:
                raise DatasetError(f"malformed candidate line {lineno}: {exc}") from None
            if not isinstance(cid, str) or not isinstance(caption, str):
                raise DatasetError(f"malformed candidate line {lineno}: id/caption must be strings")
            if cid in captions:
                raise DatasetError(f"duplicate candidate id {cid!r} at line {lineno}")
            captions[cid] = caption
    return captions


def build_run(dataset: DatasetHandle, candidates: Mapping[str, str]) -> RunInput:
    """Align candidates with the test split; strict about missing/extra ids."""
    instances = dataset.test_instances()
    ids = [inst.id for inst in instances]
    missing = [i for i in ids if i not in candidates]
    if missing:
        shown = ", ".join(missing[:5])
        raise DatasetError(f"candidates missing {len(missing)} test ids: {shown}")
    extra = sorted(set(candidates) - set(ids))
    if extra:
        raise DatasetError(f"candidates contain {len(extra)} unknown ids: {', '.join(extra[:5])}")
    return RunInput(
        task=dataset.task,
        instances=tuple(
            RunInstance(
                id=inst.id,
                world=inst.world,
                references=inst.captions,
                candidate=candidates[inst.id],
            )
            for inst in instances
        ),
    )


def _flip_relation(caption: str) -> str:
    ast = parse(caption)
    if not isinstance(ast, Spatial):
        raise DatasetError(f"relation-flip needs a spatial reference, got {caption!r}")
    flipped = Spatial(relation=_FLIP[ast.relation], subject=ast.subject, object=ast.object)
    return realize(flipped)


def write_candidates_file(path, captions: Mapping[str, str]) -> None:
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        for cid in sorted(captions):
            fh.write(json.dumps({"id": cid, "caption": captions[cid]}, ensure_ascii=False) + "\n")


def make_baseline(dataset: DatasetHandle, bot: str, out_path) -> None:
    """Write a degenerate candidate file probing the metrics.

    echo-first-ref copies reference 1; constant-generic always says "There is
    a shape."; relation-flip inverts reference 1's spatial relation (spatial
    tasks only); random-grammar samples captions ignoring the world.
    """
    if bot not in BOTS:
        raise DatasetError(f"unknown bot {bot!r}, expected one of {', '.join(BOTS)}")
    if bot == "relation-flip" and not dataset.task.startswith("spatial"):
        raise DatasetError(f"relation-flip requires a spatial task, dataset is {dataset.task!r}")
    captions: dict[str, str] = {}
    for inst in dataset.iter_split("test"):
        if bot == "echo-first-ref":
            captions[inst.id] = inst.captions[0]
        elif bot == "constant-generic":
            captions[inst.id] = "There is a shape."
        elif bot == "relation-flip":
            captions[inst.id] = _flip_relation(inst.captions[0])
        else:
            rng = Random(derive_seed(dataset.meta["master_seed"], "bot", bot, inst.id))
            captions[inst.id] = random_caption(rng)[0]
    write_candidates_file(out_path, captions)
