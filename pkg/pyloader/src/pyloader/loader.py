"""Read-only access to generated shape-caption datasets for ML pipelines.

This package talks to the on-disk dataset format only; it never imports the
generator toolkit.  Test instances expose images and reference captions but
no world models: ground truth stays hidden from evaluated models.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np
from PIL import Image

FORMAT_VERSION = 1
SPLITS = ("train", "val", "test")


class DatasetFormatError(Exception):
    """Missing, corrupt or incompatible dataset files."""


@dataclass(frozen=True)
class LoadedInstance:
    id: str
    image: np.ndarray
    captions: tuple[str, ...]


class DatasetReader:
    """Lazy split iterators over a generated dataset directory."""

    def __init__(self, root: str, meta: dict):
        self._root = root
        self.meta = meta
        self.task: str = meta["task"]
        self.canvas_size: int = meta["canvas_size"]
        self.counts: dict = meta["counts"]

    def split_size(self, split: str) -> int:
        if split not in SPLITS:
            raise DatasetFormatError(f"unknown split {split!r}")
        return self.counts[split]

    def _read_image(self, split: str, index: int) -> np.ndarray:
        path = os.path.join(self._root, split, "images", f"{index:06d}.png")
        try:
            with Image.open(path) as im:
                image = np.asarray(im.convert("RGB"))
        except FileNotFoundError:
            raise DatasetFormatError(f"missing image {split}/images/{index:06d}.png") from None
        expected = (self.canvas_size, self.canvas_size, 3)
        if image.shape != expected:
            raise DatasetFormatError(f"image {path} has shape {image.shape}, expected {expected}")
        return image

    def iter_split(self, split: str) -> Iterator[LoadedInstance]:
        expected = self.split_size(split)
        name = "references.jsonl" if split == "test" else "captions.jsonl"
        path = os.path.join(self._root, split, name)
        if not os.path.exists(path):
            raise DatasetFormatError(f"missing {split}/{name}")
        n = 0
        with open(path, "r", encoding="utf-8") as fh:
            for index, line in enumerate(fh):
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DatasetFormatError(f"corrupt {split}/{name} line {index + 1}: {exc}") from None
                captions = tuple(record["captions"]) if split == "test" else (record["caption"],)
                yield LoadedInstance(
                    id=record["id"],
                    image=self._read_image(split, index),
                    captions=captions,
                )
                n += 1
        if n != expected:
            raise DatasetFormatError(f"{split} has {n} instances, meta.json promises {expected}")

    def train(self) -> Iterator[LoadedInstance]:
        return self.iter_split("train")

    def val(self) -> Iterator[LoadedInstance]:
        return self.iter_split("val")

    def test(self) -> Iterator[LoadedInstance]:
        return self.iter_split("test")


def open_dataset(root) -> DatasetReader:
    root = os.fspath(root)
    meta_path = os.path.join(root, "meta.json")
    try:
        with open(meta_path, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except FileNotFoundError:
        raise DatasetFormatError(f"no dataset at {root}: missing meta.json") from None
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"corrupt meta.json: {exc}") from None
    version = meta.get("format_version")
    if version != FORMAT_VERSION:
        raise DatasetFormatError(
            f"dataset format version {version} not supported (expected {FORMAT_VERSION})"
        )
    return DatasetReader(root, meta)


def write_candidates(path, captions: Mapping[str, str]) -> None:
    """Write an id -> caption mapping as the candidate file the evaluator
    expects: JSON lines sorted by id, UTF-8, LF endings."""
    if not captions:
        raise ValueError("empty candidate mapping")
    for cid, caption in captions.items():
        if not isinstance(cid, str) or not isinstance(caption, str):
            raise ValueError(f"ids and captions must be strings, got ({cid!r}, {caption!r})")
        cid.encode("utf-8")
        caption.encode("utf-8")
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        for cid in sorted(captions):
            fh.write(json.dumps({"id": cid, "caption": captions[cid]}, ensure_ascii=False) + "\n")
