"""True-caption generation for the six dataset variants.

Every generated caption is grammatical and evaluates true against its world;
this is re-checked internally before a caption is returned.  Descriptors are
never bare generics ("There is a shape."), so references stay informative.
"""

from __future__ import annotations

from fractions import Fraction
from random import Random

from .grammar import (
    ALLOWED_FRACTIONS,
    Count,
    CaptionAst,
    Descriptor,
    Existential,
    Frame,
    Kind,
    MAX_COUNT,
    Ratio,
    Relation,
    Spatial,
    realize,
)
from .semantics import evaluate, matches, to_proposition
from .worldmodel import Color, Entity, Shape, WorldModel

MAX_CAPTION_ATTEMPTS = 200

# restrictor -> body kind pairs for count and ratio statements; the body
# always introduces an attribute the restrictor lacks
QUANT_KIND_PAIRS = (
    (Kind.S, Kind.C),
    (Kind.G, Kind.S),
    (Kind.G, Kind.C),
    (Kind.G, Kind.CS),
    (Kind.C, Kind.S),
)

_INFORMATIVE_KINDS = (Kind.S, Kind.C, Kind.CS)

ZERO_COUNT_RATE = 0.05


class GenerationError(Exception):
    """No true caption found for this world within the attempt budget."""


def _descriptor_for(e: Entity, kind: Kind) -> Descriptor:
    if kind is Kind.S:
        return Descriptor(shape=e.shape)
    if kind is Kind.C:
        return Descriptor(color=e.color, generic=True)
    if kind is Kind.CS:
        return Descriptor(shape=e.shape, color=e.color)
    return Descriptor(generic=True)


def _random_descriptor(rng: Random, kind: Kind) -> Descriptor:
    shape = rng.choice(list(Shape))
    color = rng.choice(list(Color))
    if kind is Kind.S:
        return Descriptor(shape=shape)
    if kind is Kind.C:
        return Descriptor(color=color, generic=True)
    if kind is Kind.CS:
        return Descriptor(shape=shape, color=color)
    return Descriptor(generic=True)


def _existential_ast(world: WorldModel, rng: Random) -> Existential:
    e = rng.choice(world.entities)
    kind = rng.choice(_INFORMATIVE_KINDS)
    if kind is Kind.S:
        return Existential(subject=_descriptor_for(e, Kind.S), frame=Frame.E1)
    if kind is Kind.C:
        if rng.random() < 0.5:
            return Existential(subject=_descriptor_for(e, Kind.C), frame=Frame.E1)
        # "A shape is green."
        return Existential(
            subject=Descriptor(generic=True),
            predicate=Descriptor(color=e.color, generic=True),
            frame=Frame.E2B,
        )
    surface = rng.choice(("e1", "e2a", "e2b"))
    if surface == "e1":
        return Existential(subject=_descriptor_for(e, Kind.CS), frame=Frame.E1)
    if surface == "e2a":
        # "A shape is a gray triangle."
        return Existential(
            subject=Descriptor(generic=True),
            predicate=_descriptor_for(e, Kind.CS),
            frame=Frame.E2A,
        )
    # "A triangle is gray."
    return Existential(
        subject=_descriptor_for(e, Kind.S),
        predicate=Descriptor(color=e.color, generic=True),
        frame=Frame.E2B,
    )


def _match_count(world: WorldModel, d: Descriptor) -> int:
    return sum(1 for e in world.entities if matches(e, d))


def _spatial_ast(world: WorldModel, rng: Random) -> Spatial | None:
    if len(world.entities) < 2:
        return None
    e1, e2 = rng.sample(world.entities, 2)
    vertical = Relation.ABOVE if e1.center[1] < e2.center[1] else Relation.BELOW
    horizontal = Relation.LEFT_OF if e1.center[0] < e2.center[0] else Relation.RIGHT_OF
    if e1.center[1] == e2.center[1]:
        vertical = horizontal
    if e1.center[0] == e2.center[0]:
        horizontal = vertical
    if e1.center == e2.center:
        return None
    relation = rng.choice((vertical, horizontal))
    d1 = _descriptor_for(e1, rng.choice(_INFORMATIVE_KINDS))
    d2 = _descriptor_for(e2, rng.choice(_INFORMATIVE_KINDS))
    # each descriptor must pick out its witness uniquely, so that flipping
    # the relation always yields a false statement
    if _match_count(world, d1) != 1 or _match_count(world, d2) != 1:
        return None
    return Spatial(relation=relation, subject=d1, object=d2)


def _quant_pair(world: WorldModel, rng: Random, from_lexicon: bool) -> tuple[Descriptor, Descriptor]:
    rk, bk = rng.choice(QUANT_KIND_PAIRS)
    if from_lexicon:
        return _random_descriptor(rng, rk), _random_descriptor(rng, bk)
    e = rng.choice(world.entities)
    return _descriptor_for(e, rk), _descriptor_for(e, bk)


def _count_ast(world: WorldModel, rng: Random) -> Count | None:
    aim_zero = rng.random() < ZERO_COUNT_RATE
    restrictor, body = _quant_pair(world, rng, from_lexicon=aim_zero)
    n = sum(1 for e in world.entities if matches(e, restrictor) and matches(e, body))
    if n > MAX_COUNT:
        return None
    if aim_zero != (n == 0):
        return None
    return Count(number=n, restrictor=restrictor, body=body)


def _ratio_ast(world: WorldModel, rng: Random) -> Ratio | None:
    restrictor, body = _quant_pair(world, rng, from_lexicon=False)
    in_restrictor = [e for e in world.entities if matches(e, restrictor)]
    hits = sum(1 for e in in_restrictor if matches(e, body))
    if not in_restrictor or hits == 0 or hits == len(in_restrictor):
        return None
    fraction = Fraction(hits, len(in_restrictor))
    if fraction not in ALLOWED_FRACTIONS:
        return None
    return Ratio(fraction=fraction, restrictor=restrictor, body=body)


def generate_caption(world: WorldModel, task: str, rng: Random) -> tuple[str, CaptionAst]:
    """Sample one caption true of the world, in the task's sentence family.

    Raises GenerationError when no admissible caption is found within the
    attempt budget (e.g. a world whose subset ratios never hit an allowed
    fraction); callers resample the world.
    """
    if task.startswith("existential"):
        build = _existential_ast
    elif task.startswith("spatial"):
        build = _spatial_ast
    elif task == "quant-count":
        build = _count_ast
    elif task == "quant-ratio":
        build = _ratio_ast
    else:
        raise ValueError(f"unknown task {task!r}")

    for _ in range(MAX_CAPTION_ATTEMPTS):
        ast = build(world, rng)
        if ast is None:
            continue
        if not evaluate(to_proposition(ast), world):
            raise GenerationError(f"generated caption is false on its world: {ast!r}")
        return realize(ast, rng), ast
    raise GenerationError(f"no admissible {task} caption for world {world.id!r}")


def random_caption(rng: Random) -> tuple[str, CaptionAst]:
    """Sample a grammatical caption uniformly over frames, ignoring any world."""
    frame = rng.choice(list(Frame))
    ast: CaptionAst
    if frame is Frame.E1:
        ast = Existential(subject=_random_descriptor(rng, rng.choice(list(Kind))), frame=Frame.E1)
    elif frame is Frame.E2A:
        ast = Existential(
            subject=_random_descriptor(rng, rng.choice(list(Kind))),
            predicate=_random_descriptor(rng, rng.choice(list(Kind))),
            frame=Frame.E2A,
        )
    elif frame is Frame.E2B:
        ast = Existential(
            subject=_random_descriptor(rng, rng.choice(list(Kind))),
            predicate=Descriptor(color=rng.choice(list(Color)), generic=True),
            frame=Frame.E2B,
        )
    elif frame is Frame.SPATIAL:
        ast = Spatial(
            relation=rng.choice(list(Relation)),
            subject=_random_descriptor(rng, rng.choice(_INFORMATIVE_KINDS)),
            object=_random_descriptor(rng, rng.choice(_INFORMATIVE_KINDS)),
        )
    elif frame is Frame.COUNT:
        rk, bk = rng.choice(QUANT_KIND_PAIRS)
        ast = Count(
            number=rng.randint(0, MAX_COUNT),
            restrictor=_random_descriptor(rng, rk),
            body=_random_descriptor(rng, bk),
        )
    else:
        rk, bk = rng.choice(QUANT_KIND_PAIRS)
        ast = Ratio(
            fraction=rng.choice(ALLOWED_FRACTIONS),
            restrictor=_random_descriptor(rng, rk),
            body=_random_descriptor(rng, bk),
        )
    return realize(ast, rng), ast
