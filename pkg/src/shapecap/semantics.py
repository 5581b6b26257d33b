"""Logical propositions for captions and their evaluation against worlds.

Spatial relations compare entity centers in image coordinates (y grows
downward): above means strictly smaller y, left_of strictly smaller x, and
ties are false.  Ratio statements use exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

from .grammar import (
    Count,
    CaptionAst,
    Descriptor,
    Existential,
    NUMBER_WORDS,
    Ratio,
    Relation,
    Spatial,
    parse,
)
from .worldmodel import Entity, WorldModel


class Verdict(Enum):
    UNGRAMMATICAL = "ungrammatical"
    TRUE = "true"
    FALSE = "false"


@dataclass(frozen=True)
class Exists:
    """descriptor=None marks a contradictory description; it is never true."""

    descriptor: Descriptor | None


@dataclass(frozen=True)
class ExistsPair:
    relation: Relation
    subject: Descriptor
    object: Descriptor


@dataclass(frozen=True)
class CountEq:
    number: int
    restrictor: Descriptor
    body: Descriptor


@dataclass(frozen=True)
class RatioEq:
    fraction: Fraction
    restrictor: Descriptor
    body: Descriptor


Proposition = Union[Exists, ExistsPair, CountEq, RatioEq]


def merge_descriptors(a: Descriptor, b: Descriptor) -> Descriptor | None:
    """Merge subject and predicate of a copula sentence; None on conflict."""
    if a.shape is not None and b.shape is not None and a.shape is not b.shape:
        return None
    if a.color is not None and b.color is not None and a.color is not b.color:
        return None
    shape = a.shape if a.shape is not None else b.shape
    color = a.color if a.color is not None else b.color
    return Descriptor(shape=shape, color=color, generic=shape is None)


def to_proposition(ast: CaptionAst) -> Proposition:
    if isinstance(ast, Existential):
        if ast.predicate is None:
            return Exists(ast.subject)
        return Exists(merge_descriptors(ast.subject, ast.predicate))
    if isinstance(ast, Spatial):
        return ExistsPair(relation=ast.relation, subject=ast.subject, object=ast.object)
    if isinstance(ast, Count):
        return CountEq(number=ast.number, restrictor=ast.restrictor, body=ast.body)
    if isinstance(ast, Ratio):
        return RatioEq(fraction=ast.fraction, restrictor=ast.restrictor, body=ast.body)
    raise ValueError(f"not a caption AST: {ast!r}")


def matches(e: Entity, d: Descriptor) -> bool:
    """True iff the entity satisfies every attribute the descriptor mentions."""
    if d.shape is not None and e.shape is not d.shape:
        return False
    if d.color is not None and e.color is not d.color:
        return False
    return True


def _relation_holds(rel: Relation, a: tuple[float, float], b: tuple[float, float]) -> bool:
    if rel is Relation.ABOVE:
        return a[1] < b[1]
    if rel is Relation.BELOW:
        return a[1] > b[1]
    if rel is Relation.LEFT_OF:
        return a[0] < b[0]
    return a[0] > b[0]


def evaluate(p: Proposition, w: WorldModel) -> bool:
    if isinstance(p, Exists):
        if p.descriptor is None:
            return False
        return any(matches(e, p.descriptor) for e in w.entities)
    if isinstance(p, ExistsPair):
        for i, e1 in enumerate(w.entities):
            if not matches(e1, p.subject):
                continue
            for j, e2 in enumerate(w.entities):
                if i == j or not matches(e2, p.object):
                    continue
                if _relation_holds(p.relation, e1.center, e2.center):
                    return True
        return False
    if isinstance(p, CountEq):
        hits = sum(1 for e in w.entities if matches(e, p.restrictor) and matches(e, p.body))
        return hits == p.number
    if isinstance(p, RatioEq):
        restrictor = [e for e in w.entities if matches(e, p.restrictor)]
        if not restrictor:
            return False
        hits = sum(1 for e in restrictor if matches(e, p.body))
        return p.fraction.denominator * hits == p.fraction.numerator * len(restrictor)
    raise ValueError(f"not a proposition: {p!r}")


def evaluate_caption(text: str, w: WorldModel) -> Verdict:
    """Total three-way verdict: ungrammatical, true or false."""
    ast = parse(text)
    if ast is None:
        return Verdict.UNGRAMMATICAL
    return Verdict.TRUE if evaluate(to_proposition(ast), w) else Verdict.FALSE


def oracle_evaluate(p: Proposition, w: WorldModel) -> bool:
    """Naive re-implementation straight from the quantifier definitions.

    Kept deliberately independent of evaluate()/matches(): attribute checks
    and relation comparisons are spelled out inline.  Test use only.
    """
    if isinstance(p, Exists):
        d = p.descriptor
        if d is None:
            return False
        for e in w.entities:
            ok = True
            if d.shape is not None and e.shape != d.shape:
                ok = False
            if d.color is not None and e.color != d.color:
                ok = False
            if ok:
                return True
        return False
    if isinstance(p, ExistsPair):
        for i in range(len(w.entities)):
            for j in range(len(w.entities)):
                if i == j:
                    continue
                a, b = w.entities[i], w.entities[j]
                if p.subject.shape is not None and a.shape != p.subject.shape:
                    continue
                if p.subject.color is not None and a.color != p.subject.color:
                    continue
                if p.object.shape is not None and b.shape != p.object.shape:
                    continue
                if p.object.color is not None and b.color != p.object.color:
                    continue
                if p.relation == Relation.ABOVE and a.center[1] < b.center[1]:
                    return True
                if p.relation == Relation.BELOW and a.center[1] > b.center[1]:
                    return True
                if p.relation == Relation.LEFT_OF and a.center[0] < b.center[0]:
                    return True
                if p.relation == Relation.RIGHT_OF and a.center[0] > b.center[0]:
                    return True
        return False
    if isinstance(p, CountEq):
        total = 0
        for e in w.entities:
            if p.restrictor.shape is not None and e.shape != p.restrictor.shape:
                continue
            if p.restrictor.color is not None and e.color != p.restrictor.color:
                continue
            if p.body.shape is not None and e.shape != p.body.shape:
                continue
            if p.body.color is not None and e.color != p.body.color:
                continue
            total += 1
        return total == p.number
    if isinstance(p, RatioEq):
        in_restrictor = []
        for e in w.entities:
            if p.restrictor.shape is not None and e.shape != p.restrictor.shape:
                continue
            if p.restrictor.color is not None and e.color != p.restrictor.color:
                continue
            in_restrictor.append(e)
        if len(in_restrictor) == 0:
            return False
        hits = 0
        for e in in_restrictor:
            if p.body.shape is not None and e.shape != p.body.shape:
                continue
            if p.body.color is not None and e.color != p.body.color:
                continue
            hits += 1
        return Fraction(hits, len(in_restrictor)) == p.fraction
    raise ValueError(f"not a proposition: {p!r}")


# ---------------------------------------------------------------------------
# scene tuples for the SPICE-style metric

FRACTION_TUPLE_WORDS = {
    Fraction(1, 2): "half",
    Fraction(1, 3): "third",
    Fraction(1, 4): "quarter",
    Fraction(2, 3): "two-thirds",
    Fraction(3, 4): "three-quarters",
}

SceneTuple = tuple[str, ...]


def _attribute_tuples(d: Descriptor, obj: str) -> set[SceneTuple]:
    facts: set[SceneTuple] = set()
    if d.shape is not None:
        facts.add((obj, d.shape.value))
    if d.color is not None:
        facts.add((obj, d.color.value))
    return facts


def _descriptor_words(d: Descriptor) -> tuple[str, ...]:
    noun = d.shape.value if d.shape is not None else "shape"
    if d.color is not None:
        return (d.color.value, noun)
    return (noun,)


def scene_tuples(ast: CaptionAst) -> frozenset[SceneTuple]:
    """Extract the normalized (object, attribute) / (object, relation, object)
    facts a caption claims; quantified captions add a (quantity, restrictor)
    tuple.  Object identifiers are positional within one caption."""
    facts: set[SceneTuple] = set()
    if isinstance(ast, Existential):
        facts |= _attribute_tuples(ast.subject, "o1")
        if ast.predicate is not None:
            facts |= _attribute_tuples(ast.predicate, "o1")
    elif isinstance(ast, Spatial):
        facts |= _attribute_tuples(ast.subject, "o1")
        facts |= _attribute_tuples(ast.object, "o2")
        facts.add(("o1", ast.relation.value, "o2"))
    elif isinstance(ast, Count):
        facts |= _attribute_tuples(ast.restrictor, "o1")
        facts |= _attribute_tuples(ast.body, "o1")
        facts.add((NUMBER_WORDS[ast.number],) + _descriptor_words(ast.restrictor))
    elif isinstance(ast, Ratio):
        facts |= _attribute_tuples(ast.restrictor, "o1")
        facts |= _attribute_tuples(ast.body, "o1")
        facts.add((FRACTION_TUPLE_WORDS[ast.fraction],) + _descriptor_words(ast.restrictor))
    else:
        raise ValueError(f"not a caption AST: {ast!r}")
    return frozenset(facts)
