import itertools
from fractions import Fraction
from random import Random

import pytest

from shapecap import (
    Color,
    Count,
    Descriptor,
    Entity,
    Existential,
    Frame,
    Ratio,
    Relation,
    Shape,
    Spatial,
    Verdict,
    WorldModel,
    evaluate,
    evaluate_caption,
    matches,
    oracle_evaluate,
    parse,
    scene_tuples,
    to_proposition,
)
from shapecap.grammar import ALLOWED_FRACTIONS
from shapecap.semantics import CountEq, Exists, ExistsPair, RatioEq, merge_descriptors

from worldbuild import VERDICT_CASES, entity, multishape_spatial, world


class TestToProposition:
    def test_e2a_merges_subject_and_predicate(self):
        p = to_proposition(parse("A shape is a gray triangle."))
        assert p == Exists(Descriptor(shape=Shape.TRIANGLE, color=Color.GRAY))

    def test_e2b_merges_color(self):
        p = to_proposition(parse("A rectangle is green."))
        assert p == Exists(Descriptor(shape=Shape.RECTANGLE, color=Color.GREEN))

    def test_contradictory_merge_is_unsatisfiable(self):
        p = to_proposition(parse("A square is a circle."))
        assert p == Exists(None)
        w = world("w", entity("square", "red", 0.3, 0.3), entity("circle", "red", 0.7, 0.7))
        assert evaluate(p, w) is False
        assert oracle_evaluate(p, w) is False

    def test_color_conflict_also_unsatisfiable(self):
        assert to_proposition(parse("A green square is red.")).descriptor is None

    def test_merge_keeps_agreeing_values(self):
        d = merge_descriptors(
            Descriptor(shape=Shape.SQUARE), Descriptor(shape=Shape.SQUARE, color=Color.RED)
        )
        assert d == Descriptor(shape=Shape.SQUARE, color=Color.RED)


class TestMatches:
    GREEN_CROSS = entity("cross", "green", 0.5, 0.5)

    def test_full_match(self):
        assert matches(self.GREEN_CROSS, Descriptor(shape=Shape.CROSS, color=Color.GREEN))

    def test_generic_matches_all(self):
        assert matches(self.GREEN_CROSS, Descriptor(generic=True))

    def test_color_mismatch(self):
        assert not matches(self.GREEN_CROSS, Descriptor(color=Color.CYAN, generic=True))


class TestEvaluate:
    def test_exists(self):
        w = world("w", entity("cross", "green", 0.5, 0.5))
        assert evaluate(Exists(Descriptor(shape=Shape.CROSS, color=Color.GREEN)), w)

    def test_exists_pair_brute_force_over_both_orders(self):
        w = world("w", entity("square", "green", 0.3, 0.2), entity("pentagon", "red", 0.4, 0.8))
        square = Descriptor(shape=Shape.SQUARE)
        red_pentagon = Descriptor(shape=Shape.PENTAGON, color=Color.RED)
        assert evaluate(ExistsPair(Relation.ABOVE, square, red_pentagon), w)
        assert evaluate(ExistsPair(Relation.LEFT_OF, square, red_pentagon), w)
        assert not evaluate(ExistsPair(Relation.RIGHT_OF, square, red_pentagon), w)
        assert not evaluate(ExistsPair(Relation.BELOW, square, red_pentagon), w)

    def test_count_and_ratio_enumeration(self):
        w = world(
            "w",
            entity("rectangle", "green", 0.2, 0.2),
            entity("rectangle", "green", 0.8, 0.2),
            entity("circle", "yellow", 0.2, 0.8),
            entity("square", "blue", 0.8, 0.8),
        )
        rect = Descriptor(shape=Shape.RECTANGLE)
        green = Descriptor(color=Color.GREEN, generic=True)
        assert evaluate(CountEq(2, rect, green), w)
        assert not evaluate(RatioEq(Fraction(1, 4), Descriptor(generic=True), rect), w)
        assert evaluate(RatioEq(Fraction(1, 2), Descriptor(generic=True), rect), w)

    def test_ties_are_false(self):
        w = world("w", entity("square", "red", 0.5, 0.3), entity("circle", "blue", 0.5, 0.7))
        sq, ci = Descriptor(shape=Shape.SQUARE), Descriptor(shape=Shape.CIRCLE)
        assert not evaluate(ExistsPair(Relation.LEFT_OF, sq, ci), w)
        assert not evaluate(ExistsPair(Relation.RIGHT_OF, sq, ci), w)
        assert evaluate(ExistsPair(Relation.ABOVE, sq, ci), w)

    def test_empty_restrictor_ratio_false(self):
        w = world("w", entity("square", "red", 0.5, 0.5))
        p = RatioEq(Fraction(1, 2), Descriptor(shape=Shape.CROSS), Descriptor(color=Color.RED, generic=True))
        assert not evaluate(p, w)
        assert not oracle_evaluate(p, w)

    def test_count_zero_with_empty_intersection_true(self):
        w = world("w", entity("square", "red", 0.5, 0.5))
        p = CountEq(0, Descriptor(generic=True), Descriptor(shape=Shape.ELLIPSE))
        assert evaluate(p, w)
        assert oracle_evaluate(p, w)


class TestEvaluateCaption:
    def test_spatial_false_statement(self):
        assert evaluate_caption("A semicircle is to the left of a triangle.", multishape_spatial()) is Verdict.FALSE

    def test_ungrammatical(self):
        assert evaluate_caption("There is shape a.", multishape_spatial()) is Verdict.UNGRAMMATICAL

    def test_generic_true_on_any_nonempty_world(self):
        for w, _, _ in VERDICT_CASES:
            assert evaluate_caption("There is a shape.", w) is Verdict.TRUE

    def test_canonical_verdicts(self):
        for w, caption, truth in VERDICT_CASES:
            expected = Verdict.TRUE if truth else Verdict.FALSE
            assert evaluate_caption(caption, w) is expected, (w.id, caption)

    def test_totality_on_junk(self):
        w = multishape_spatial()
        for text in ["", ".", "...", "a", "\x00\xff.", "There is a \n cross.", "🙂."]:
            assert evaluate_caption(text, w) in set(Verdict)


def _random_world(rng, max_entities=8):
    n = rng.randint(1, max_entities)
    return world(
        "w",
        *(
            entity(
                rng.choice(list(Shape)).value,
                rng.choice(list(Color)).value,
                rng.random(),
                rng.random(),
            )
            for _ in range(n)
        ),
    )


def _random_descriptor(rng):
    shape = rng.choice(list(Shape) + [None, None])
    color = rng.choice(list(Color) + [None, None])
    return Descriptor(shape=shape, color=color, generic=shape is None)


def _random_proposition(rng):
    kind = rng.randrange(4)
    if kind == 0:
        return Exists(None if rng.random() < 0.05 else _random_descriptor(rng))
    if kind == 1:
        return ExistsPair(rng.choice(list(Relation)), _random_descriptor(rng), _random_descriptor(rng))
    if kind == 2:
        return CountEq(rng.randint(0, 5), _random_descriptor(rng), _random_descriptor(rng))
    return RatioEq(rng.choice(ALLOWED_FRACTIONS), _random_descriptor(rng), _random_descriptor(rng))


class TestOracleAgreement:
    def test_single_entity_worlds_all_descriptors(self):
        for shape, color in itertools.product(Shape, Color):
            w = world("w", entity(shape.value, color.value, 0.5, 0.5))
            for ds, dc in itertools.product(list(Shape) + [None], list(Color) + [None]):
                d = Descriptor(shape=ds, color=dc, generic=ds is None)
                p = Exists(d)
                assert evaluate(p, w) == oracle_evaluate(p, w)

    def test_randomized_agreement(self):
        rng = Random(13)
        for _ in range(2000):
            w = _random_world(rng)
            p = _random_proposition(rng)
            assert evaluate(p, w) == oracle_evaluate(p, w), (p, w)

    def test_all_ratio_propositions_small_worlds_exhaustive(self):
        # reduced attribute space: 2 shapes x 2 colors, worlds up to 4 entities
        shapes = [Shape.SQUARE, Shape.CIRCLE]
        colors = [Color.RED, Color.BLUE]
        kinds = [entity(s.value, c.value, 0.1 * i, 0.1 * i) for i, (s, c) in enumerate(itertools.product(shapes, colors))]
        descriptors = [
            Descriptor(shape=s, color=c, generic=s is None)
            for s in shapes + [None]
            for c in colors + [None]
        ]
        for n in range(1, 5):
            for combo in itertools.combinations_with_replacement(kinds, n):
                w = world("w", *combo)
                for frac in ALLOWED_FRACTIONS:
                    for r, b in itertools.product(descriptors, repeat=2):
                        p = RatioEq(frac, r, b)
                        assert evaluate(p, w) == oracle_evaluate(p, w)


class TestQuantifierProperties:
    def test_count_partitions(self):
        # over worlds of at most 5 entities exactly one count 0..5 is true
        rng = Random(3)
        for _ in range(300):
            w = _random_world(rng, max_entities=5)
            r, b = _random_descriptor(rng), _random_descriptor(rng)
            hits = [evaluate(CountEq(n, r, b), w) for n in range(6)]
            assert sum(hits) == 1

    def test_ratio_invariant_under_entity_duplication(self):
        rng = Random(5)
        for _ in range(300):
            w = _random_world(rng)
            doubled = world("w2", *(w.entities + w.entities))
            p = _random_proposition(rng)
            if isinstance(p, RatioEq):
                assert evaluate(p, w) == evaluate(p, doubled)

    def test_relation_antisymmetry_with_unique_witnesses(self):
        w = world(
            "w",
            entity("square", "red", 0.2, 0.3),
            entity("circle", "blue", 0.7, 0.8),
            entity("cross", "green", 0.5, 0.5),
        )
        d1 = Descriptor(shape=Shape.SQUARE, color=Color.RED)
        d2 = Descriptor(shape=Shape.CIRCLE, color=Color.BLUE)
        for rel, flipped in [
            (Relation.ABOVE, Relation.BELOW),
            (Relation.LEFT_OF, Relation.RIGHT_OF),
        ]:
            assert evaluate(ExistsPair(rel, d1, d2), w)
            assert not evaluate(ExistsPair(flipped, d1, d2), w)


class TestSceneTuples:
    def test_spatial_tuples(self):
        ast = parse("A blue triangle is to the left of a semicircle.")
        assert scene_tuples(ast) == frozenset(
            {("o1", "blue"), ("o1", "triangle"), ("o2", "semicircle"), ("o1", "left_of", "o2")}
        )

    def test_bare_existential(self):
        assert scene_tuples(parse("There is a cross.")) == frozenset({("o1", "cross")})

    def test_count_tuples(self):
        ast = parse("Exactly two rectangles are green.")
        assert scene_tuples(ast) == frozenset(
            {("o1", "rectangle"), ("o1", "green"), ("two", "rectangle")}
        )

    def test_generic_existential_has_no_tuples(self):
        assert scene_tuples(parse("There is a shape.")) == frozenset()

    def test_ratio_includes_fraction_word(self):
        ast = parse("A quarter of the shapes are rectangles.")
        assert ("quarter", "shape") in scene_tuples(ast)
