"""The caption language: lexicon, sentence frames, parser and realizer.

Six surface frames share one closed lexicon:

  E1       "There is a green cross."
  E2a      "A shape is a gray triangle."
  E2b      "A rectangle is green."
  SPATIAL  "A blue triangle is to the left of a semicircle."
  COUNT    "Exactly two rectangles are green."
  RATIO    "A quarter of the shapes are rectangles."

Parsing is total: any string that is not derivable from the grammar yields
None (ungrammaticality is a verdict, not an exception).  The grammar is
unambiguous; the frames are distinguishable from their first two tokens, so
the recursive-descent parser below returns the unique derivation.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from random import Random
from typing import ClassVar, Union

from .worldmodel import Color, Shape


class Frame(Enum):
    E1 = "E1"
    E2A = "E2a"
    E2B = "E2b"
    SPATIAL = "SPATIAL"
    COUNT = "COUNT"
    RATIO = "RATIO"


class Relation(Enum):
    ABOVE = "above"
    BELOW = "below"
    LEFT_OF = "left_of"
    RIGHT_OF = "right_of"


class Kind(Enum):
    """Descriptor kind: generic, shape-only, color+generic, color+shape."""

    G = "G"
    S = "S"
    C = "C"
    CS = "CS"


@dataclass(frozen=True)
class Descriptor:
    """What a noun phrase says about an object.

    Exactly one of `shape` / `generic` holds: `generic` marks the noun
    "shape"/"shapes" carrying no shape value.  `color` is optional either way.
    """

    shape: Shape | None = None
    color: Color | None = None
    generic: bool = False


def kind_of(d: Descriptor) -> Kind:
    if d.shape is not None:
        return Kind.CS if d.color is not None else Kind.S
    return Kind.C if d.color is not None else Kind.G


@dataclass(frozen=True)
class Existential:
    """E1 has no predicate; E2a carries a noun phrase, E2b a bare color."""

    subject: Descriptor
    predicate: Descriptor | None = None
    frame: Frame = Frame.E1


@dataclass(frozen=True)
class Spatial:
    relation: Relation
    subject: Descriptor
    object: Descriptor
    frame: ClassVar[Frame] = Frame.SPATIAL


@dataclass(frozen=True)
class Count:
    number: int
    restrictor: Descriptor
    body: Descriptor
    frame: ClassVar[Frame] = Frame.COUNT


@dataclass(frozen=True)
class Ratio:
    fraction: Fraction
    restrictor: Descriptor
    body: Descriptor
    frame: ClassVar[Frame] = Frame.RATIO


CaptionAst = Union[Existential, Spatial, Count, Ratio]


@dataclass(frozen=True)
class Construction:
    """Reduced caption form: frame plus the kind of each descriptor slot."""

    frame: Frame
    kinds: tuple[Kind, ...]

    def __str__(self) -> str:
        return f"{self.frame.value}[{','.join(k.value for k in self.kinds)}]"


# ---------------------------------------------------------------------------
# lexicon

_PLURAL_OVERRIDES = {"cross": "crosses"}


def _plural(word: str) -> str:
    return _PLURAL_OVERRIDES.get(word, word + "s")


SHAPE_SINGULAR = {s: s.value for s in Shape}
SHAPE_PLURAL = {s: _plural(s.value) for s in Shape}
WORD_TO_SHAPE_SG = {v: k for k, v in SHAPE_SINGULAR.items()}
WORD_TO_SHAPE_PL = {v: k for k, v in SHAPE_PLURAL.items()}
WORD_TO_COLOR = {c.value: c for c in Color}

GENERIC_SINGULAR = "shape"
GENERIC_PLURAL = "shapes"

NUMBER_WORDS = ("zero", "one", "two", "three", "four", "five")
MAX_COUNT = 5

REL_WORDS: dict[Relation, tuple[str, ...]] = {
    Relation.ABOVE: ("above",),
    Relation.BELOW: ("below",),
    Relation.LEFT_OF: ("to", "the", "left", "of"),
    Relation.RIGHT_OF: ("to", "the", "right", "of"),
}

ALLOWED_FRACTIONS = (
    Fraction(1, 2),
    Fraction(1, 3),
    Fraction(1, 4),
    Fraction(2, 3),
    Fraction(3, 4),
)

FRACTION_SURFACES: dict[Fraction, tuple[tuple[str, ...], ...]] = {
    Fraction(1, 2): (("half", "the"), ("half", "of", "the")),
    Fraction(1, 3): (("a", "third", "of", "the"),),
    Fraction(1, 4): (("a", "quarter", "of", "the"),),
    Fraction(2, 3): (("two", "thirds", "of", "the"),),
    Fraction(3, 4): (("three", "quarters", "of", "the"),),
}

_VOWELS = "aeiou"
_WORD_RE = re.compile(r"[a-z]+")


def article_for(word: str) -> str:
    return "an" if word[0] in _VOWELS else "a"


def grammar_fingerprint() -> str:
    """Stable hash of the language definition, stored in dataset manifests."""
    parts = ["v1"]
    parts.append(",".join(s.value for s in Shape))
    parts.append(",".join(c.value for c in Color))
    parts.append(",".join(f.value for f in Frame))
    parts.append(",".join(" ".join(REL_WORDS[r]) for r in Relation))
    parts.append(",".join(NUMBER_WORDS))
    parts.append(",".join("|".join(" ".join(s) for s in FRACTION_SURFACES[f]) for f in ALLOWED_FRACTIONS))
    return hashlib.sha256(";".join(parts).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# tokenizer

def tokenize(text: str) -> list[str] | None:
    """Lowercase and split on single spaces; the terminal period becomes its
    own token.  Any other punctuation, doubled spaces or an empty input fail."""
    if not text:
        return None
    words = text.lower().split(" ")
    if any(w == "" for w in words):
        return None
    last = words[-1]
    if not last.endswith("."):
        return None
    words[-1] = last[:-1]
    if not words[-1]:
        return None
    for w in words:
        if not _WORD_RE.fullmatch(w):
            return None
    return words + ["."]


# ---------------------------------------------------------------------------
# parser

def _parse_np(body: list[str], i: int, plural: bool, article: bool) -> tuple[Descriptor, int] | None:
    n = len(body)
    j = i
    art = None
    if article:
        if j >= n or body[j] not in ("a", "an"):
            return None
        art = body[j]
        j += 1
    color = None
    if j < n and body[j] in WORD_TO_COLOR:
        color = WORD_TO_COLOR[body[j]]
        j += 1
    if j >= n:
        return None
    noun = body[j]
    generic_word = GENERIC_PLURAL if plural else GENERIC_SINGULAR
    shape_words = WORD_TO_SHAPE_PL if plural else WORD_TO_SHAPE_SG
    if noun == generic_word:
        desc = Descriptor(color=color, generic=True)
    elif noun in shape_words:
        desc = Descriptor(shape=shape_words[noun], color=color)
    else:
        return None
    if art is not None:
        first = body[i + 1]
        if art != article_for(first):
            return None
    return desc, j + 1


def _parse_pred(body: list[str], i: int, plural: bool) -> tuple[Descriptor, int] | None:
    n = len(body)
    # a bare color is only a predicate when it ends the clause
    if i < n and body[i] in WORD_TO_COLOR and i + 1 == n:
        return Descriptor(color=WORD_TO_COLOR[body[i]], generic=True), n
    return _parse_np(body, i, plural=plural, article=not plural)


def _parse_e1(body: list[str]) -> Existential | None:
    if body[:2] != ["there", "is"]:
        return None
    r = _parse_np(body, 2, plural=False, article=True)
    if r is None or r[1] != len(body):
        return None
    return Existential(subject=r[0], predicate=None, frame=Frame.E1)


def _match_relation(body: list[str], i: int) -> tuple[Relation, int] | None:
    for rel, words in REL_WORDS.items():
        if tuple(body[i : i + len(words)]) == words:
            return rel, i + len(words)
    return None


def _parse_np_initial(body: list[str]) -> CaptionAst | None:
    r = _parse_np(body, 0, plural=False, article=True)
    if r is None:
        return None
    subject, j = r
    n = len(body)
    if j >= n or body[j] != "is":
        return None
    j += 1
    if j >= n:
        return None
    t = body[j]
    if t in ("a", "an"):
        r2 = _parse_np(body, j, plural=False, article=True)
        if r2 is None or r2[1] != n:
            return None
        return Existential(subject=subject, predicate=r2[0], frame=Frame.E2A)
    if t in WORD_TO_COLOR:
        if j + 1 != n:
            return None
        return Existential(
            subject=subject,
            predicate=Descriptor(color=WORD_TO_COLOR[t], generic=True),
            frame=Frame.E2B,
        )
    rel = _match_relation(body, j)
    if rel is not None:
        relation, j2 = rel
        r2 = _parse_np(body, j2, plural=False, article=True)
        if r2 is None or r2[1] != n:
            return None
        return Spatial(relation=relation, subject=subject, object=r2[0])
    return None


def _parse_count(body: list[str]) -> Count | None:
    if len(body) < 2 or body[1] not in NUMBER_WORDS:
        return None
    number = NUMBER_WORDS.index(body[1])
    singular = number == 1
    r = _parse_np(body, 2, plural=not singular, article=False)
    if r is None:
        return None
    restrictor, j = r
    copula = "is" if singular else "are"
    if j >= len(body) or body[j] != copula:
        return None
    p = _parse_pred(body, j + 1, plural=not singular)
    if p is None or p[1] != len(body):
        return None
    return Count(number=number, restrictor=restrictor, body=p[0])


def _match_fraction(body: list[str]) -> tuple[Fraction, int] | None:
    for frac, surfaces in FRACTION_SURFACES.items():
        for words in surfaces:
            if tuple(body[: len(words)]) == words:
                return frac, len(words)
    return None


def _parse_ratio(body: list[str], fraction: Fraction, i: int) -> Ratio | None:
    r = _parse_np(body, i, plural=True, article=False)
    if r is None:
        return None
    restrictor, j = r
    if j >= len(body) or body[j] != "are":
        return None
    p = _parse_pred(body, j + 1, plural=True)
    if p is None or p[1] != len(body):
        return None
    return Ratio(fraction=fraction, restrictor=restrictor, body=p[0])


def parse(text: str) -> CaptionAst | None:
    """Parse a caption; None means the string is not in the language."""
    tokens = tokenize(text)
    if tokens is None:
        return None
    body = tokens[:-1]
    if not body:
        return None
    first = body[0]
    if first == "there":
        return _parse_e1(body)
    if first == "exactly":
        return _parse_count(body)
    frac = _match_fraction(body)
    if frac is not None:
        return _parse_ratio(body, frac[0], frac[1])
    if first in ("a", "an"):
        return _parse_np_initial(body)
    return None


# ---------------------------------------------------------------------------
# realizer

def _np_words(d: Descriptor, plural: bool, article: bool) -> list[str]:
    if d.generic:
        noun = GENERIC_PLURAL if plural else GENERIC_SINGULAR
    elif d.shape is not None:
        noun = SHAPE_PLURAL[d.shape] if plural else SHAPE_SINGULAR[d.shape]
    else:
        raise ValueError(f"descriptor {d} has neither shape nor generic noun")
    words = [noun] if d.color is None else [d.color.value, noun]
    if article:
        words.insert(0, article_for(words[0]))
    return words


def _pred_words(d: Descriptor, plural: bool, pick) -> list[str]:
    if d.color is not None and d.generic:
        # free surface choice: "... are green" vs "... are green shapes"
        if pick(("bare", "noun")) == "bare":
            return [d.color.value]
    return _np_words(d, plural=plural, article=not plural)


def realize(ast: CaptionAst, rng: Random | None = None) -> str:
    """Render an AST as a caption that parses back to the same AST.

    The rng resolves free surface choices (e.g. "half the" vs "half of the");
    None always takes the first option.
    """
    pick = (lambda options: options[0]) if rng is None else rng.choice
    if isinstance(ast, Existential):
        if ast.frame == Frame.E1:
            if ast.predicate is not None:
                raise ValueError("E1 takes no predicate")
            words = ["there", "is"] + _np_words(ast.subject, plural=False, article=True)
        elif ast.frame == Frame.E2A:
            if ast.predicate is None:
                raise ValueError("E2a requires a predicate noun phrase")
            words = (
                _np_words(ast.subject, plural=False, article=True)
                + ["is"]
                + _np_words(ast.predicate, plural=False, article=True)
            )
        elif ast.frame == Frame.E2B:
            p = ast.predicate
            if p is None or p.color is None or not p.generic:
                raise ValueError("E2b requires a bare-color predicate")
            words = _np_words(ast.subject, plural=False, article=True) + ["is", p.color.value]
        else:
            raise ValueError(f"existential cannot use frame {ast.frame}")
    elif isinstance(ast, Spatial):
        words = (
            _np_words(ast.subject, plural=False, article=True)
            + ["is"]
            + list(REL_WORDS[ast.relation])
            + _np_words(ast.object, plural=False, article=True)
        )
    elif isinstance(ast, Count):
        if not 0 <= ast.number <= MAX_COUNT:
            raise ValueError(f"count {ast.number} outside 0..{MAX_COUNT}")
        singular = ast.number == 1
        words = (
            ["exactly", NUMBER_WORDS[ast.number]]
            + _np_words(ast.restrictor, plural=not singular, article=False)
            + ["is" if singular else "are"]
            + _pred_words(ast.body, plural=not singular, pick=pick)
        )
    elif isinstance(ast, Ratio):
        if ast.fraction not in FRACTION_SURFACES:
            raise ValueError(f"fraction {ast.fraction} not in the language")
        words = (
            list(pick(FRACTION_SURFACES[ast.fraction]))
            + _np_words(ast.restrictor, plural=True, article=False)
            + ["are"]
            + _pred_words(ast.body, plural=True, pick=pick)
        )
    else:
        raise ValueError(f"not a caption AST: {ast!r}")
    sentence = " ".join(words) + "."
    return sentence[0].upper() + sentence[1:]


def construction_of(ast: CaptionAst) -> Construction:
    """Reduce a caption to its construction: frame + descriptor slot kinds.

    Existentials have one slot (the subject noun phrase); spatial, count and
    ratio captions have two.
    """
    if isinstance(ast, Existential):
        return Construction(ast.frame, (kind_of(ast.subject),))
    if isinstance(ast, Spatial):
        return Construction(Frame.SPATIAL, (kind_of(ast.subject), kind_of(ast.object)))
    if isinstance(ast, Count):
        return Construction(Frame.COUNT, (kind_of(ast.restrictor), kind_of(ast.body)))
    if isinstance(ast, Ratio):
        return Construction(Frame.RATIO, (kind_of(ast.restrictor), kind_of(ast.body)))
    raise ValueError(f"not a caption AST: {ast!r}")
