"""Caption-set metrics: grammaticality, truthfulness, diversity, BLEU-4 and
scene-tuple F1.

One bit-exact BLEU definition is frozen here: sentence-level, modified n-gram
precisions for n=1..4 clipped against the per-n-gram maximum over references,
brevity penalty exp(1 - r/c) for candidates shorter than the closest
reference (length ties resolved toward the shorter reference), and zero
precisions at n >= 2 smoothed to 1 / (2 * candidate n-gram count).  A zero
unigram precision is not smoothed: the score is 0.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .grammar import CaptionAst, Construction, construction_of, parse
from .semantics import Verdict, evaluate, scene_tuples, to_proposition
from .worldmodel import WorldModel


def bleu_tokenize(text: str) -> list[str]:
    """Lenient tokenization for surface metrics; periods never count as tokens."""
    tokens = []
    for raw in text.lower().split():
        t = raw.rstrip(".")
        if t:
            tokens.append(t)
    return tokens


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4_sentence(candidate: Sequence[str], references: Sequence[Sequence[str]]) -> float:
    """Sentence BLEU-4 of a token sequence against reference token sequences."""
    if not candidate or not references:
        return 0.0
    log_sum = 0.0
    for n in range(1, 5):
        total = len(candidate) - n + 1
        if total <= 0:
            if n == 1:
                return 0.0
            log_sum += 0.25 * math.log(0.5)
            continue
        counts = _ngram_counts(candidate, n)
        max_ref: Counter = Counter()
        for ref in references:
            for gram, c in _ngram_counts(ref, n).items():
                if c > max_ref[gram]:
                    max_ref[gram] = c
        clipped = sum(min(c, max_ref[gram]) for gram, c in counts.items())
        if clipped == 0:
            if n == 1:
                return 0.0
            precision = 1.0 / (2.0 * total)
        else:
            precision = clipped / total
        log_sum += 0.25 * math.log(precision)
    c = len(candidate)
    r = min((len(ref) for ref in references), key=lambda length: (abs(length - c), length))
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return brevity * math.exp(log_sum)


def tuple_f1(
    candidate_ast: CaptionAst | None, reference_asts: Sequence[CaptionAst]
) -> tuple[float, float, float]:
    """Precision/recall/F1 of candidate scene tuples against the union of the
    reference scene tuples, with candidate object ids aligned to the union by
    the assignment that maximizes matches.  Ungrammatical candidates (None)
    score (0, 0, 0)."""
    if candidate_ast is None:
        return (0.0, 0.0, 0.0)
    union: set[tuple[str, ...]] = set()
    for ref in reference_asts:
        union |= scene_tuples(ref)
    cand = scene_tuples(candidate_ast)
    if not cand or not union:
        return (0.0, 0.0, 0.0)
    assignments = ({"o1": "o1", "o2": "o2"}, {"o1": "o2", "o2": "o1"})
    best = 0
    for sigma in assignments:
        mapped = {tuple(sigma.get(part, part) for part in fact) for fact in cand}
        best = max(best, len(mapped & union))
    precision = best / len(cand)
    recall = best / len(union)
    f1 = 0.0 if precision + recall == 0.0 else 2.0 * precision * recall / (precision + recall)
    return (precision, recall, f1)


def grammaticality_ratio(candidates: Sequence[str]) -> float:
    if not candidates:
        raise ValueError("no candidates")
    return sum(1 for c in candidates if parse(c) is not None) / len(candidates)


def truthfulness_ratio(candidates: Sequence[str], worlds: Sequence[WorldModel]) -> float:
    """Fraction of candidates that are grammatical and true of their world."""
    if not candidates:
        raise ValueError("no candidates")
    if len(candidates) != len(worlds):
        raise ValueError(f"{len(candidates)} candidates vs {len(worlds)} worlds")
    hits = 0
    for text, world in zip(candidates, worlds):
        ast = parse(text)
        if ast is not None and evaluate(to_proposition(ast), world):
            hits += 1
    return hits / len(candidates)


def diversity_ratio(
    candidate_constructions: Sequence[Construction],
    reference_constructions: Sequence[Construction],
) -> float:
    """Distinct candidate constructions over distinct reference constructions.

    May exceed 1.0; duplicates are ignored on both sides.
    """
    if not reference_constructions:
        raise ValueError("no reference constructions")
    return len(set(candidate_constructions)) / len(set(reference_constructions))


@dataclass(frozen=True)
class RunInstance:
    id: str
    world: WorldModel
    references: tuple[str, ...]
    candidate: str


@dataclass(frozen=True)
class RunInput:
    task: str
    instances: tuple[RunInstance, ...]


@dataclass(frozen=True)
class PerInstance:
    id: str
    verdict: Verdict
    bleu4: float
    tuple_precision: float
    tuple_recall: float
    tuple_f1: float
    construction: Construction | None


@dataclass(frozen=True)
class GtdReport:
    task: str
    n_instances: int
    grammaticality: float
    truthfulness: float
    diversity: float
    bleu4: float
    tuple_f1: float
    per_instance: tuple[PerInstance, ...]

    def to_json_dict(self) -> dict:
        return {
            "task": self.task,
            "n_instances": self.n_instances,
            "grammaticality": round(self.grammaticality, 6),
            "truthfulness": round(self.truthfulness, 6),
            "diversity": round(self.diversity, 6),
            "bleu4": round(self.bleu4, 6),
            "tuple_f1": round(self.tuple_f1, 6),
            "per_instance": [
                {
                    "id": rec.id,
                    "verdict": rec.verdict.value,
                    "bleu4": round(rec.bleu4, 6),
                    "tuple_precision": round(rec.tuple_precision, 6),
                    "tuple_recall": round(rec.tuple_recall, 6),
                    "construction": None if rec.construction is None else str(rec.construction),
                }
                for rec in self.per_instance
            ],
        }

    def summary_line(self) -> str:
        return (
            f"G={self.grammaticality:.6f} T={self.truthfulness:.6f} "
            f"D={self.diversity:.6f} BLEU4={self.bleu4:.6f} F1={self.tuple_f1:.6f}"
        )


def load_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def evaluate_run(run: RunInput) -> GtdReport:
    """Score one candidate set: the three ratios plus mean BLEU-4 and tuple F1.

    The diversity denominator uses the construction of the first reference of
    each instance, matching the candidate set in cardinality; the remaining
    references only serve BLEU and tuple F1.
    """
    if not run.instances:
        raise ValueError("empty run")
    records = []
    candidate_constructions: list[Construction] = []
    reference_constructions: list[Construction] = []
    truthful = 0
    for inst in sorted(run.instances, key=lambda r: r.id):
        if not inst.references:
            raise ValueError(f"instance {inst.id} has no references")
        ref_asts = []
        for ref in inst.references:
            ast = parse(ref)
            if ast is None:
                raise ValueError(f"ungrammatical reference for instance {inst.id}: {ref!r}")
            ref_asts.append(ast)
        reference_constructions.append(construction_of(ref_asts[0]))

        cand_ast = parse(inst.candidate)
        if cand_ast is None:
            verdict = Verdict.UNGRAMMATICAL
            construction = None
        else:
            truth = evaluate(to_proposition(cand_ast), inst.world)
            verdict = Verdict.TRUE if truth else Verdict.FALSE
            truthful += truth
            construction = construction_of(cand_ast)
            candidate_constructions.append(construction)

        bleu = bleu4_sentence(
            bleu_tokenize(inst.candidate), [bleu_tokenize(r) for r in inst.references]
        )
        precision, recall, f1 = tuple_f1(cand_ast, ref_asts)
        records.append(
            PerInstance(
                id=inst.id,
                verdict=verdict,
                bleu4=bleu,
                tuple_precision=precision,
                tuple_recall=recall,
                tuple_f1=f1,
                construction=construction,
            )
        )
    n = len(records)
    return GtdReport(
        task=run.task,
        n_instances=n,
        grammaticality=sum(1 for r in records if r.verdict is not Verdict.UNGRAMMATICAL) / n,
        truthfulness=truthful / n,
        diversity=len(set(candidate_constructions)) / len(set(reference_constructions)),
        bleu4=sum(r.bleu4 for r in records) / n,
        tuple_f1=sum(r.tuple_f1 for r in records) / n,
        per_instance=tuple(records),
    )
