"""Recall/accuracy scoring of unlearning results against minimal sets.

All ratios are kept as :class:`fractions.Fraction` so numerators and
denominators stay exact; floats only appear in serialised reports.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import ValidationError
from .kb import BIO_RELATIONS, FAMILY_RELATIONS, Fact, KnowledgeBase, fact_from_names, facts_to_names
from .unlearn import MinimalSet, MinimalSetCollection, subseed

log = logging.getLogger(__name__)

METRICS = ("acc_at_recall", "recall_at_acc", "acc_at_superficial")


@dataclass(frozen=True)
class SweepPoint:
    label: str
    removed: frozenset


@dataclass
class UnlearnSubmission:
    target: Fact
    sweep_points: list
    method: Optional[str] = None
    model: Optional[str] = None

    def to_dict(self, kb: KnowledgeBase) -> dict:
        out = {"target": list(kb.names(self.target))}
        if self.method is not None:
            out["method"] = self.method
        if self.model is not None:
            out["model"] = self.model
        out["sweep"] = [{"label": p.label, "removed": facts_to_names(kb, p.removed)} for p in self.sweep_points]
        return out

    @classmethod
    def from_dict(cls, data: dict, kb: KnowledgeBase) -> "UnlearnSubmission":
        """Load a submission, keeping only removed facts that are in ``kb``."""
        try:
            target = kb.fact(*data["target"])
            sweep = data["sweep"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed submission: {exc}") from None
        points = []
        for entry in sweep:
            removed, unknown = set(), 0
            for triple in entry.get("removed", []):
                try:
                    f = fact_from_names(kb.objects, kb.relations, triple)
                except ValidationError:
                    unknown += 1
                    continue
                if f in kb:
                    removed.add(f)
                else:
                    unknown += 1
            if unknown:
                log.warning("sweep point %r: ignored %d removed facts not in the KB", entry.get("label"), unknown)
            points.append(SweepPoint(str(entry.get("label", len(points))), frozenset(removed)))
        return cls(target, points, data.get("method"), data.get("model"))


def recall(removed: Iterable[Fact], collection: MinimalSetCollection) -> tuple:
    """Best coverage ``|removed ∩ U| / |U|`` over the collection and its argmax.

    Ties go to the smallest set, then to the lexicographically first one.
    """
    if not collection.sets:
        raise ValidationError("recall needs a non-empty minimal-set collection")
    removed = frozenset(removed)
    best, best_key = None, None
    for s in collection.sets:
        value = Fraction(len(removed & s.members), len(s.members))
        key = (-value, len(s.members), s.sorted_members())
        if best_key is None or key < best_key:
            best, best_key = s, key
    return -best_key[0], best


def accuracy(removed: Iterable[Fact], argmax: MinimalSet, kb: KnowledgeBase,
             relations: Optional[Iterable[int]] = None) -> Optional[Fraction]:
    """Share of ``kb`` outside ``argmax`` that survived the removal.

    With ``relations`` the universe is restricted to facts over those relation
    ids; an empty restricted universe yields ``None``.
    """
    if not argmax.members <= kb.facts:
        raise ValidationError("the minimal set is not contained in the knowledge base")
    removed = frozenset(removed)
    universe = kb.facts - argmax.members
    if relations is not None:
        rels = set(relations)
        universe = {f for f in universe if f.relation in rels}
        if not universe:
            return None
    elif not universe:
        raise ValidationError("accuracy undefined: the minimal set covers the whole knowledge base")
    return Fraction(len(universe - removed), len(universe))


@dataclass
class PointReport:
    label: str
    recall: Fraction
    accuracy: Fraction
    argmax_set: MinimalSet
    relation_accuracy: Optional[Fraction]
    biography_accuracy: Optional[Fraction]
    superficially_unlearned: bool


@dataclass
class SweepReport:
    target: Fact
    per_point: list
    acc_at_recall: Optional[Fraction]
    recall_at_acc: Optional[Fraction]
    acc_at_superficial: Optional[Fraction]
    threshold: Fraction = Fraction(4, 5)
    method: Optional[str] = None
    model: Optional[str] = None

    def to_dict(self, kb: KnowledgeBase) -> dict:
        return {
            "target": list(kb.names(self.target)),
            "method": self.method,
            "model": self.model,
            "threshold": _num(self.threshold),
            "acc_at_recall": _num(self.acc_at_recall),
            "recall_at_acc": _num(self.recall_at_acc),
            "acc_at_superficial": _num(self.acc_at_superficial),
            "per_point": [
                {
                    "label": p.label,
                    "recall": _num(p.recall),
                    "recall_exact": _exact(p.recall),
                    "accuracy": _num(p.accuracy),
                    "accuracy_exact": _exact(p.accuracy),
                    "relation_accuracy": _num(p.relation_accuracy),
                    "biography_accuracy": _num(p.biography_accuracy),
                    "superficially_unlearned": p.superficially_unlearned,
                    "argmax_set": facts_to_names(kb, p.argmax_set.members),
                }
                for p in self.per_point
            ],
        }

    @classmethod
    def from_dict(cls, data: dict, kb: KnowledgeBase) -> "SweepReport":
        target = kb.fact(*data["target"])
        points = []
        for p in data["per_point"]:
            members = frozenset(fact_from_names(kb.objects, kb.relations, t) for t in p["argmax_set"])
            points.append(PointReport(
                p["label"], Fraction(p["recall_exact"]), Fraction(p["accuracy_exact"]),
                MinimalSet(target, members), _frac(p.get("relation_accuracy")),
                _frac(p.get("biography_accuracy")), bool(p["superficially_unlearned"]),
            ))
        return cls(target, points, _frac(data.get("acc_at_recall")), _frac(data.get("recall_at_acc")),
                   _frac(data.get("acc_at_superficial")), _frac(data.get("threshold", 0.8)),
                   data.get("method"), data.get("model"))


def _num(x):
    return None if x is None else float(x)


def _exact(x):
    return None if x is None else f"{x.numerator}/{x.denominator}"


def _frac(x):
    return None if x is None else Fraction(str(x))


def _group_ids(kb: KnowledgeBase, names: Sequence[str]) -> set:
    return {kb.relations.get(n) for n in names if n in kb.relations}


def _best(values) -> Optional[Fraction]:
    values = [v for v in values if v is not None]
    return max(values) if values else None


def evaluate_sweep(submission: UnlearnSubmission, kb: KnowledgeBase, collection: MinimalSetCollection,
                   threshold=Fraction(4, 5)) -> SweepReport:
    """Score every sweep point and derive the threshold metrics.

    ``acc_at_recall`` is the best accuracy among points with recall at least
    ``threshold`` (``None`` if no point qualifies); ``recall_at_acc`` mirrors
    it; ``acc_at_superficial`` is the best accuracy among points that removed
    the target itself.
    """
    if submission.target != collection.target:
        raise ValidationError("submission and collection are for different targets")
    threshold = Fraction(str(threshold)) if not isinstance(threshold, Fraction) else threshold
    family, bio = _group_ids(kb, FAMILY_RELATIONS), _group_ids(kb, BIO_RELATIONS)
    points = []
    for sp in submission.sweep_points:
        removed = sp.removed & kb.facts
        rec, arg = recall(removed, collection)
        points.append(PointReport(
            sp.label, rec, accuracy(removed, arg, kb), arg,
            accuracy(removed, arg, kb, family), accuracy(removed, arg, kb, bio),
            submission.target in removed,
        ))
    return SweepReport(
        submission.target,
        points,
        _best(p.accuracy for p in points if p.recall >= threshold),
        _best(p.recall for p in points if p.accuracy >= threshold),
        _best(p.accuracy for p in points if p.superficially_unlearned),
        threshold,
        submission.method,
        submission.model,
    )


@dataclass
class BenchmarkReport:
    reports: list
    aggregates: dict
    curve: list
    method: Optional[str] = None
    model: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self, kb: Optional[KnowledgeBase] = None) -> dict:
        out = {
            "method": self.method,
            "model": self.model,
            "n_targets": len(self.reports),
            "std": "population",
            "aggregates": self.aggregates,
            "curve": self.curve,
        }
        out.update(self.extra)
        if kb is not None:
            out["reports"] = [r.to_dict(kb) for r in self.reports]
        return out


def _mean_std(values: list) -> tuple:
    mean = sum(values, Fraction(0)) / len(values)
    var = sum(((v - mean) ** 2 for v in values), Fraction(0)) / len(values)
    return mean, math.sqrt(var)


def aggregate(reports: Sequence[SweepReport]) -> BenchmarkReport:
    """Means and population standard deviations over targets.

    Absent threshold metrics count as 0 and are tallied under ``imputed``.
    The curve holds, per sweep label, the mean accuracy and recall.
    """
    if not reports:
        raise ValidationError("aggregate needs at least one sweep report")
    reports = list(reports)
    aggregates = {}
    for name in METRICS:
        raw = [getattr(r, name) for r in reports]
        values = [Fraction(0) if v is None else v for v in raw]
        mean, std = _mean_std(values)
        aggregates[name] = {"mean": float(mean), "std": std, "imputed": sum(v is None for v in raw)}
    by_label: dict = {}
    for r in reports:
        for p in r.per_point:
            by_label.setdefault(p.label, []).append(p)
    curve = []
    for label, pts in by_label.items():
        acc = sum((p.accuracy for p in pts), Fraction(0)) / len(pts)
        rec = sum((p.recall for p in pts), Fraction(0)) / len(pts)
        curve.append({"label": label, "mean_accuracy": float(acc), "mean_recall": float(rec), "n": len(pts)})
    methods = {r.method for r in reports}
    models = {r.model for r in reports}
    return BenchmarkReport(
        reports, aggregates, curve,
        methods.pop() if len(methods) == 1 else None,
        models.pop() if len(models) == 1 else None,
    )


REFERENCE_KINDS = ("oracle_minimal", "target_only", "random_over")


def reference_unlearner(kind: str, target: Fact, kb: KnowledgeBase, collection: MinimalSetCollection,
                        p: float = 0.2, seed: int = 0, label: Optional[str] = None) -> UnlearnSubmission:
    """Simulated unlearner producing one sweep point.

    ``oracle_minimal`` removes one minimal set picked at random,
    ``target_only`` removes only the target, ``random_over`` removes one
    minimal set plus ``round(p * n)`` of the ``n`` other facts.
    """
    rng = random.Random(subseed(seed, kind))
    if kind == "target_only":
        removed = {target}
    elif kind in ("oracle_minimal", "random_over"):
        if not collection.sets:
            raise ValidationError("reference unlearner needs a non-empty collection")
        chosen = collection.sets[rng.randrange(len(collection.sets))].members
        removed = set(chosen)
        if kind == "random_over":
            if not 0 <= p <= 1:
                raise ValidationError("p must lie in [0, 1]")
            rest = sorted(kb.facts - chosen)
            removed.update(rng.sample(rest, round(p * len(rest))))
    else:
        raise ValidationError(f"unknown reference unlearner {kind!r}; choose from {', '.join(REFERENCE_KINDS)}")
    if label is None:
        label = f"p={p:g}" if kind == "random_over" else kind
    return UnlearnSubmission(Fact(*target), [SweepPoint(label, frozenset(removed))], method=kind)


def reference_sweep(kind: str, target: Fact, kb: KnowledgeBase, collection: MinimalSetCollection,
                    ps: Sequence[float], seed: int = 0) -> UnlearnSubmission:
    """A multi-point sweep: one ``reference_unlearner`` call per ``p``."""
    points = []
    for i, p in enumerate(ps):
        sub = reference_unlearner(kind, target, kb, collection, p, subseed(seed, i))
        points.extend(sub.sweep_points)
    return UnlearnSubmission(Fact(*target), points, method=kind)
