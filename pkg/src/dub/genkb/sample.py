"""Drawing the knowledge base from the ground truth."""

from __future__ import annotations

import random

from ..errors import GenerationError
from ..kb import KnowledgeBase, fact_from_names
from ..unlearn import subseed
from .config import GenConfig


def _weighted_order(rng: random.Random, items: list, weights: list) -> list:
    """Weighted sampling without replacement: sort by ``u ** (1 / w)``."""
    keyed = []
    for item, w in zip(items, weights):
        if w > 0:
            keyed.append((-(rng.random() ** (1.0 / w)), item))
    keyed.sort()
    return [item for _, item in keyed]


def sample_knowledge_base(ground: KnowledgeBase, bios, config: GenConfig, attempt: int = 0) -> KnowledgeBase:
    """Relation facts from ``ground`` plus biography facts, at the configured sizes.

    A coverage pass first gives every person in the ground truth one relation
    fact, then each weighted relation is topped up to ``relation_floor``.  The
    rest are drawn without replacement with probability weighted by relation.
    Biography facts are drawn uniformly.
    """
    rng = random.Random(subseed(config.seed, "sample", attempt))
    n_rel, n_bio = config.relation_fact_target, config.bio_fact_target
    if n_rel > len(ground):
        raise GenerationError(f"relation target {n_rel} exceeds the {len(ground)} ground-truth facts")
    bio_facts = sorted({fact_from_names(ground.objects, ground.relations, t, intern=True) for t in bios})
    if n_bio > len(bio_facts):
        raise GenerationError(f"biography target {n_bio} exceeds the {len(bio_facts)} available facts")

    def weight_of(rel):
        return float(config.relation_weights.get(rel, 0.0))

    def weight(f):
        return weight_of(ground.relations.name(f.relation))

    facts = ground.sorted_facts()
    involving: dict = {}
    for f in facts:
        involving.setdefault(f.subject, []).append(f)
        involving.setdefault(f.object, []).append(f)
    chosen: set = set()
    covered: set = set()
    for person in sorted(involving):
        if person in covered:
            continue
        cands = involving[person]
        ws = [weight(f) or 1e-9 for f in cands]
        pick = rng.choices(cands, ws)[0]
        chosen.add(pick)
        covered.update((pick.subject, pick.object))
    if len(chosen) > n_rel:
        raise GenerationError(f"covering every person takes {len(chosen)} facts, above the target {n_rel}")
    for rel in sorted(ground.relations.names()):
        if weight_of(rel) <= 0:
            continue
        rid = ground.relations.id(rel)
        have = sum(1 for f in chosen if f.relation == rid)
        spare = [f for f in ground.match(rid) if f not in chosen]
        chosen.update(rng.sample(spare, min(max(config.relation_floor - have, 0), len(spare))))
    if len(chosen) > n_rel:
        raise GenerationError(f"coverage and relation floors take {len(chosen)} facts, above the target {n_rel}")
    rest = [f for f in facts if f not in chosen]
    order = _weighted_order(rng, rest, [weight(f) for f in rest])
    need = n_rel - len(chosen)
    if need > len(order):
        raise GenerationError("relation weights leave too few facts to reach the target")
    chosen.update(order[:need])
    chosen.update(rng.sample(bio_facts, n_bio))
    return ground.with_facts(chosen)
