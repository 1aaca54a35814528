"""Seeded selection of evaluation targets: a fixed number of facts per relation."""

from __future__ import annotations

import logging
import random
from typing import Iterable

from .kb import FAMILY_RELATIONS, KnowledgeBase
from .unlearn import subseed

log = logging.getLogger(__name__)

PER_RELATION = 5


def select_targets(kb: KnowledgeBase, per_relation: int = PER_RELATION, seed: int = 0,
                   relations: Iterable[str] = FAMILY_RELATIONS) -> list:
    """``per_relation`` facts drawn uniformly from each relation, in relation order.

    Relations with fewer facts contribute all of them (with a warning).
    """
    rng = random.Random(subseed(seed, "targets"))
    out = []
    for rel in relations:
        rid = kb.relations.get(rel)
        pool = list(kb.match(rid)) if rid is not None else []
        if len(pool) < per_relation:
            log.warning("relation %r has only %d facts; wanted %d targets", rel, len(pool), per_relation)
        out.extend(rng.sample(pool, min(per_relation, len(pool))))
    return out
