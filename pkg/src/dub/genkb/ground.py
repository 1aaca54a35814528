"""Ground-truth kinship facts read directly off a family graph."""

from __future__ import annotations

from typing import Optional

from .. import resources
from ..deduction import deductive_closure
from ..errors import GenerationError
from ..kb import DEFAULT_RELATIONS, KnowledgeBase, SymbolTable
from ..rules import RuleSet
from .graph import MALE, FamilyGraph


def kinship_triples(graph: FamilyGraph) -> set:
    """Every true ``(x, r, y)`` over the 11 family relations, by name.

    Siblings share both parents; aunts and uncles are by blood only.
    """
    out = set()
    name = {p.id: p.name for p in graph.persons}
    male = {p.id: p.gender == MALE for p in graph.persons}
    for p in graph.persons:
        x = p.id
        for c in p.children:
            out.add((name[x], "child", name[c]))
        if p.father is not None:
            out.add((name[x], "father", name[p.father]))
        if p.mother is not None:
            out.add((name[x], "mother", name[p.mother]))
        if p.spouse is not None:
            out.add((name[x], "husband" if male[p.spouse] else "wife", name[p.spouse]))
        for s in graph.siblings(x):
            out.add((name[x], "brother" if male[s] else "sister", name[s]))
        for parent in graph.parents(x):
            for s in graph.siblings(parent):
                out.add((name[x], "uncle" if male[s] else "aunt", name[s]))
                out.add((name[s], "nephew" if male[x] else "niece", name[x]))
    return out


def derive_ground_truth(graph: FamilyGraph, rules: Optional[RuleSet] = None,
                       objects: Optional[SymbolTable] = None, check: bool = True) -> KnowledgeBase:
    """All true family facts of ``graph``, checked to be closed under ``rules``.

    ``rules`` defaults to the bundled 48-rule set.  A closure that adds
    anything means the rules disagree with the kinship definitions and raises
    ``GenerationError``.
    """
    objects = objects if objects is not None else SymbolTable()
    for p in graph.persons:
        objects.intern(p.name)
    ground = KnowledgeBase.from_triples(sorted(kinship_triples(graph)), SymbolTable(DEFAULT_RELATIONS), objects)
    if check:
        rules = rules if rules is not None else resources.default_rule_set()
        closed = deductive_closure(ground, rules)
        extra = closed.derived()
        if extra:
            shown = ", ".join(ground.format_fact(f) for f in sorted(extra)[:5])
            raise GenerationError(f"rule set over-derives {len(extra)} facts on the ground truth, e.g. {shown}")
    return ground
