"""Deductive closure, deducibility checks and rule instantiations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import kernel
from .errors import ResourceLimitError
from .kb import Fact, KnowledgeBase, facts_to_names
from .rules import RuleSet

DEFAULT_MAX_DERIVED = 1_000_000


@dataclass(frozen=True)
class Instantiation:
    """A ground rule instance: ``body_facts`` jointly imply ``head_fact``."""

    rule_index: int
    body_facts: tuple
    head_fact: Fact


class ClosedKB:
    """The closure of ``base`` under ``rules`` with one witness per derived fact."""

    def __init__(self, base: KnowledgeBase, closure: KnowledgeBase, provenance: dict):
        self.base = base
        self.closure = closure
        self.provenance = provenance

    def derived(self) -> frozenset:
        return self.closure.facts - self.base.facts

    def witness(self, fact: Fact) -> Optional[tuple]:
        """``(rule_index, body_facts)`` that first derived ``fact``, if derived."""
        return self.provenance.get(fact)

    def __contains__(self, fact) -> bool:
        return fact in self.closure

    def __len__(self) -> int:
        return len(self.closure)

    def provenance_dict(self) -> dict:
        kb = self.closure
        entries = []
        for fact in sorted(self.provenance):
            rule, body = self.provenance[fact]
            entries.append({"fact": list(kb.names(fact)), "rule": rule, "body": facts_to_names(kb, body)})
        return {"provenance": entries}


def _encode(facts: Iterable[Fact]) -> np.ndarray:
    rows = list(facts)
    if not rows:
        return np.empty((0, 3), dtype=np.int32)
    return np.ascontiguousarray(np.array(rows, dtype=np.int32))


def _run(kb, facts_arr, rules_c, goal, max_derived, want_prov, backend=None):
    fn = kernel.KERNELS[backend] if backend else kernel.closure
    out, prov, status = fn(
        facts_arr, len(kb.objects), len(kb.relations), rules_c, goal, max_derived, want_prov
    )
    if status == kernel.LIMIT:
        raise ResourceLimitError(f"forward chaining exceeded {max_derived} derived facts")
    return out, prov, status


def deductive_closure(
    kb: KnowledgeBase,
    rules: RuleSet,
    max_derived: int = DEFAULT_MAX_DERIVED,
    backend: Optional[str] = None,
) -> ClosedKB:
    """Least fixpoint of ``kb`` under ``rules`` (semi-naive evaluation)."""
    rules_c = kernel.compile_rules(rules, kb.relations)
    base = kb.sorted_facts()
    out, prov, _ = _run(kb, _encode(base), rules_c, None, max_derived, True, backend)
    all_facts = [Fact(*row) for row in out.tolist()]
    provenance = {}
    prov_rule, prov_start, prov_body = (p.tolist() for p in prov)
    n0 = len(base)
    for j, rule_idx in enumerate(prov_rule):
        body = tuple(all_facts[i] for i in prov_body[prov_start[j]:prov_start[j + 1]])
        provenance[all_facts[n0 + j]] = (rule_idx, body)
    return ClosedKB(kb, kb.with_facts(all_facts), provenance)


def is_deducible(
    fact: Fact,
    kb: KnowledgeBase,
    rules: RuleSet,
    max_derived: int = DEFAULT_MAX_DERIVED,
    early_exit: bool = True,
) -> bool:
    """Whether ``fact`` lies in the closure of ``kb`` under ``rules``."""
    fact = Fact(*fact)
    if fact in kb:
        return True
    if not early_exit:
        return fact in deductive_closure(kb, rules, max_derived).closure
    return Deducer(kb, rules, fact.relation, max_derived, cache=False).deducible(fact)


class Deducer:
    """Repeated deducibility checks of one relation against subsets of a KB.

    Only rules that can contribute to ``relation`` are compiled, and only KB
    facts over relations those rules mention are fed to the kernel.  Results
    are memoised on the (relevant part of the) removed set.
    """

    def __init__(
        self,
        kb: KnowledgeBase,
        rules: RuleSet,
        relation: int,
        max_derived: int = DEFAULT_MAX_DERIVED,
        cache: bool = True,
    ):
        self.kb = kb
        self.max_derived = max_derived
        rel_name = kb.relations.name(relation)
        idx = rules.relevant_rules(rel_name)
        self.rules_c = kernel.compile_rules(rules, kb.relations, idx)
        used = {relation}
        for i in idx:
            r = rules[i]
            used.update(kb.relations.get(a.relation) for a in r.body + (r.head,))
        self.facts = [f for f in kb.sorted_facts() if f.relation in used]
        self.row = {f: i for i, f in enumerate(self.facts)}
        self.arr = _encode(self.facts)
        self._cache: Optional[dict] = {} if cache else None
        self.calls = 0
        self.kernel_calls = 0

    def deducible(self, fact: Fact, removed: Iterable[Fact] = ()) -> bool:
        """``fact`` in the closure of ``kb`` minus ``removed``."""
        self.calls += 1
        rows = sorted({self.row[f] for f in removed if f in self.row})
        fact = Fact(*fact)
        r = self.row.get(fact)
        if r is not None and r not in rows:
            return True
        key = (fact, tuple(rows))
        if self._cache is not None:
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        if rows:
            mask = np.ones(len(self.facts), dtype=bool)
            mask[rows] = False
            arr = np.ascontiguousarray(self.arr[mask])
        else:
            arr = self.arr
        self.kernel_calls += 1
        _, _, status = _run(self.kb, arr, self.rules_c, tuple(fact), self.max_derived, False)
        result = status == kernel.GOAL_FOUND
        if self._cache is not None:
            self._cache[key] = result
        return result


def implying_instantiations(fact: Fact, closed: ClosedKB, rules: RuleSet) -> list:
    """Every rule instance over the closure whose head is ``fact``.

    Ordered by rule index, then by the body fact tuple.
    """
    kb = closed.closure
    fact = Fact(*fact)
    rel_name = kb.relations.name(fact.relation)
    found = []
    for ri, rule in enumerate(rules):
        if rule.head.relation != rel_name:
            continue
        binding = {rule.head.subject: fact.subject}
        if rule.head.object in binding and binding[rule.head.object] != fact.object:
            continue
        binding[rule.head.object] = fact.object
        body = [(a.subject, kb.relation_id(a.relation), a.object) for a in rule.body]
        per_rule = []
        _enumerate(kb, body, binding, [None] * len(body), set(), per_rule)
        per_rule.sort()
        found.extend(Instantiation(ri, b, fact) for b in per_rule)
    return found


def _enumerate(kb, body, binding, chosen, done, out):
    if len(done) == len(body):
        out.append(tuple(chosen))
        return
    # most-bound remaining atom first
    pick = max(
        (i for i in range(len(body)) if i not in done),
        key=lambda i: ((body[i][0] in binding) + (body[i][2] in binding), -i),
    )
    sv, rel, ov = body[pick]
    done.add(pick)
    for f in kb.match(rel, binding.get(sv), binding.get(ov)):
        if sv == ov and f.subject != f.object:
            continue
        if sv in binding and binding[sv] != f.subject:
            continue
        added = []
        if sv not in binding:
            binding[sv] = f.subject
            added.append(sv)
        if ov not in binding:
            binding[ov] = f.object
            added.append(ov)
        elif binding[ov] != f.object:
            for v in added:
                del binding[v]
            continue
        chosen[pick] = f
        _enumerate(kb, body, binding, chosen, done, out)
        for v in added:
            del binding[v]
    done.discard(pick)
    chosen[pick] = None
