"""Randomised construction of minimal deep-unlearning sets.

``dus`` grows a set of facts whose removal blocks every derivation of the
target, ``rp`` prunes such a set until no single member can be put back, and
``mdus`` repeats the pair under independent seeds and collects the distinct
results.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .deduction import DEFAULT_MAX_DERIVED, ClosedKB, Deducer, deductive_closure, implying_instantiations
from .errors import NotInKnowledgeBaseError, PreconditionError, ValidationError
from .kb import Fact, KnowledgeBase, facts_from_names, facts_to_names
from .rules import RuleSet


def subseed(seed: int, *path) -> int:
    """A 64-bit seed mixed from ``seed`` and a counter path."""
    text = ":".join(str(x) for x in (seed,) + path).encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class MinimalSet:
    target: Fact
    members: frozenset

    def sorted_members(self) -> tuple:
        return tuple(sorted(self.members))

    def sort_key(self):
        return (len(self.members), self.sorted_members())

    def __len__(self) -> int:
        return len(self.members)


@dataclass
class MinimalSetCollection:
    target: Fact
    sets: tuple
    n_seed: int
    seed: Optional[int] = None
    stats: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def to_dict(self, kb: KnowledgeBase) -> dict:
        out = {"target": list(kb.names(self.target)), "n_seed": self.n_seed}
        if self.seed is not None:
            out["seed"] = self.seed
        out["sets"] = [facts_to_names(kb, s.members) for s in self.sets]
        return out

    @classmethod
    def from_dict(cls, data: dict, kb: KnowledgeBase) -> "MinimalSetCollection":
        try:
            target = kb.fact(*data["target"])
            sets = [MinimalSet(target, frozenset(facts_from_names(kb, s))) for s in data["sets"]]
            n_seed = int(data.get("n_seed", 0))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed minimal-set collection: {exc}") from None
        return cls(target, _dedupe(sets), n_seed, data.get("seed"))


def _dedupe(sets: Iterable[MinimalSet]) -> tuple:
    unique = {s.members: s for s in sets}
    return tuple(sorted(unique.values(), key=MinimalSet.sort_key))


class _Context:
    """Per-target state shared by the runs of one ``mdus`` call."""

    def __init__(self, target: Fact, kb: KnowledgeBase, rules: RuleSet, max_derived: int,
                 closed: Optional[ClosedKB] = None):
        self.target = target
        self.kb = kb
        self.rules = rules
        self.max_derived = max_derived
        self._closed = closed
        self._deducer: Optional[Deducer] = None
        self._insts: dict = {}

    @property
    def closed(self) -> ClosedKB:
        if self._closed is None:
            self._closed = deductive_closure(self.kb, self.rules, self.max_derived)
        return self._closed

    @property
    def deducer(self) -> Deducer:
        if self._deducer is None:
            self._deducer = Deducer(self.kb, self.rules, self.target.relation, self.max_derived)
        return self._deducer

    def instantiations(self, fact: Fact) -> list:
        got = self._insts.get(fact)
        if got is None:
            got = [tuple(dict.fromkeys(i.body_facts)) for i in implying_instantiations(fact, self.closed, self.rules)]
            self._insts[fact] = got
        return got


def _check_target(target: Fact, kb: KnowledgeBase) -> Fact:
    target = Fact(*target)
    if target not in kb:
        raise NotInKnowledgeBaseError(f"target {kb.format_fact(target)} is not in the knowledge base")
    return target


def dus(target: Fact, kb: KnowledgeBase, rules: RuleSet, seed: int = 0, *,
        max_derived: int = DEFAULT_MAX_DERIVED, _ctx: Optional[_Context] = None,
        _rng: Optional[random.Random] = None) -> frozenset:
    """One random deep-unlearning set for ``target`` (a subset of ``kb``).

    Every instantiation, over the closure of ``kb``, of a rule deriving a fact
    in the growing set gets one of its body facts added, unless the set
    already hits it.
    """
    target = _check_target(target, kb)
    ctx = _ctx or _Context(target, kb, rules, max_derived)
    rng = _rng or random.Random(seed)
    chosen = {target}
    todo = [target]
    while todo:
        cur = todo.pop(rng.randrange(len(todo)))
        insts = list(ctx.instantiations(cur))
        rng.shuffle(insts)
        for body in insts:
            if chosen.isdisjoint(body):
                pick = body[rng.randrange(len(body))]
                chosen.add(pick)
                todo.append(pick)
    return frozenset(f for f in chosen if f in kb)


def rp(target: Fact, kb: KnowledgeBase, rules: RuleSet, u: Iterable[Fact], seed: int = 0, *,
       max_derived: int = DEFAULT_MAX_DERIVED, _ctx: Optional[_Context] = None,
       _rng: Optional[random.Random] = None) -> MinimalSet:
    """Prune the deep-unlearning set ``u`` down to a minimal one.

    Members are visited in a random order and dropped whenever the target
    stays underivable without them; passes repeat until one drops nothing.
    """
    target = Fact(*target)
    ctx = _ctx or _Context(target, kb, rules, max_derived)
    rng = _rng or random.Random(seed)
    current = set(u)
    if ctx.deducer.deducible(target, current):
        raise PreconditionError("input set is not a deep-unlearning set: the target is still deducible")
    while True:
        dropped = False
        order = sorted(current)
        rng.shuffle(order)
        for f in order:
            current.discard(f)
            if ctx.deducer.deducible(target, current):
                current.add(f)
            else:
                dropped = True
        if not dropped:
            break
    return MinimalSet(target, frozenset(current))


def mdus(target: Fact, kb: KnowledgeBase, rules: RuleSet, n_seed: int = 100, seed: int = 0, *,
         max_derived: int = DEFAULT_MAX_DERIVED, closed: Optional[ClosedKB] = None) -> MinimalSetCollection:
    """Distinct minimal deep-unlearning sets found over ``n_seed`` runs.

    Run ``i`` draws from its own generator seeded by ``subseed(seed, i)``;
    results are sorted by (size, members) after deduplication.
    """
    if n_seed < 1:
        raise ValidationError("n_seed must be positive")
    target = _check_target(target, kb)
    ctx = _Context(target, kb, rules, max_derived, closed)
    found = []
    for i in range(n_seed):
        rng = random.Random(subseed(seed, i))
        u = dus(target, kb, rules, _ctx=ctx, _rng=rng)
        found.append(rp(target, kb, rules, u, _ctx=ctx, _rng=rng))
    stats = {"deducibility_checks": ctx.deducer.calls, "closure_runs": ctx.deducer.kernel_calls}
    return MinimalSetCollection(target, _dedupe(found), n_seed, seed, stats)


def verify_minimal(target: Fact, kb: KnowledgeBase, rules: RuleSet, u: Iterable[Fact], *,
                   max_derived: int = DEFAULT_MAX_DERIVED) -> bool:
    """Deep and minimal: removing ``u`` blocks ``target`` and no single member is superfluous.

    Deducibility only grows as removed facts are put back, so checking
    single-element restorations covers every proper subset.
    """
    target = Fact(*target)
    u = set(u)
    if not u <= kb.facts:
        return False
    deducer = Deducer(kb, rules, target.relation, max_derived, cache=False)
    if deducer.deducible(target, u):
        return False
    return all(deducer.deducible(target, u - {f}) for f in u)
