"""Random family networks and name assignment."""

from __future__ import annotations

import copy
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .. import resources
from ..errors import GenerationError
from ..unlearn import subseed
from .config import GenConfig

MALE, FEMALE = "male", "female"


@dataclass
class Person:
    id: int
    gender: str
    generation: int
    father: Optional[int] = None
    mother: Optional[int] = None
    spouse: Optional[int] = None
    children: list = field(default_factory=list)
    first_name: Optional[str] = None
    last_name: Optional[str] = None
    birth_year: Optional[int] = None
    birthplace: Optional[str] = None
    job: Optional[str] = None

    @property
    def name(self) -> str:
        if self.first_name is None:
            return f"P{self.id}"
        return f"{self.first_name} {self.last_name}"


@dataclass
class FamilyGraph:
    persons: list
    # index of the attempt that produced the graph; later stages seed from it
    attempt: int = 0

    def __len__(self) -> int:
        return len(self.persons)

    def __getitem__(self, pid: int) -> Person:
        return self.persons[pid]

    @property
    def parent_edges(self) -> dict:
        return {p.id: (p.father, p.mother) for p in self.persons if p.father is not None or p.mother is not None}

    @property
    def spouse_edges(self) -> list:
        """``(husband, wife)`` pairs."""
        return [(p.id, p.spouse) for p in self.persons if p.spouse is not None and p.gender == MALE]

    def parents(self, pid: int) -> list:
        p = self.persons[pid]
        return [x for x in (p.father, p.mother) if x is not None]

    def siblings(self, pid: int) -> list:
        p = self.persons[pid]
        if p.father is None and p.mother is None:
            return []
        parent = p.father if p.father is not None else p.mother
        return [c for c in self.persons[parent].children if c != pid
                and self.persons[c].father == p.father and self.persons[c].mother == p.mother]

    def couple_sizes(self) -> list:
        """Number of children of each couple, in husband id order."""
        return [len(self.persons[h].children) for h, _ in self.spouse_edges]

    def copy(self) -> "FamilyGraph":
        return copy.deepcopy(self)


def truncated_geometric(rng: random.Random, p: float, k_max: int) -> int:
    """Draw from ``P(k) ∝ p (1-p)^(k-1)`` on ``1..k_max``."""
    if p >= 1.0:
        return 1
    weights = [(1 - p) ** (k - 1) for k in range(1, k_max + 1)]
    u = rng.random() * sum(weights)
    acc = 0.0
    for k, w in enumerate(weights, 1):
        acc += w
        if u < acc:
            return k
    return k_max


def geometric_pmf(p: float, k_max: int) -> list:
    weights = [(1 - p) ** (k - 1) for k in range(1, k_max + 1)]
    total = sum(weights)
    return [w / total for w in weights]


def _other(gender: str) -> str:
    return FEMALE if gender == MALE else MALE


def _gender(rng: random.Random) -> str:
    return MALE if rng.random() < 0.5 else FEMALE


class _Builder:
    def __init__(self, config: GenConfig, rng: random.Random):
        self.cfg = config
        self.rng = rng
        self.persons: list = []
        self.queue: deque = deque()

    def room(self) -> int:
        return self.cfg.person_target - len(self.persons)

    def new(self, gender, generation, **links) -> Person:
        p = Person(len(self.persons), gender, generation, **links)
        self.persons.append(p)
        self.queue.append(p.id)
        return p

    def marry(self, a: Person, b: Person):
        a.spouse, b.spouse = b.id, a.id

    def add_children(self, husband: Person, wife: Person, k: int, generation: int, first: Optional[Person] = None):
        kids = [first] if first is not None else []
        for _ in range(k - len(kids)):
            kids.append(self.new(_gender(self.rng), generation))
        for c in kids:
            c.father, c.mother = husband.id, wife.id
            husband.children.append(c.id)
            wife.children.append(c.id)

    def expand(self, p: Person):
        cfg, rng = self.cfg, self.rng
        # parents, with the person's siblings
        if p.father is None and p.generation > 1 and rng.random() < cfg.parent_prob and self.room() >= 2:
            k = truncated_geometric(rng, cfg.children_geom_p, cfg.max_children)
            k = min(k, self.room() - 1)
            father = self.new(MALE, p.generation - 1)
            mother = self.new(FEMALE, p.generation - 1)
            self.marry(father, mother)
            self.add_children(father, mother, k, p.generation, first=p)
        # spouse, always together with children
        if (p.spouse is None and p.generation < cfg.max_generations
                and rng.random() < cfg.spouse_prob and rng.random() < cfg.children_prob
                and self.room() >= 2):
            k = truncated_geometric(rng, cfg.children_geom_p, cfg.max_children)
            k = min(k, self.room() - 1)
            spouse = self.new(_other(p.gender), p.generation)
            self.marry(p, spouse)
            husband, wife = (p, spouse) if p.gender == MALE else (spouse, p)
            self.add_children(husband, wife, k, p.generation + 1)

    def run(self) -> list:
        self.new(_gender(self.rng), self.cfg.root_generation)
        while self.queue and self.room() > 0:
            self.expand(self.persons[self.queue.popleft()])
        return self.persons


def _trivial(config: GenConfig) -> bool:
    return config.parent_prob == 0 and (config.spouse_prob == 0 or config.children_prob == 0)


def generate_family_graph(config: GenConfig, first_attempt: int = 0) -> FamilyGraph:
    """Expand a family network breadth-first from one root person.

    Attempts are reseeded until the network reaches exactly
    ``config.person_target`` people.  With every expansion probability at 0
    the single root person is returned.
    """
    if _trivial(config):
        rng = random.Random(subseed(config.seed, "graph", first_attempt))
        return FamilyGraph([Person(0, _gender(rng), config.root_generation)], first_attempt)
    for attempt in range(first_attempt, first_attempt + config.max_retries):
        rng = random.Random(subseed(config.seed, "graph", attempt))
        persons = _Builder(config, rng).run()
        if len(persons) == config.person_target:
            return FamilyGraph(persons, attempt)
    raise GenerationError(
        f"no family network of {config.person_target} people after {config.max_retries} attempts"
    )


def assign_names(graph: FamilyGraph, config: GenConfig) -> FamilyGraph:
    """A copy of ``graph`` with gendered first names and inherited surnames.

    Children carry their father's surname; a married woman takes her
    husband's with probability ``last_name_switch_prob``.  Full names are
    unique; a pool too small for that raises ``GenerationError``.
    """
    g = graph.copy()
    rng = random.Random(subseed(config.seed, "names", g.attempt))
    surnames = resources.last_names()
    pools = {MALE: resources.first_names(MALE), FEMALE: resources.first_names(FEMALE)}
    order = sorted(g.persons, key=lambda p: (p.generation, p.id))
    for p in order:
        if p.father is not None:
            p.last_name = g[p.father].last_name
        else:
            p.last_name = rng.choice(surnames)
    for p in order:
        if p.gender == FEMALE and p.spouse is not None and rng.random() < config.last_name_switch_prob:
            p.last_name = g[p.spouse].last_name
    taken: set = set()
    for p in order:
        free = [f for f in pools[p.gender] if f != p.last_name and (f, p.last_name) not in taken]
        if not free:
            raise GenerationError(f"first-name pool exhausted for surname {p.last_name!r}")
        p.first_name = rng.choice(free)
        taken.add((p.first_name, p.last_name))
    return g
