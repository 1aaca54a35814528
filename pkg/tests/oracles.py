"""Reference implementations the tests compare the package against.

Nothing here imports the engine: facts are plain ``(s, r, o)`` string
triples and rules are ``(body, head)`` tuples of ``(var, rel, var)`` atoms.
"""

from __future__ import annotations

import itertools
import random

import numpy as np


# -- naive forward chaining --------------------------------------------------


def _bindings(body, facts, binding=None):
    binding = binding or {}
    if not body:
        yield binding
        return
    (x, rel, y), rest = body[0], body[1:]
    for s, r, o in facts:
        if r != rel:
            continue
        b = dict(binding)
        if b.setdefault(x, s) != s or b.setdefault(y, o) != o:
            continue
        yield from _bindings(rest, facts, b)


def naive_closure(facts, rules) -> frozenset:
    """Apply every rule to the whole fact set until nothing changes."""
    current = set(facts)
    while True:
        new = set()
        snapshot = list(current)
        for body, (hx, hr, hy) in rules:
            for b in _bindings(list(body), snapshot):
                head = (b[hx], hr, b[hy])
                if head not in current:
                    new.add(head)
        if not new:
            return frozenset(current)
        current |= new


def brute_force_minimal_sets(target, facts, rules) -> set:
    """Every minimal U within ``facts`` with ``target`` outside the closure of ``facts - U``."""
    facts = sorted(facts)
    found: list = []
    for size in range(1, len(facts) + 1):
        for combo in itertools.combinations(facts, size):
            u = frozenset(combo)
            if any(m <= u for m in found):
                continue
            if target not in naive_closure(set(facts) - u, rules):
                found.append(u)
    return set(found)


# -- random logic instances ----------------------------------------------------

VARS = ("A", "B", "C", "D")


def random_rule(rng: random.Random, relations, max_body=3):
    n = rng.randint(1, max_body)
    body = []
    for _ in range(n):
        body.append((rng.choice(VARS), rng.choice(relations), rng.choice(VARS)))
    used = sorted({v for a in body for v in (a[0], a[2])})
    head = (rng.choice(used), rng.choice(relations), rng.choice(used))
    return tuple(body), head


def _canonical(rule):
    body, head = rule
    names: dict = {}
    def ren(v):
        return names.setdefault(v, f"V{len(names)}")
    return tuple((ren(x), r, ren(y)) for x, r, y in body), (ren(head[0]), head[1], ren(head[2]))


def random_instance(rng: random.Random, max_facts=50, max_rules=10, max_body=3, n_objects=None,
                    n_relations=4):
    """``(facts, rules, relations)`` with facts drawn partly from their own closure.

    Mixing in derived facts makes targets that are deducible in several ways
    common, which is where the interesting minimal sets live.
    """
    relations = [f"r{i}" for i in range(n_relations)]
    objects = [f"o{i}" for i in range(n_objects or rng.randint(2, 6))]
    rules = []
    seen = set()
    for _ in range(rng.randint(1, max_rules)):
        r = random_rule(rng, relations, max_body)
        if _canonical(r) not in seen:
            seen.add(_canonical(r))
            rules.append(r)
    n_base = rng.randint(1, max(1, max_facts // 2))
    base = {(rng.choice(objects), rng.choice(relations), rng.choice(objects)) for _ in range(n_base)}
    derived = sorted(naive_closure(base, rules) - base)
    room = max_facts - len(base)
    extra = rng.sample(derived, min(len(derived), rng.randint(0, max(room, 0))))
    return sorted(base | set(extra)), rules, relations


def rule_text(rule) -> str:
    body, head = rule
    fmt = "({}, {}, {})".format
    return " & ".join(fmt(*a) for a in body) + " -> " + fmt(*head)


# -- kinship semantics ---------------------------------------------------------


def kinship_oracle(persons) -> set:
    """Kinship triples from parent/spouse links via adjacency-matrix algebra.

    ``persons`` is a sequence of ``(name, gender, father_index, mother_index,
    spouse_index)`` tuples.  ``(X, r, Y)`` reads "Y is X's r".
    """
    n = len(persons)
    names = [p[0] for p in persons]
    male = np.array([p[1] == "male" for p in persons])
    father = np.zeros((n, n), dtype=np.int64)
    mother = np.zeros((n, n), dtype=np.int64)
    spouse = np.zeros((n, n), dtype=np.int64)
    for i, (_, _, f, m, s) in enumerate(persons):
        if f is not None:
            father[i, f] = 1
        if m is not None:
            mother[i, m] = 1
        if s is not None:
            spouse[i, s] = 1
    parent = father + mother
    # full siblings share both parents
    sib = ((father @ father.T) > 0) & ((mother @ mother.T) > 0)
    np.fill_diagonal(sib, False)
    auntuncle = (parent @ sib.astype(np.int64)) > 0  # [i, j]: j is a sibling of i's parent
    rel = {
        "father": father > 0,
        "mother": mother > 0,
        "child": parent.T > 0,
        "husband": (spouse > 0) & male[None, :],
        "wife": (spouse > 0) & ~male[None, :],
        "brother": sib & male[None, :],
        "sister": sib & ~male[None, :],
        "uncle": auntuncle & male[None, :],
        "aunt": auntuncle & ~male[None, :],
        "nephew": auntuncle.T & male[None, :],
        "niece": auntuncle.T & ~male[None, :],
    }
    out = set()
    for r, mat in rel.items():
        for i, j in zip(*np.nonzero(mat)):
            out.add((names[i], r, names[j]))
    return out
