"""Birth years, birthplaces and jobs."""

from __future__ import annotations

import random

from .. import resources
from ..errors import GenerationError
from ..unlearn import subseed
from .config import GenConfig
from .graph import FamilyGraph


def truncated_gauss(rng: random.Random, mean: float, sd: float, lo: int, hi: int, tries: int = 1000) -> int:
    """Integer draw from a rounded Gaussian restricted to ``[lo, hi]``."""
    if lo > hi:
        raise GenerationError(f"empty birth-year window [{lo}, {hi}]")
    for _ in range(tries):
        x = round(rng.gauss(mean, sd))
        if lo <= x <= hi:
            return x
    # far tail: fall back to the nearest bound
    return min(max(round(mean), lo), hi)


def job_decade(birth_year: int, config: GenConfig) -> int:
    return min(max((birth_year + config.job_age) // 10 * 10, 1900), 2020)


def _years(g: FamilyGraph, cfg: GenConfig, rng: random.Random):
    by_gen: dict = {}
    for p in g.persons:
        by_gen.setdefault(p.generation, []).append(p)
    for gen in sorted(by_gen):
        people = by_gen[gen]
        for p in people:
            if p.mother is None:
                continue
            mother = g[p.mother]
            lo = max(mother.birth_year + cfg.child_offset_min, cfg.year_min)
            hi = min(mother.birth_year + cfg.child_offset_max, cfg.year_max)
            if p.father is not None:
                lo = max(lo, g[p.father].birth_year + 1)
            p.birth_year = truncated_gauss(rng, mother.birth_year + cfg.child_offset_mean, cfg.child_offset_sd, lo, hi)
        pending = [p for p in people if p.birth_year is None]
        for p in pending:
            if p.birth_year is not None:
                continue
            spouse = g[p.spouse] if p.spouse is not None else None
            if spouse is None or spouse.birth_year is None:
                mean = cfg.root_year_mean + cfg.generation_gap * (gen - 1)
                p.birth_year = truncated_gauss(rng, mean, cfg.root_year_sd, cfg.year_min, cfg.year_max)
                if spouse is None:
                    continue
                anchor, p = p, spouse
            else:
                anchor = spouse
            # offset is husband minus wife
            sign = 1 if p.gender == "male" else -1
            mean = anchor.birth_year + sign * cfg.couple_offset_mean
            lo = anchor.birth_year + (cfg.couple_offset_min if sign > 0 else -cfg.couple_offset_max)
            hi = anchor.birth_year + (cfg.couple_offset_max if sign > 0 else -cfg.couple_offset_min)
            p.birth_year = truncated_gauss(rng, mean, cfg.couple_offset_sd, max(lo, cfg.year_min), min(hi, cfg.year_max))


def generate_biographies(graph: FamilyGraph, config: GenConfig) -> tuple:
    """Fill in birth year, birthplace and job; return ``(graph, bio triples)``.

    The graph is copied.  Triples are ``(name, relation, value)`` strings,
    three per person.
    """
    g = graph.copy()
    if any(p.first_name is None for p in g.persons):
        raise GenerationError("biographies need a named graph")
    rng = random.Random(subseed(config.seed, "bios", g.attempt))
    _years(g, config, rng)
    states = resources.state_weights()
    names = [s for s, _ in states]
    weights = [w for _, w in states]
    for p in sorted(g.persons, key=lambda q: (q.generation, q.id)):
        parents = g.parents(p.id)
        if parents and rng.random() < config.same_birthplace_prob:
            p.birthplace = g[parents[rng.randrange(len(parents))]].birthplace
        else:
            p.birthplace = rng.choices(names, weights)[0]
        jobs = resources.jobs_for_decade(job_decade(p.birth_year, config))
        if not jobs:
            raise GenerationError(f"no job listed for the decade of {p.birth_year}")
        p.job = rng.choice(jobs)
    triples = []
    for p in g.persons:
        triples.append((p.name, "birthyear", str(p.birth_year)))
        triples.append((p.name, "birthplace", p.birthplace))
        triples.append((p.name, "job", p.job))
    return g, triples
