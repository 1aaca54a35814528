"""End-to-end dataset generation and the on-disk bundle."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from .. import resources
from ..errors import GenerationError
from ..io import atomic_write_json, atomic_write_text
from ..kb import KnowledgeBase, fact_from_names, kb_to_dict
from ..rules import RuleSet
from .bio import generate_biographies
from .config import GenConfig
from .graph import FamilyGraph, assign_names, generate_family_graph
from .ground import derive_ground_truth
from .qa import render_qa
from .sample import sample_knowledge_base

BUNDLE_FILES = ("kb.json", "ground.json", "rules.txt", "qa.jsonl", "config.json", "persons.csv")


@dataclass
class Dataset:
    config: GenConfig
    graph: FamilyGraph
    ground: KnowledgeBase
    bios: list
    kb: KnowledgeBase
    rules: RuleSet

    def truth(self) -> KnowledgeBase:
        """Ground-truth relations together with every biography fact."""
        bio = [fact_from_names(self.ground.objects, self.ground.relations, t, intern=True) for t in self.bios]
        return self.ground.with_facts(self.ground.facts | set(bio))


def generate_dataset(config: GenConfig, rules: RuleSet = None) -> Dataset:
    """Graph, names, biographies, ground truth and sampled KB for one seed.

    A graph whose birth years cannot be placed in the configured window is
    dropped and the next graph attempt is used.
    """
    rules = rules if rules is not None else resources.default_rule_set()
    start = 0
    last_error = None
    while start < config.max_retries:
        graph = generate_family_graph(config, first_attempt=start)
        try:
            named = assign_names(graph, config)
            full, bios = generate_biographies(named, config)
        except GenerationError as exc:
            last_error = exc
            start = graph.attempt + 1
            continue
        ground = derive_ground_truth(full, rules)
        kb = sample_knowledge_base(ground, bios, config, full.attempt)
        return Dataset(config, full, ground, bios, kb, rules)
    raise GenerationError(f"dataset generation failed after {config.max_retries} attempts: {last_error}")


def _persons_csv(graph: FamilyGraph) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "first_name", "last_name", "gender", "generation", "birth_year", "birthplace", "job",
                "father", "mother", "spouse"])
    for p in graph.persons:
        w.writerow([p.id, p.first_name, p.last_name, p.gender, p.generation, p.birth_year, p.birthplace, p.job,
                    "" if p.father is None else p.father, "" if p.mother is None else p.mother,
                    "" if p.spouse is None else p.spouse])
    return buf.getvalue()


def _qa_lines(kb: KnowledgeBase) -> str:
    lines = []
    for f in kb.sorted_facts():
        triple = kb.names(f)
        q, a = render_qa(triple)
        lines.append(json.dumps({"question": q, "answer": a, "fact": list(triple)}, ensure_ascii=False))
    return "\n".join(lines) + "\n"


def write_bundle(ds: Dataset, out_dir) -> list:
    """Write the six bundle files into ``out_dir``; returns their paths."""
    out = Path(out_dir)
    cfg = ds.config.to_dict()
    cfg["attempt"] = ds.graph.attempt
    return [
        atomic_write_json(out / "kb.json", kb_to_dict(ds.kb)),
        atomic_write_json(out / "ground.json", kb_to_dict(ds.truth())),
        atomic_write_text(out / "rules.txt", ds.rules.format()),
        atomic_write_text(out / "qa.jsonl", _qa_lines(ds.kb)),
        atomic_write_json(out / "config.json", cfg),
        atomic_write_text(out / "persons.csv", _persons_csv(ds.graph)),
    ]
