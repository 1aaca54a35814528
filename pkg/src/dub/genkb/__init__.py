"""Synthetic family knowledge bases with biographies and QA pairs."""

from .bio import generate_biographies
from .config import GenConfig
from .dataset import BUNDLE_FILES, Dataset, generate_dataset, write_bundle
from .graph import FamilyGraph, Person, assign_names, generate_family_graph, geometric_pmf, truncated_geometric
from .ground import derive_ground_truth, kinship_triples
from .qa import render_qa
from .sample import sample_knowledge_base

__all__ = [
    "BUNDLE_FILES", "Dataset", "FamilyGraph", "GenConfig", "Person", "assign_names", "derive_ground_truth",
    "generate_biographies", "generate_dataset", "generate_family_graph", "geometric_pmf", "kinship_triples",
    "render_qa", "sample_knowledge_base", "truncated_geometric", "write_bundle",
]
