import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from dub.kb import KnowledgeBase  # noqa: E402
from dub.rules import RuleSet, rule_from_atoms  # noqa: E402

# criterion number -> (name, passed, detail), filled by test_acceptance
ACCEPTANCE: dict = {}


def to_dub(facts, rules, relations):
    kb = KnowledgeBase.from_triples(facts, relations=relations)
    rs = RuleSet([rule_from_atoms(body, head) for body, head in rules])
    return kb, rs


INTRO_FACTS = [
    ("Camila Flores", "husband", "Xavier Ross"),
    ("Wyatt Ross", "father", "Xavier Ross"),
]
INTRO_RULE = "(X, husband, Z) & (Y, father, Z) -> (X, child, Y)"


@pytest.fixture
def intro_example():
    from dub.rules import parse_rule_file

    return KnowledgeBase.from_triples(INTRO_FACTS), parse_rule_file(INTRO_RULE)


@pytest.fixture(scope="session")
def small_dataset():
    """A 30-person generated dataset shared by the slower tests."""
    from dub.genkb import GenConfig, generate_dataset

    cfg = GenConfig(seed=3, person_target=30, relation_fact_target=90, bio_fact_target=60)
    return generate_dataset(cfg)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {name}: {'PASS' if ok else 'FAIL'}  {detail}")
