"""Bundled data files: name lists, state populations, job eras, rule sets.

``DUB_DATA_DIR`` points the loaders at a replacement directory holding files
with the same names.
"""

import csv
import json
import os
from functools import lru_cache
from pathlib import Path

from .rules import RuleSet, parse_rule_file

_BUNDLED = Path(__file__).with_name("data")


def data_dir() -> Path:
    override = os.environ.get("DUB_DATA_DIR")
    return Path(override) if override else _BUNDLED


def _read(name: str) -> str:
    return (data_dir() / name).read_text(encoding="utf-8")


def _lines(name: str) -> tuple:
    return tuple(x.strip() for x in _read(name).splitlines() if x.strip() and not x.startswith("#"))


@lru_cache(maxsize=None)
def _cached(directory: str, kind: str):
    if kind == "male":
        return _lines("first_names_male.txt")
    if kind == "female":
        return _lines("first_names_female.txt")
    if kind == "last":
        return _lines("last_names.txt")
    if kind == "states":
        rows = list(csv.DictReader(_read("us_states.csv").splitlines()))
        return tuple((r["state"], int(r["population"])) for r in rows)
    if kind == "jobs":
        return tuple((job, int(lo), int(hi)) for job, (lo, hi) in json.loads(_read("jobs.json")).items())
    raise KeyError(kind)


def first_names(gender: str) -> tuple:
    return _cached(str(data_dir()), gender)


def last_names() -> tuple:
    return _cached(str(data_dir()), "last")


def state_weights() -> tuple:
    """``(state, population)`` pairs."""
    return _cached(str(data_dir()), "states")


def job_eras() -> tuple:
    """``(job, first_decade, last_decade)`` triples."""
    return _cached(str(data_dir()), "jobs")


def jobs_for_decade(decade: int) -> list:
    return sorted(job for job, lo, hi in job_eras() if lo <= decade <= hi)


def all_jobs() -> set:
    return {job for job, _, _ in job_eras()}


def default_rule_set() -> RuleSet:
    """The 48-rule family rule set."""
    return parse_rule_file(_read("default_rules.txt"))


def published_child_rules() -> RuleSet:
    """The ten child-head rules exactly as published."""
    return parse_rule_file(_read("published_child_rules.txt"))
