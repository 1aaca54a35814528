import json
import random
import shutil

import pytest
from scipy import stats

from oracles import kinship_oracle

from dub import resources
from dub.deduction import deductive_closure
from dub.errors import GenerationError, UnknownRelationError, ValidationError
from dub.genkb import (
    BUNDLE_FILES, GenConfig, assign_names, derive_ground_truth, generate_biographies, generate_dataset,
    generate_family_graph, render_qa, sample_knowledge_base, truncated_geometric, write_bundle,
)
from dub.genkb.bio import job_decade
from dub.genkb.graph import _Builder
from dub.kb import BIO_RELATIONS, FAMILY_RELATIONS, load_kb

SEEDS = range(6)


@pytest.fixture(scope="module")
def datasets():
    return [generate_dataset(GenConfig(seed=s)) for s in SEEDS]


def test_default_shape(datasets):
    for ds in datasets:
        counts = ds.kb.relation_counts()
        assert len(ds.graph) == 100
        assert sum(counts.get(r, 0) for r in FAMILY_RELATIONS) == 400
        assert sum(counts.get(r, 0) for r in BIO_RELATIONS) == 300


def test_graph_structure(datasets):
    for ds in datasets:
        g = ds.graph
        for p in g.persons:
            assert 1 <= p.generation <= 4
            if p.spouse is not None:
                s = g[p.spouse]
                assert s.spouse == p.id and s.gender != p.gender and s.generation == p.generation
            if p.father is not None or p.mother is not None:
                f, m = g[p.father], g[p.mother]
                assert (f.gender, m.gender) == ("male", "female")
                assert f.spouse == m.id
                assert f.generation == m.generation == p.generation - 1
                assert p.id in f.children and p.id in m.children
        assert all(1 <= k <= 4 for k in g.couple_sizes())


def test_children_per_couple_follow_truncated_geometric():
    # one couple per run and a large person budget, so the cap never binds
    cfg = GenConfig(person_target=100, parent_prob=0.0, root_generation=1, max_generations=2)
    rng = random.Random(7)
    counts = [0] * 4
    couples = 0
    runs = 3000
    for _ in range(runs):
        persons = _Builder(cfg, rng).run()
        if len(persons) > 1:
            couples += 1
            counts[len(persons) - 3] += 1
    p = cfg.children_geom_p
    weights = [p * (1 - p) ** (k - 1) for k in range(1, 5)]
    expected = [couples * w / sum(weights) for w in weights]
    assert stats.chisquare(counts, expected).pvalue > 0.001
    share = couples / runs
    assert abs(share - cfg.spouse_prob * cfg.children_prob) < 4 * (0.72 * 0.28 / runs) ** 0.5


def test_truncated_geometric_sampler():
    rng = random.Random(1)
    draws = [truncated_geometric(rng, 0.4, 4) for _ in range(20000)]
    counts = [draws.count(k) for k in range(1, 5)]
    weights = [0.4 * 0.6 ** (k - 1) for k in range(1, 5)]
    expected = [len(draws) * w / sum(weights) for w in weights]
    assert stats.chisquare(counts, expected).pvalue > 0.001
    assert truncated_geometric(rng, 1.0, 4) == 1


def test_ground_truth_matches_kinship_semantics(datasets):
    for ds in datasets:
        g = ds.graph
        persons = [(p.name, p.gender, p.father, p.mother, p.spouse) for p in g.persons]
        assert ds.ground.name_triples() == kinship_oracle(persons)
        assert deductive_closure(ds.ground, ds.rules).closure == ds.ground


def test_names(datasets):
    for ds in datasets:
        g = ds.graph
        names = [p.name for p in g.persons]
        assert len(set(names)) == len(names)
        for p in g.persons:
            assert p.first_name in resources.first_names(p.gender)
            assert p.first_name != p.last_name
            if p.father is not None and not (p.gender == "female" and p.spouse is not None):
                assert p.last_name == g[p.father].last_name


def test_biographies(datasets):
    states = {s for s, _ in resources.state_weights()}
    for ds in datasets:
        g, cfg = ds.graph, ds.config
        for p in g.persons:
            assert cfg.year_min <= p.birth_year <= cfg.year_max
            assert p.birthplace in states
            assert p.job in resources.jobs_for_decade(job_decade(p.birth_year, cfg))
            if p.mother is not None:
                assert 18 <= p.birth_year - g[p.mother].birth_year <= 40
                assert p.birth_year > g[p.father].birth_year
            if p.spouse is not None and p.gender == "male":
                w = g[p.spouse]
                if p.mother is None or w.mother is None:
                    assert -10 <= p.birth_year - w.birth_year <= 10
        bio = {(s, r) for s, r, _ in ds.bios}
        assert len(ds.bios) == len(bio) == 3 * len(g)


def test_birthplace_is_mostly_inherited(datasets):
    same = total = 0
    for ds in datasets:
        g = ds.graph
        for p in g.persons:
            if p.father is not None:
                total += 1
                same += p.birthplace in (g[p.father].birthplace, g[p.mother].birthplace)
    assert same / total > 0.8


def test_sample_covers_every_person_and_keeps_floors(datasets):
    for ds in datasets:
        in_kb = set()
        for f in ds.kb.facts:
            if ds.kb.relations.name(f.relation) in FAMILY_RELATIONS:
                in_kb.update((f.subject, f.object))
        people = {ds.kb.objects.id(p.name) for p in ds.graph.persons}
        assert people <= in_kb
        counts = ds.kb.relation_counts()
        for r in FAMILY_RELATIONS:
            assert counts.get(r, 0) >= min(5, ds.ground.relation_counts().get(r, 0))
        assert ds.kb.facts - ds.truth().facts == set()


def test_top_three_relations(datasets):
    ok = 0
    for ds in datasets:
        c = ds.kb.relation_counts()
        ok += set(sorted(FAMILY_RELATIONS, key=lambda r: -c.get(r, 0))[:3]) == {"child", "father", "mother"}
    assert ok >= len(datasets) - 1


def test_sampling_targets_beyond_the_ground_truth(small_dataset):
    ds = small_dataset
    cfg = GenConfig(**{**ds.config.to_dict(), "relation_fact_target": len(ds.ground) + 1})
    with pytest.raises(GenerationError):
        sample_knowledge_base(ds.ground, ds.bios, cfg)


def test_determinism():
    a = generate_dataset(GenConfig(seed=11, person_target=40, relation_fact_target=150, bio_fact_target=100))
    b = generate_dataset(GenConfig(seed=11, person_target=40, relation_fact_target=150, bio_fact_target=100))
    assert a.kb.name_triples() == b.kb.name_triples()
    assert [p.name for p in a.graph.persons] == [p.name for p in b.graph.persons]


def test_single_person_when_nothing_expands():
    cfg = GenConfig(parent_prob=0.0, spouse_prob=0.0)
    g = generate_family_graph(cfg)
    assert len(g) == 1
    named = assign_names(g, cfg)
    full, bios = generate_biographies(named, cfg)
    assert len(bios) == 3 and len(derive_ground_truth(full)) == 0


def test_unreachable_person_target():
    cfg = GenConfig(person_target=50, parent_prob=0.05, spouse_prob=0.05, max_retries=3)
    with pytest.raises(GenerationError):
        generate_family_graph(cfg)


def test_config_validation():
    with pytest.raises(ValidationError):
        GenConfig(parent_prob=1.5)
    with pytest.raises(ValidationError):
        GenConfig(root_generation=5)
    with pytest.raises(ValidationError):
        GenConfig.from_dict({"seed": 1, "bogus": 2})
    cfg = GenConfig(seed=9, person_target=30)
    assert GenConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_qa_templates():
    assert render_qa(("Camila Flores", "child", "Wyatt Ross")) == ("Who is Wyatt Ross to Camila Flores?", "Child")
    assert render_qa(("Sloane Lee", "birthyear", "1908")) == ("What is the birth year of Sloane Lee?", "1908")
    assert render_qa(("Sloane Lee", "birthplace", "Ohio")) == ("What is the birthplace of Sloane Lee?", "Ohio")
    assert render_qa(("Sloane Lee", "job", "Banker")) == ("What is the job of Sloane Lee?", "Banker")
    with pytest.raises(UnknownRelationError):
        render_qa(("a", "cousin", "b"))


def test_bundle(tmp_path, small_dataset):
    paths = write_bundle(small_dataset, tmp_path)
    assert sorted(p.name for p in paths) == sorted(BUNDLE_FILES)
    kb = load_kb(tmp_path / "kb.json")
    assert kb.name_triples() == small_dataset.kb.name_triples()
    truth = load_kb(tmp_path / "ground.json")
    assert kb.name_triples() <= truth.name_triples()
    qa = [json.loads(x) for x in (tmp_path / "qa.jsonl").read_text().splitlines()]
    assert len(qa) == len(kb)
    assert json.loads((tmp_path / "config.json").read_text())["seed"] == 3
    assert not list(tmp_path.glob("*.tmp*"))


def test_data_dir_override(tmp_path, monkeypatch):
    for f in resources.data_dir().iterdir():
        shutil.copy(f, tmp_path / f.name)
    (tmp_path / "last_names.txt").write_text("\n".join(f"Zed{i}" for i in range(40)) + "\n")
    monkeypatch.setenv("DUB_DATA_DIR", str(tmp_path))
    ds = generate_dataset(GenConfig(seed=2, person_target=30, relation_fact_target=90, bio_fact_target=60))
    assert all(p.last_name.startswith("Zed") for p in ds.graph.persons)
