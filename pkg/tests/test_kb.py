import json

import pytest
from hypothesis import given, settings, strategies as st

from dub.errors import UnknownRelationError, ValidationError
from dub.kb import (
    DEFAULT_RELATIONS, Fact, KnowledgeBase, SymbolTable, kb_from_dict, kb_to_dict, load_kb,
    match_pattern, parse_fact_spec, remove_facts,
)

names = st.text(alphabet="abcdefgh XYZ", min_size=1, max_size=6).map(str.strip).filter(bool)
triples = st.tuples(names, st.sampled_from(DEFAULT_RELATIONS), names)


@given(st.lists(names, max_size=30))
def test_interning_is_bijective(xs):
    t = SymbolTable()
    ids = [t.intern(x) for x in xs]
    for x, i in zip(xs, ids):
        assert t.name(i) == x
        assert t.id(x) == i
    assert len(set(ids)) == len(set(xs)) == len(t)


@given(st.lists(triples, max_size=40))
def test_indexes_agree_with_fact_set(ts):
    kb = KnowledgeBase.from_triples(ts)
    assert kb.name_triples() == set(ts)
    for rel in DEFAULT_RELATIONS:
        rid = kb.relation_id(rel)
        assert set(kb.match(rid)) == {f for f in kb.facts if f.relation == rid}
        for f in kb.match(rid):
            assert f in kb.match(rid, subject=f.subject)
            assert f in kb.match(rid, obj=f.object)
            assert kb.match(rid, f.subject, f.object) == (f,)


@settings(max_examples=50)
@given(st.lists(triples, max_size=25))
def test_json_round_trip(ts):
    kb = KnowledgeBase.from_triples(ts)
    back = kb_from_dict(json.loads(json.dumps(kb_to_dict(kb))))
    assert back.name_triples() == kb.name_triples()


def test_name_triples_in_json_are_accepted():
    kb = kb_from_dict({"facts": [["Wyatt Ross", "father", "Xavier Ross"]]})
    assert kb.name_triples() == {("Wyatt Ross", "father", "Xavier Ross")}


def test_shared_symbol_table_across_files(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps({"facts": [["x", "child", "y"]]}))
    b.write_text(json.dumps({"facts": [["y", "father", "x"]]}))
    objs = SymbolTable()
    ka, kb_ = load_kb(a, objs), load_kb(b, objs)
    assert ka.objects is kb_.objects
    assert ka.fact("y", "father", "x") in kb_


@pytest.mark.parametrize("data", [
    [],
    {"facts": 3},
    {"facts": [[0, 0]]},
    {"objects": [{"id": 0, "name": "a"}], "facts": [[0, 0, 5]]},
    {"relations": "child", "facts": []},
])
def test_malformed_kb_json(data):
    with pytest.raises(ValidationError):
        kb_from_dict(data)


def test_unknown_relation_is_rejected():
    with pytest.raises(UnknownRelationError):
        KnowledgeBase.from_triples([("a", "cousin", "b")])
    with pytest.raises(UnknownRelationError):
        kb_from_dict({"objects": [{"id": 0, "name": "a"}], "relations": ["child"], "facts": [[0, 3, 0]]})


def test_invalid_json_file(tmp_path):
    p = tmp_path / "kb.json"
    p.write_text("{not json")
    with pytest.raises(ValidationError):
        load_kb(p)


def test_pattern_match_and_fact_spec():
    kb = KnowledgeBase.from_triples([
        ("Wyatt Ross", "father", "Xavier Ross"),
        ("Camila Flores", "husband", "Xavier Ross"),
        ("Wyatt Ross", "mother", "Camila Flores"),
    ])
    got = match_pattern(kb, (None, "father", kb.objects.id("Xavier Ross")))
    assert [kb.names(f) for f in got] == [("Wyatt Ross", "father", "Xavier Ross")]
    f = parse_fact_spec(kb, "Wyatt Ross, mother, Camila Flores")
    assert kb.names(f) == ("Wyatt Ross", "mother", "Camila Flores")
    with pytest.raises(ValidationError):
        parse_fact_spec(kb, "only,two")


def test_remove_facts_keeps_symbols():
    kb = KnowledgeBase.from_triples([("a", "child", "b"), ("b", "father", "a")])
    f = kb.fact("a", "child", "b")
    smaller = remove_facts(kb, [f])
    assert f not in smaller and len(smaller) == 1
    assert smaller.objects is kb.objects


def test_fact_is_value_comparable():
    assert Fact(1, 2, 3) == Fact(1, 2, 3)
    assert len({Fact(1, 2, 3), Fact(1, 2, 3)}) == 1
    assert KnowledgeBase.from_triples([("a", "child", "b")]) == KnowledgeBase.from_triples([("a", "child", "b")])
