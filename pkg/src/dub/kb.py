"""Objects, relations, facts and indexed knowledge bases.

A fact is a ``(subject, relation, object)`` triple of small integer ids.  The
ids are handed out by :class:`SymbolTable` instances that the knowledge bases
derived from one another share, so facts from a KB and from its closure or
from a pruned copy compare equal.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

from .errors import UnknownRelationError, ValidationError

FAMILY_RELATIONS = (
    "child",
    "father",
    "mother",
    "husband",
    "wife",
    "brother",
    "sister",
    "aunt",
    "uncle",
    "nephew",
    "niece",
)
BIO_RELATIONS = ("birthyear", "birthplace", "job")
DEFAULT_RELATIONS = FAMILY_RELATIONS + BIO_RELATIONS


class SymbolTable:
    """Append-only bijection between names and dense integer ids."""

    __slots__ = ("_names", "_ids")

    def __init__(self, names: Iterable[str] = ()):
        self._names: list[str] = []
        self._ids: dict[str, int] = {}
        for name in names:
            self.intern(name)

    def intern(self, name: str) -> int:
        idx = self._ids.get(name)
        if idx is None:
            if not isinstance(name, str) or not name:
                raise ValidationError(f"symbol names must be non-empty strings, got {name!r}")
            idx = len(self._names)
            self._names.append(name)
            self._ids[name] = idx
        return idx

    def get(self, name: str) -> Optional[int]:
        return self._ids.get(name)

    def id(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise ValidationError(f"unknown symbol {name!r}") from None

    def name(self, idx: int) -> str:
        return self._names[idx]

    def names(self) -> list[str]:
        return list(self._names)

    def copy(self) -> "SymbolTable":
        return SymbolTable(self._names)

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name) -> bool:
        return name in self._ids

    def __iter__(self) -> Iterator[str]:
        return iter(self._names)

    def __repr__(self) -> str:
        return f"SymbolTable({len(self)} symbols)"


class Fact(NamedTuple):
    subject: int
    relation: int
    object: int


class KnowledgeBase:
    """An immutable, indexed set of facts.

    Indexes are keyed by relation, ``(relation, subject)`` and
    ``(relation, object)``; each bucket holds facts in ascending id order.
    """

    __slots__ = ("facts", "objects", "relations", "_by_rel", "_by_rs", "_by_ro", "_sorted")

    def __init__(self, facts: Iterable[Fact], objects: SymbolTable, relations: SymbolTable):
        self.objects = objects
        self.relations = relations
        fs = frozenset(Fact(*f) for f in facts)
        n_rel, n_obj = len(relations), len(objects)
        for f in fs:
            if not 0 <= f.relation < n_rel:
                raise UnknownRelationError(f"relation id {f.relation} not in vocabulary")
            if not (0 <= f.subject < n_obj and 0 <= f.object < n_obj):
                raise ValidationError(f"object id out of range in {tuple(f)}")
        self.facts = fs
        self._sorted = tuple(sorted(fs))
        by_rel: dict[int, list] = {}
        by_rs: dict[tuple, list] = {}
        by_ro: dict[tuple, list] = {}
        for f in self._sorted:
            by_rel.setdefault(f.relation, []).append(f)
            by_rs.setdefault((f.relation, f.subject), []).append(f)
            by_ro.setdefault((f.relation, f.object), []).append(f)
        self._by_rel = {k: tuple(v) for k, v in by_rel.items()}
        self._by_rs = {k: tuple(v) for k, v in by_rs.items()}
        self._by_ro = {k: tuple(v) for k, v in by_ro.items()}

    # -- construction -----------------------------------------------------

    @classmethod
    def empty(cls, relations: Iterable[str] = DEFAULT_RELATIONS) -> "KnowledgeBase":
        return cls((), SymbolTable(), SymbolTable(relations))

    @classmethod
    def from_triples(
        cls,
        triples: Iterable[Sequence[str]],
        relations: Iterable[str] = DEFAULT_RELATIONS,
        objects: Optional[SymbolTable] = None,
    ) -> "KnowledgeBase":
        rel_table = relations if isinstance(relations, SymbolTable) else SymbolTable(relations)
        objects = objects if objects is not None else SymbolTable()
        facts = [fact_from_names(objects, rel_table, t, intern=True) for t in triples]
        return cls(facts, objects, rel_table)

    def with_facts(self, facts: Iterable[Fact]) -> "KnowledgeBase":
        """A KB over the same symbol tables holding ``facts``."""
        return KnowledgeBase(facts, self.objects, self.relations)

    # -- naming -----------------------------------------------------------

    def relation_id(self, name: str) -> int:
        idx = self.relations.get(name)
        if idx is None:
            raise UnknownRelationError(f"unknown relation {name!r}")
        return idx

    def fact(self, subject: str, relation: str, obj: str) -> Fact:
        """Look up the ids for a name triple (the fact need not be in the KB)."""
        return fact_from_names(self.objects, self.relations, (subject, relation, obj))

    def names(self, fact: Fact) -> tuple[str, str, str]:
        return (self.objects.name(fact[0]), self.relations.name(fact[1]), self.objects.name(fact[2]))

    def format_fact(self, fact: Fact) -> str:
        return "({}, {}, {})".format(*self.names(fact))

    # -- queries ----------------------------------------------------------

    def match(self, relation: int, subject: Optional[int] = None, obj: Optional[int] = None) -> tuple:
        if subject is not None and obj is not None:
            f = Fact(subject, relation, obj)
            return (f,) if f in self.facts else ()
        if subject is not None:
            return self._by_rs.get((relation, subject), ())
        if obj is not None:
            return self._by_ro.get((relation, obj), ())
        return self._by_rel.get(relation, ())

    def sorted_facts(self) -> tuple:
        return self._sorted

    def relation_counts(self) -> dict[str, int]:
        return {self.relations.name(r): len(v) for r, v in sorted(self._by_rel.items())}

    def __len__(self) -> int:
        return len(self.facts)

    def __contains__(self, fact) -> bool:
        return fact in self.facts

    def __iter__(self) -> Iterator[Fact]:
        return iter(self._sorted)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        if self.objects is other.objects and self.relations is other.relations:
            return self.facts == other.facts
        return self.name_triples() == other.name_triples()

    def __hash__(self):
        return hash(self.facts)

    def name_triples(self) -> set:
        return {self.names(f) for f in self.facts}

    def __repr__(self) -> str:
        return f"KnowledgeBase({len(self)} facts, {len(self.relations)} relations)"


def fact_from_names(objects: SymbolTable, relations: SymbolTable, triple, intern=False) -> Fact:
    if len(triple) != 3:
        raise ValidationError(f"a fact needs exactly three fields, got {triple!r}")
    s, r, o = (str(x).strip() for x in triple)
    rid = relations.get(r)
    if rid is None:
        raise UnknownRelationError(f"unknown relation {r!r}")
    if intern:
        return Fact(objects.intern(s), rid, objects.intern(o))
    sid, oid = objects.get(s), objects.get(o)
    if sid is None or oid is None:
        missing = s if sid is None else o
        raise ValidationError(f"unknown object {missing!r}")
    return Fact(sid, rid, oid)


def parse_fact_spec(kb: KnowledgeBase, text: str) -> Fact:
    """Parse ``"Camila Flores,child,Wyatt Ross"`` against ``kb``'s symbols."""
    parts = text.split(",")
    if len(parts) != 3:
        raise ValidationError(f"expected 'subject,relation,object', got {text!r}")
    return kb.fact(*(x.strip() for x in parts))


def match_pattern(kb: KnowledgeBase, pattern) -> list:
    """Facts matching ``(subject or None, relation, object or None)``.

    The relation may be given as a name or an id; results are id-sorted.
    """
    subject, relation, obj = pattern
    if isinstance(relation, str):
        relation = kb.relation_id(relation)
    elif not 0 <= relation < len(kb.relations):
        raise UnknownRelationError(f"relation id {relation} not in vocabulary")
    return list(kb.match(relation, subject, obj))


def remove_facts(kb: KnowledgeBase, removed: Iterable[Fact]) -> KnowledgeBase:
    """``kb`` minus ``removed`` as a new KB; absent facts are ignored."""
    removed = frozenset(removed)
    if not removed:
        return kb
    return kb.with_facts(kb.facts - removed)


# -- JSON wire format ------------------------------------------------------


def kb_to_dict(kb: KnowledgeBase) -> dict:
    return {
        "objects": [{"id": i, "name": n} for i, n in enumerate(kb.objects)],
        "relations": kb.relations.names(),
        "facts": [list(f) for f in kb.sorted_facts()],
    }


def kb_from_dict(data: dict, objects: Optional[SymbolTable] = None) -> KnowledgeBase:
    """Load the KB JSON layout; facts may be id triples or name triples.

    File-local object ids are remapped through ``objects`` (a fresh table by
    default), so several files can be loaded into one shared symbol space.
    """
    if not isinstance(data, dict) or not isinstance(data.get("facts"), list):
        raise ValidationError("KB JSON must be an object with a 'facts' list")
    rel_names = data.get("relations") or DEFAULT_RELATIONS
    if not isinstance(rel_names, (list, tuple)) or not all(isinstance(r, str) for r in rel_names):
        raise ValidationError("'relations' must be a list of names")
    if not isinstance(data.get("objects", []), list):
        raise ValidationError("'objects' must be a list")
    relations = SymbolTable(rel_names)
    objects = objects if objects is not None else SymbolTable()
    local: dict[int, int] = {}
    for entry in data.get("objects", []):
        try:
            local[int(entry["id"])] = objects.intern(str(entry["name"]))
        except (KeyError, TypeError, ValueError):
            raise ValidationError(f"bad object entry {entry!r}") from None
    facts = []
    for raw in data["facts"]:
        if not isinstance(raw, (list, tuple)) or len(raw) != 3:
            raise ValidationError(f"bad fact entry {raw!r}")
        if all(isinstance(x, str) for x in raw):
            facts.append(fact_from_names(objects, relations, raw, intern=True))
            continue
        try:
            s, r, o = (int(x) for x in raw)
        except (TypeError, ValueError):
            raise ValidationError(f"bad fact entry {raw!r}") from None
        if s not in local or o not in local:
            raise ValidationError(f"fact {raw!r} references an undeclared object id")
        if not 0 <= r < len(relations):
            raise UnknownRelationError(f"relation index {r} out of range in {raw!r}")
        facts.append(Fact(local[s], r, local[o]))
    return KnowledgeBase(facts, objects, relations)


def load_kb(path, objects: Optional[SymbolTable] = None) -> KnowledgeBase:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return kb_from_dict(data, objects)


def facts_to_names(kb: KnowledgeBase, facts: Iterable[Fact]) -> list:
    return [list(kb.names(f)) for f in sorted(facts)]


def facts_from_names(kb: KnowledgeBase, triples: Iterable[Sequence[str]]) -> list:
    return [fact_from_names(kb.objects, kb.relations, t) for t in triples]
