"""Horn rules over relation atoms and their text format.

One rule per line::

    (X, husband, Z) & (Y, father, Z) -> (X, child, Y)

Atoms always hold variables in subject and object position and a constant
relation.  Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import DuplicateRuleError, RuleSyntaxError, UnknownRelationError, UnsafeRuleError
from .kb import DEFAULT_RELATIONS, SymbolTable


@dataclass(frozen=True)
class Atom:
    subject: str
    relation: str
    object: str

    def variables(self) -> tuple[str, str]:
        return (self.subject, self.object)

    def __str__(self) -> str:
        return f"({self.subject}, {self.relation}, {self.object})"


@dataclass(frozen=True)
class Rule:
    body: tuple[Atom, ...]
    head: Atom

    def __post_init__(self):
        if not self.body:
            raise RuleSyntaxError("a rule needs at least one body atom")
        body_vars = {v for a in self.body for v in a.variables()}
        for v in self.head.variables():
            if v not in body_vars:
                raise UnsafeRuleError(f"head variable {v} does not occur in the body of {self}")

    def variables(self) -> list[str]:
        """Variables in first-occurrence order (body first, then head)."""
        seen: dict[str, None] = {}
        for atom in self.body + (self.head,):
            for v in atom.variables():
                seen.setdefault(v, None)
        return list(seen)

    def canonical(self) -> "Rule":
        """Alpha-renamed copy using ``X1, X2, ...`` in first-occurrence order."""
        mapping = {v: f"X{i + 1}" for i, v in enumerate(self.variables())}

        def ren(a: Atom) -> Atom:
            return Atom(mapping[a.subject], a.relation, mapping[a.object])

        return Rule(tuple(ren(a) for a in self.body), ren(self.head))

    def __str__(self) -> str:
        return format_rule(self)


def format_rule(rule: Rule) -> str:
    return " & ".join(str(a) for a in rule.body) + f" -> {rule.head}"


class RuleSet:
    """An ordered collection of rules without alpha-equivalent duplicates."""

    __slots__ = ("rules", "source_text", "_relevance")

    def __init__(self, rules: Iterable[Rule] = (), source_text: Optional[str] = None):
        rules = tuple(rules)
        seen: dict[Rule, int] = {}
        for i, r in enumerate(rules):
            key = r.canonical()
            if key in seen:
                raise DuplicateRuleError(f"rule {i + 1} duplicates rule {seen[key] + 1}: {r}")
            seen[key] = i
        self.rules = rules
        self.source_text = source_text
        self._relevance: dict[str, tuple[int, ...]] = {}

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __getitem__(self, idx) -> Rule:
        return self.rules[idx]

    def __eq__(self, other) -> bool:
        return isinstance(other, RuleSet) and self.rules == other.rules

    def __hash__(self):
        return hash(self.rules)

    def __repr__(self) -> str:
        return f"RuleSet({len(self)} rules)"

    def relations(self) -> set[str]:
        return {a.relation for r in self.rules for a in r.body + (r.head,)}

    def format(self) -> str:
        return "".join(format_rule(r) + "\n" for r in self.rules)

    def relevant_rules(self, relation: str) -> tuple[int, ...]:
        """Indices of rules that can take part in deriving ``relation``.

        A rule is relevant when its head relation is ``relation`` or appears in
        the body of another relevant rule.
        """
        cached = self._relevance.get(relation)
        if cached is not None:
            return cached
        by_head: dict[str, list[int]] = {}
        for i, r in enumerate(self.rules):
            by_head.setdefault(r.head.relation, []).append(i)
        wanted, stack, picked = {relation}, [relation], set()
        while stack:
            rel = stack.pop()
            for i in by_head.get(rel, ()):
                if i in picked:
                    continue
                picked.add(i)
                for a in self.rules[i].body:
                    if a.relation not in wanted:
                        wanted.add(a.relation)
                        stack.append(a.relation)
        result = tuple(sorted(picked))
        self._relevance[relation] = result
        return result


_TOKEN = re.compile(r"\s*(?:(?P<arrow>->)|(?P<punct>[(),&])|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<bad>\S))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        kind = m.lastgroup
        value = m.group(kind)
        col = m.start(kind) + 1
        if kind == "bad":
            raise RuleSyntaxError(f"unexpected character {value!r}", position=col)
        out.append((kind, value, col))
        pos = m.end()
    return out


def _vocabulary_names(vocabulary) -> frozenset:
    if vocabulary is None:
        return frozenset(DEFAULT_RELATIONS)
    if isinstance(vocabulary, SymbolTable):
        return frozenset(vocabulary)
    return frozenset(vocabulary)


class _Parser:
    def __init__(self, text: str, vocabulary: frozenset):
        self.tokens = _tokenize(text)
        self.i = 0
        self.vocabulary = vocabulary
        self.end_col = len(text) + 1

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def expect(self, kind, value=None):
        tok = self.peek()
        if tok is None:
            raise RuleSyntaxError(f"unexpected end of rule, expected {value or kind}", position=self.end_col)
        if tok[0] != kind or (value is not None and tok[1] != value):
            raise RuleSyntaxError(f"expected {value or kind}, found {tok[1]!r}", position=tok[2])
        self.i += 1
        return tok

    def atom(self) -> Atom:
        self.expect("punct", "(")
        subj = self.expect("ident")[1]
        self.expect("punct", ",")
        _, rel, col = self.expect("ident")
        if rel not in self.vocabulary:
            raise UnknownRelationError(f"unknown relation {rel!r} (col {col})")
        self.expect("punct", ",")
        obj = self.expect("ident")[1]
        self.expect("punct", ")")
        return Atom(subj, rel, obj)

    def rule(self) -> Rule:
        body = [self.atom()]
        while (tok := self.peek()) is not None and tok[1] == "&":
            self.i += 1
            body.append(self.atom())
        self.expect("arrow")
        head = self.atom()
        tok = self.peek()
        if tok is not None:
            raise RuleSyntaxError(f"trailing input {tok[1]!r}", position=tok[2])
        return Rule(tuple(body), head)


def parse_rule(text: str, vocabulary=None) -> Rule:
    """Parse one rule; ``vocabulary`` defaults to the 14 built-in relations."""
    return _Parser(text, _vocabulary_names(vocabulary)).rule()


def parse_rule_file(text: str, vocabulary=None) -> RuleSet:
    vocab = _vocabulary_names(vocabulary)
    rules: list[Rule] = []
    seen: dict[Rule, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            rule = _Parser(stripped, vocab).rule()
        except RuleSyntaxError as exc:
            raise RuleSyntaxError(str(exc), line=lineno) from None
        except (UnknownRelationError, UnsafeRuleError) as exc:
            raise type(exc)(f"line {lineno}: {exc}") from None
        key = rule.canonical()
        if key in seen:
            raise DuplicateRuleError(f"line {lineno}: rule duplicates line {seen[key]}: {stripped}")
        seen[key] = lineno
        rules.append(rule)
    return RuleSet(rules, source_text=text)


def load_rules(path, vocabulary=None) -> RuleSet:
    with open(path, encoding="utf-8") as fh:
        return parse_rule_file(fh.read(), vocabulary)


def rule_from_atoms(body: Sequence[tuple], head: tuple) -> Rule:
    """Build a rule from ``(subject_var, relation, object_var)`` tuples."""
    return Rule(tuple(Atom(*a) for a in body), Atom(*head))
