"""Deep unlearning of facts under Horn rules: closure, minimal sets, metrics, data."""

__version__ = "0.1.0"

from .deduction import ClosedKB, Deducer, deductive_closure, implying_instantiations, is_deducible
from .errors import DubError, ResourceLimitError, UsageError, ValidationError
from .kb import Fact, KnowledgeBase, SymbolTable, kb_from_dict, kb_to_dict, load_kb
from .metrics import accuracy, aggregate, evaluate_sweep, recall, reference_unlearner
from .rules import Rule, RuleSet, load_rules, parse_rule, parse_rule_file
from .unlearn import MinimalSet, MinimalSetCollection, dus, mdus, rp, verify_minimal

__all__ = [
    "ClosedKB", "Deducer", "DubError", "Fact", "KnowledgeBase", "MinimalSet", "MinimalSetCollection",
    "ResourceLimitError", "Rule", "RuleSet", "SymbolTable", "UsageError", "ValidationError", "accuracy",
    "aggregate", "deductive_closure", "dus", "evaluate_sweep", "implying_instantiations", "is_deducible",
    "kb_from_dict", "kb_to_dict", "load_kb", "load_rules", "mdus", "parse_rule", "parse_rule_file", "recall",
    "reference_unlearner", "rp", "verify_minimal",
]
