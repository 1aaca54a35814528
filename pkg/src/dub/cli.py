"""Command-line interface: ``dub <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data or validation error, 3 resource
limit exceeded.  Every output file is written to a temporary name and renamed
into place.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__, report
from .deduction import DEFAULT_MAX_DERIVED, deductive_closure
from .errors import DubError, UsageError, ValidationError
from .genkb import BUNDLE_FILES, GenConfig, generate_dataset, render_qa, write_bundle
from .io import atomic_write_json, atomic_write_text, dumps
from .kb import Fact, kb_from_dict, kb_to_dict, load_kb, parse_fact_spec
from .metrics import REFERENCE_KINDS, UnlearnSubmission, aggregate, evaluate_sweep, reference_sweep
from .protocol import PER_RELATION, select_targets
from .rules import load_rules, parse_rule_file
from .unlearn import MinimalSetCollection, mdus, subseed, verify_minimal

log = logging.getLogger("dub")

DEFAULT_PS = (0.0, 0.05, 0.1, 0.2, 0.4)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- helpers ---------------------------------------------------------------


def _input(path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"input file not found: {path}")
    return p


def _read_json(path):
    try:
        return json.loads(_input(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None


def _load(args):
    kb = load_kb(_input(args.kb))
    rules = load_rules(_input(args.rules))
    return kb, rules


def _emit(obj, out):
    if out:
        atomic_write_json(out, obj)
    else:
        sys.stdout.write(dumps(obj))


def _fraction(text) -> Fraction:
    try:
        value = Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None
    if not 0 <= value <= 1:
        raise UsageError("threshold must lie in [0, 1]")
    return value


def _positive(text) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


# -- parallel minimal-set computation --------------------------------------

_WORKER: dict = {}


def _init_worker(kb_data, rules_text, n_seed, seed, max_derived):
    kb = kb_from_dict(kb_data)
    rules = parse_rule_file(rules_text)
    _WORKER.update(kb=kb, rules=rules, n_seed=n_seed, seed=seed, max_derived=max_derived, closed=None)


def _worker_mdus(names):
    w = _WORKER
    if w["closed"] is None:
        w["closed"] = deductive_closure(w["kb"], w["rules"], w["max_derived"])
    kb = w["kb"]
    target = kb.fact(*names)
    coll = mdus(target, kb, w["rules"], w["n_seed"], w["seed"], max_derived=w["max_derived"], closed=w["closed"])
    return coll.to_dict(kb)


def compute_collections(kb, rules, targets, n_seed, seed, jobs=1, max_derived=DEFAULT_MAX_DERIVED) -> list:
    """Minimal-set collections for ``targets`` as JSON dicts, in input order."""
    names = [kb.names(t) for t in targets]
    init = (kb_to_dict(kb), rules.format(), n_seed, seed, max_derived)
    if jobs <= 1 or len(names) <= 1:
        _init_worker(*init)
        return [_worker_mdus(n) for n in names]
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=init) as pool:
        return list(pool.map(_worker_mdus, names, chunksize=1))


# -- subcommands -----------------------------------------------------------


def cmd_gen(args):
    data = _read_json(args.config) if args.config else {}
    if args.seed is not None:
        data["seed"] = args.seed
    for key in ("person_target", "relation_fact_target", "bio_fact_target"):
        v = getattr(args, key)
        if v is not None:
            data[key] = v
    cfg = GenConfig.from_dict(data)
    ds = generate_dataset(cfg)
    write_bundle(ds, args.out)
    log.info("wrote %s to %s", ", ".join(BUNDLE_FILES), args.out)
    return 0


def cmd_rules_check(args):
    rules = load_rules(_input(args.rules))
    out = {
        "rules": len(rules),
        "relations": sorted(rules.relations()),
        "by_head": {},
    }
    for r in rules:
        out["by_head"][r.head.relation] = out["by_head"].get(r.head.relation, 0) + 1
    out["by_head"] = dict(sorted(out["by_head"].items()))
    if args.kb:
        kb = load_kb(_input(args.kb))
        missing = sorted(rules.relations() - set(kb.relations))
        if missing:
            raise ValidationError(f"rule relations missing from the KB vocabulary: {', '.join(missing)}")
        closed = deductive_closure(kb, rules, args.max_derived)
        out["kb_facts"] = len(kb)
        out["derived"] = len(closed.derived())
        out["closed"] = not closed.derived()
    _emit(out, args.out)
    if args.kb and args.require_closed and not out["closed"]:
        raise ValidationError(f"the KB is not closed under the rules: {out['derived']} facts derivable")
    return 0


def cmd_closure(args):
    kb, rules = _load(args)
    closed = deductive_closure(kb, rules, args.max_derived)
    out = kb_to_dict(closed.closure)
    out["base_facts"] = len(kb)
    out["derived_facts"] = len(closed.derived())
    if args.provenance:
        out.update(closed.provenance_dict())
    _emit(out, args.out)
    return 0


def _targets(args, kb) -> list:
    chosen = [parse_fact_spec(kb, t) for t in args.target or ()]
    if args.targets_file:
        for line in _input(args.targets_file).read_text(encoding="utf-8").splitlines():
            if line.strip() and not line.startswith("#"):
                chosen.append(parse_fact_spec(kb, line))
    if args.protocol:
        chosen.extend(select_targets(kb, args.per_relation, args.seed))
    if not chosen:
        raise UsageError("give --target, --targets-file or --protocol")
    return list(dict.fromkeys(chosen))


def cmd_mdus(args):
    kb, rules = _load(args)
    targets = _targets(args, kb)
    colls = compute_collections(kb, rules, targets, args.n_seed, args.seed, args.jobs, args.max_derived)
    if args.verify:
        for data in colls:
            c = MinimalSetCollection.from_dict(data, kb)
            for s in c.sets:
                if not verify_minimal(c.target, kb, rules, s.members, max_derived=args.max_derived):
                    raise ValidationError(f"non-minimal set produced for {kb.format_fact(c.target)}")
    if len(colls) == 1 and not args.protocol:
        out = colls[0]
    else:
        out = {"seed": args.seed, "n_seed": args.n_seed, "collections": colls}
    _emit(out, args.out)
    return 0


def _collections_by_target(data, kb) -> dict:
    docs = data["collections"] if isinstance(data, dict) and "collections" in data else [data]
    out = {}
    for d in docs:
        c = MinimalSetCollection.from_dict(d, kb)
        out[c.target] = c
    return out


def _submissions(data, kb) -> list:
    if isinstance(data, dict) and "submissions" in data:
        docs = data["submissions"]
    elif isinstance(data, list):
        docs = data
    else:
        docs = [data]
    return [UnlearnSubmission.from_dict(d, kb) for d in docs]


def cmd_eval(args):
    kb, _ = _load(args)
    colls = _collections_by_target(_read_json(args.collection), kb)
    subs = _submissions(_read_json(args.submission), kb)
    reports = []
    for sub in subs:
        coll = colls.get(sub.target)
        if coll is None:
            raise ValidationError(f"no minimal-set collection for target {kb.format_fact(sub.target)}")
        reports.append(evaluate_sweep(sub, kb, coll, args.threshold))
    if len(reports) == 1:
        out = reports[0].to_dict(kb)
    else:
        out = aggregate(reports).to_dict(kb)
        out["threshold"] = float(args.threshold)
    _emit(out, args.report)
    return 0


def cmd_bench(args):
    kb, rules = _load(args)
    methods = args.method or list(REFERENCE_KINDS)
    for m in methods:
        if m not in REFERENCE_KINDS:
            raise UsageError(f"unknown method {m!r}; choose from {', '.join(REFERENCE_KINDS)}")
    targets = select_targets(kb, args.per_relation, args.seed)
    if not targets:
        raise ValidationError("the KB has no family facts to use as targets")
    colls_data = compute_collections(kb, rules, targets, args.n_seed, args.seed, args.jobs, args.max_derived)
    out_dir = Path(args.out)
    atomic_write_json(out_dir / "collections.json",
                      {"seed": args.seed, "n_seed": args.n_seed, "collections": colls_data})
    colls = [MinimalSetCollection.from_dict(d, kb) for d in colls_data]
    summary = {"seed": args.seed, "n_seed": args.n_seed, "threshold": float(args.threshold),
               "n_targets": len(colls), "methods": {}}
    for m in methods:
        reports = []
        for i, c in enumerate(colls):
            ps = args.ps if m == "random_over" else (0.0,)
            sub = reference_sweep(m, c.target, kb, c, ps, subseed(args.seed, "bench", m, i))
            reports.append(evaluate_sweep(sub, kb, c, args.threshold))
        bench = aggregate(reports)
        bench.extra = {"seed": args.seed, "n_seed": args.n_seed, "threshold": float(args.threshold)}
        doc = bench.to_dict(kb)
        atomic_write_json(out_dir / f"bench_{m}.json", doc)
        summary["methods"][m] = doc["aggregates"]
    sizes = [len(c.sets) for c in colls]
    summary["minimal_sets"] = {
        "per_target": sizes,
        "at_least_2": sum(s >= 2 for s in sizes),
        "at_least_6": sum(s >= 6 for s in sizes),
    }
    atomic_write_json(out_dir / "summary.json", summary)
    return 0


def cmd_report(args):
    docs = [_read_json(p) for p in args.inputs]
    summary = report.summarize(docs, args.threshold)
    out = Path(args.out)
    formats = set(args.format)
    if "json" in formats:
        atomic_write_json(out / "report.json", summary)
        atomic_write_text(out / "table.md", report.grid_markdown(summary))
    if "csv" in formats:
        atomic_write_text(out / "table.csv", report.grid_csv(summary))
        atomic_write_text(out / "curve.csv", report.curve_csv(summary))
    if "svg" in formats:
        atomic_write_text(out / "curve.svg", report.curve_svg(summary))
    return 0


def cmd_qa(args):
    kb = load_kb(_input(args.kb))
    lines = []
    for f in kb.sorted_facts():
        triple = kb.names(f)
        q, a = render_qa(triple)
        lines.append(json.dumps({"question": q, "answer": a, "fact": list(triple)}, ensure_ascii=False))
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


# -- parser ----------------------------------------------------------------


def _common(seed_default=0) -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=seed_default, help="random seed (default %(default)s)")
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes for per-target work")
    common.add_argument("--max-derived", type=_positive, default=DEFAULT_MAX_DERIVED,
                        help="cap on facts derived by forward chaining (exit 3 when exceeded)")
    common.add_argument("--json-errors", action="store_true", help="report errors as JSON on stderr")
    common.add_argument("-v", "--verbose", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:
    kbr = _Parser(add_help=False)
    kbr.add_argument("--kb", required=True, help="knowledge base JSON")
    kbr.add_argument("--rules", required=True, help="rule file")

    p = _Parser(prog="dub", description="Deep unlearning benchmark tools.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--json-errors", action="store_true", help="report errors as JSON on stderr")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("gen", parents=[_common(None)], help="generate a synthetic dataset bundle")
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--config", help="GenConfig JSON (flags override it)")
    g.add_argument("--person-target", type=_positive)
    g.add_argument("--relation-fact-target", type=_positive)
    g.add_argument("--bio-fact-target", type=_positive)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("rules", help="rule file utilities")
    rsub = r.add_subparsers(dest="rules_command", parser_class=_Parser)
    rc = rsub.add_parser("check", parents=[_common()], help="parse and validate a rule file")
    rc.add_argument("--rules", required=True)
    rc.add_argument("--kb", help="also check the vocabulary and closure against this KB")
    rc.add_argument("--require-closed", action="store_true", help="fail if the KB is not closed under the rules")
    rc.add_argument("--out")
    rc.set_defaults(func=cmd_rules_check)

    c = sub.add_parser("closure", parents=[_common(), kbr], help="deductive closure of a KB")
    c.add_argument("--out")
    c.add_argument("--provenance", action="store_true", help="include one derivation per derived fact")
    c.set_defaults(func=cmd_closure)

    m = sub.add_parser("mdus", parents=[_common(), kbr], help="minimal deep-unlearning sets")
    m.add_argument("--target", action="append", help='"subject,relation,object" (repeatable)')
    m.add_argument("--targets-file", help="one target per line")
    m.add_argument("--protocol", action="store_true", help="use the per-relation target protocol")
    m.add_argument("--per-relation", type=_positive, default=PER_RELATION)
    m.add_argument("--n-seed", type=_positive, default=100)
    m.add_argument("--verify", action="store_true", help="check every emitted set for minimality")
    m.add_argument("--out")
    m.set_defaults(func=cmd_mdus)

    e = sub.add_parser("eval", parents=[_common(), kbr], help="score unlearning submissions")
    e.add_argument("--collection", required=True)
    e.add_argument("--submission", required=True)
    e.add_argument("--threshold", type=_fraction, default=Fraction(4, 5))
    e.add_argument("--out", "--report", dest="report", help="output file (default: stdout)")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", parents=[_common(), kbr], help="minimal sets and reference scores on the target protocol")
    b.add_argument("--out", required=True, help="output directory")
    b.add_argument("--n-seed", type=_positive, default=100)
    b.add_argument("--per-relation", type=_positive, default=PER_RELATION)
    b.add_argument("--threshold", type=_fraction, default=Fraction(4, 5))
    b.add_argument("--method", action="append", help="reference unlearner (repeatable; default all)")
    b.add_argument("--ps", type=float, nargs="+", default=list(DEFAULT_PS), help="random_over sweep fractions")
    b.set_defaults(func=cmd_bench)

    rp = sub.add_parser("report", parents=[_common()], help="aggregate bench/eval outputs")
    rp.add_argument("inputs", nargs="+")
    rp.add_argument("--out", required=True, help="output directory")
    rp.add_argument("--threshold", type=_fraction, default=None)
    rp.add_argument("--format", nargs="+", choices=("json", "csv", "svg"), default=["json", "csv", "svg"])
    rp.set_defaults(func=cmd_report)

    q = sub.add_parser("qa", parents=[_common()], help="render question/answer pairs for a KB")
    q.add_argument("--kb", required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_qa)
    return p


def _report_error(exc: DubError, json_errors: bool):
    if json_errors:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}}
        sys.stderr.write(json.dumps(payload) + "\n")
    else:
        sys.stderr.write(f"dub: error: {exc}\n")


def run_cli(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    json_errors = "--json-errors" in argv
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        func = getattr(args, "func", None)
        if func is None:
            raise UsageError("missing subcommand (see dub --help)")
        return func(args)
    except DubError as exc:
        _report_error(exc, json_errors)
        return exc.exit_code
    except OSError as exc:
        _report_error(ValidationError(str(exc)), json_errors)
        return 2
    except (KeyError, TypeError, ValueError) as exc:
        # a structurally odd input file that slipped past validation
        _report_error(ValidationError(f"malformed input: {exc!r}"), json_errors)
        return 2


def main():
    sys.exit(run_cli())
