"""Compiled vs. pure-Python forward-chaining kernel.

Times full closures of generated knowledge bases and the goal-directed
deducibility checks that dominate ``mdus``.  Usage::

    python benchmarks/bench_kernel.py [--seeds 3] [--repeat 5] [--json out.json]
"""

import argparse
import json
import statistics
import time

import numpy as np

from dub import kernel
from dub.deduction import _encode, _run, deductive_closure
from dub.genkb import GenConfig, generate_dataset
from dub.protocol import select_targets


def _time(fn, repeat):
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return statistics.median(out)


def bench(seeds, repeat, person_target):
    rows = []
    for seed in range(seeds):
        cfg = GenConfig(seed=seed, person_target=person_target,
                        relation_fact_target=4 * person_target, bio_fact_target=3 * person_target)
        ds = generate_dataset(cfg)
        kb, rules = ds.kb, ds.rules
        rules_c = kernel.compile_rules(rules, kb.relations)
        arr = _encode(kb.sorted_facts())
        # goal-directed checks on a fixed set of targets with the target removed
        checks = []
        for t in select_targets(kb, 2, seed=seed):
            keep = np.array([f != t for f in kb.sorted_facts()])
            checks.append((np.ascontiguousarray(arr[keep]), tuple(t)))
        row = {"seed": seed, "facts": len(kb), "closure": len(deductive_closure(kb, rules))}
        for name in sorted(kernel.KERNELS):
            row[f"closure_{name}_ms"] = 1000 * _time(
                lambda: deductive_closure(kb, rules, backend=name), repeat)

            def goals():
                for a, goal in checks:
                    _run(kb, a, rules_c, goal, 10**6, False, name)
            row[f"goal_{name}_ms"] = 1000 * _time(goals, repeat)
        rows.append(row)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--persons", type=int, default=100)
    ap.add_argument("--json")
    args = ap.parse_args()
    rows = bench(args.seeds, args.repeat, args.persons)
    backends = sorted(kernel.KERNELS)
    print(f"backends available: {', '.join(backends)} (default {kernel.BACKEND})")
    head = ["seed", "facts", "closure"] + [f"{k}_{b}_ms" for k in ("closure", "goal") for b in backends]
    print("  ".join(f"{h:>18}" for h in head))
    for r in rows:
        print("  ".join(f"{r[h]:>18.2f}" if isinstance(r[h], float) else f"{r[h]:>18}" for h in head))
    if "compiled" in backends:
        for k in ("closure", "goal"):
            ratio = statistics.mean(r[f"{k}_python_ms"] / r[f"{k}_compiled_ms"] for r in rows)
            print(f"{k}: compiled kernel is {ratio:.1f}x faster on average")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
