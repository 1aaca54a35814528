"""Pure-Python semi-naive forward chaining (fallback for ``dub._kernel``).

``closure(facts, n_objects, n_relations, rules, goal, max_derived, want_prov)``

* ``facts``: ``(n, 3)`` int array of ``(subject, relation, object)`` ids.
* ``rules``: the tuple built by :func:`dub.kernel.compile_rules`.
* ``goal``: a fact triple or ``None``; evaluation stops as soon as it is
  derived (or found among the inputs).

Returns ``(facts_out, provenance, status)``.  ``facts_out`` lists the input
facts (deduplicated, in input order) followed by derived facts in derivation
order; it is ``None`` when the goal was found and provenance was not asked
for.  ``provenance`` is ``(rule_ids, starts, body_indices)`` in CSR layout,
one entry per derived fact.  ``status`` is 0 (fixpoint), 1 (goal found) or
2 (``max_derived`` exceeded).
"""

import numpy as np

FIXPOINT, GOAL_FOUND, LIMIT = 0, 1, 2


class _Stop(Exception):
    pass


def closure(facts, n_objects, n_relations, rules, goal, max_derived, want_prov):
    head, body, body_start, plan, plan_start, rule_ids, _nvars = rules
    head = head.tolist()
    body = body.tolist()
    body_start = body_start.tolist()
    plan = plan.tolist()
    plan_start = plan_start.tolist()
    rule_ids = rule_ids.tolist()

    fs: list = []
    key_idx: dict = {}
    by_rs: dict = {}
    by_ro: dict = {}
    by_r: dict = {}

    def add_fact(f):
        idx = len(fs)
        fs.append(f)
        key_idx[f] = idx
        s, r, o = f
        by_rs.setdefault((r, s), []).append(idx)
        by_ro.setdefault((r, o), []).append(idx)
        by_r.setdefault(r, []).append(idx)

    for row in np.asarray(facts, dtype=np.int64).reshape(-1, 3).tolist():
        f = tuple(row)
        if f not in key_idx:
            add_fact(f)
    n_initial = len(fs)
    goal = tuple(goal) if goal is not None else None

    pending: dict = {}
    order: list = []
    prov_rule: list = []
    prov_start = [0]
    prov_body: list = []
    state = {"status": FIXPOINT}
    binding: dict = {}
    chosen: dict = {}

    def emit(ri, nb):
        hs, hr, ho = head[ri]
        f = (binding[hs], hr, binding[ho])
        if f in key_idx or f in pending:
            return
        pending[f] = len(order)
        order.append(f)
        if want_prov:
            prov_rule.append(rule_ids[ri])
            prov_body.extend(chosen[j] for j in range(nb))
            prov_start.append(len(prov_body))
        if goal is not None and f == goal:
            state["status"] = GOAL_FOUND
            raise _Stop
        if len(fs) + len(order) - n_initial > max_derived:
            state["status"] = LIMIT
            raise _Stop

    def join(ri, b0, p0, nb, depth):
        if depth == nb:
            emit(ri, nb)
            return
        a = plan[p0 + depth]
        sv, rel, ov = body[b0 + a]
        bs = binding.get(sv)
        bo = binding.get(ov)
        if bs is not None and bo is not None:
            idx = key_idx.get((bs, rel, bo))
            if idx is not None:
                chosen[a] = idx
                join(ri, b0, p0, nb, depth + 1)
            return
        if bs is not None:
            try:
                for idx in by_rs.get((rel, bs), ()):
                    chosen[a] = idx
                    binding[ov] = fs[idx][2]
                    join(ri, b0, p0, nb, depth + 1)
            finally:
                binding.pop(ov, None)
            return
        if bo is not None:
            try:
                for idx in by_ro.get((rel, bo), ()):
                    chosen[a] = idx
                    binding[sv] = fs[idx][0]
                    join(ri, b0, p0, nb, depth + 1)
            finally:
                binding.pop(sv, None)
            return
        try:
            for idx in by_r.get(rel, ()):
                s, _, o = fs[idx]
                if sv == ov and s != o:
                    continue
                chosen[a] = idx
                binding[sv] = s
                binding[ov] = o
                join(ri, b0, p0, nb, depth + 1)
        finally:
            binding.pop(sv, None)
            binding.pop(ov, None)

    def run():
        lo, hi = 0, len(fs)
        n_rules = len(head)
        while lo < hi:
            delta_by_r: dict = {}
            for idx in range(lo, hi):
                delta_by_r.setdefault(fs[idx][1], []).append(idx)
            for ri in range(n_rules):
                b0 = body_start[ri]
                nb = body_start[ri + 1] - b0
                for p in range(nb):
                    p0 = plan_start[ri] + p * nb
                    a = plan[p0]
                    sv, rel, ov = body[b0 + a]
                    for idx in delta_by_r.get(rel, ()):
                        s, _, o = fs[idx]
                        if sv == ov and s != o:
                            continue
                        chosen[a] = idx
                        binding[sv] = s
                        binding[ov] = o
                        try:
                            join(ri, b0, p0, nb, 1)
                        finally:
                            binding.pop(sv, None)
                            binding.pop(ov, None)
            lo = hi
            for f in order:
                add_fact(f)
            order.clear()
            pending.clear()
            hi = len(fs)

    if goal is not None and goal in key_idx:
        state["status"] = GOAL_FOUND
    else:
        try:
            run()
        except _Stop:
            pass
    status = state["status"]
    if status == GOAL_FOUND and not want_prov:
        return None, None, status
    for f in order:
        add_fact(f)
    out = np.array(fs, dtype=np.int32).reshape(-1, 3)
    if not want_prov:
        return out, None, status
    prov = (
        np.array(prov_rule, dtype=np.int32),
        np.array(prov_start, dtype=np.int32),
        np.array(prov_body, dtype=np.int32),
    )
    return out, prov, status
