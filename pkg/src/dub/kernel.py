"""Kernel selection and rule compilation.

The compiled extension ``dub._kernel`` is used when it imports; otherwise the
pure-Python ``dub._kernel_py`` takes over.  Setting ``DUB_PURE_PYTHON=1``
forces the fallback.
"""

import os

import numpy as np

from . import _kernel_py
from .errors import UnknownRelationError

FIXPOINT, GOAL_FOUND, LIMIT = 0, 1, 2


def _load_compiled():
    if os.environ.get("DUB_PURE_PYTHON", "").strip() not in ("", "0"):
        return None
    try:
        from . import _kernel
    except ImportError:
        return None
    return _kernel


_compiled = _load_compiled()
BACKEND = "compiled" if _compiled is not None else "python"
KERNELS = {"python": _kernel_py.closure}
if _compiled is not None:
    KERNELS["compiled"] = _compiled.closure
closure = KERNELS[BACKEND]


def _join_plan(body, pos):
    """Atom order for a join seeded at ``pos``: most-bound atom next."""
    bound = set(body[pos][0::2])
    order = [pos]
    rest = [i for i in range(len(body)) if i != pos]
    while rest:
        best = max(rest, key=lambda i: ((body[i][0] in bound) + (body[i][2] in bound), -i))
        rest.remove(best)
        order.append(best)
        bound.update(body[best][0::2])
    return order


def compile_rules(rules, relations, indices=None):
    """Flatten ``rules`` (optionally a subset by index) for the kernels.

    Variables become per-rule integers, relations become ids from the
    ``relations`` symbol table.
    """
    if indices is None:
        indices = range(len(rules))
    heads, bodies, body_start, plans, plan_start, rule_ids, nvars = [], [], [0], [], [0], [], []
    for ri in indices:
        rule = rules[ri]
        var_ids = {v: i for i, v in enumerate(rule.variables())}

        def enc(atom):
            rid = relations.get(atom.relation)
            if rid is None:
                raise UnknownRelationError(f"rule relation {atom.relation!r} is not in the KB vocabulary")
            return (var_ids[atom.subject], rid, var_ids[atom.object])

        body = [enc(a) for a in rule.body]
        heads.append(enc(rule.head))
        bodies.extend(body)
        body_start.append(len(bodies))
        for p in range(len(body)):
            plans.extend(_join_plan(body, p))
        plan_start.append(len(plans))
        rule_ids.append(ri)
        nvars.append(len(var_ids))

    def arr(x, shape=None):
        a = np.array(x, dtype=np.int32)
        if shape is not None:
            a = a.reshape(shape)
        return np.ascontiguousarray(a)

    return (
        arr(heads, (-1, 3)),
        arr(bodies, (-1, 3)),
        arr(body_start),
        arr(plans),
        arr(plan_start),
        arr(rule_ids),
        arr(nvars),
    )
