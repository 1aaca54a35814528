# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled semi-naive forward chaining over integer-encoded facts.

Mirrors ``dub._kernel_py`` step for step: same iteration order, same
provenance witnesses, same status codes.
"""

from libc.stdint cimport int32_t, int64_t, uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from cython.operator cimport dereference as deref

import numpy as np

cdef enum:
    FIXPOINT = 0
    GOAL_FOUND = 1
    LIMIT = 2


cdef class _Chainer:
    cdef vector[int32_t] fs, fr, fo
    cdef unordered_map[uint64_t, int32_t] key_idx
    cdef unordered_map[uint64_t, vector[int32_t]] by_rs
    cdef unordered_map[uint64_t, vector[int32_t]] by_ro
    cdef vector[vector[int32_t]] by_r
    cdef vector[vector[int32_t]] delta_by_r
    cdef uint64_t n_obj, n_rel

    cdef const int32_t[:, ::1] head
    cdef const int32_t[:, ::1] body
    cdef const int32_t[::1] body_start
    cdef const int32_t[::1] plan
    cdef const int32_t[::1] plan_start
    cdef const int32_t[::1] rule_ids

    cdef vector[int32_t] binding
    cdef vector[int32_t] chosen
    cdef int32_t cur_rule, cur_nb, cur_plan, cur_body

    cdef vector[int32_t] ps, pr, po
    cdef unordered_map[uint64_t, int32_t] pending
    cdef bint want_prov
    cdef vector[int32_t] prov_rule, prov_start, prov_body

    cdef uint64_t goal_key
    cdef bint has_goal
    cdef int status
    cdef int64_t max_derived
    cdef int64_t n_initial

    cdef inline uint64_t fkey(self, int32_t s, int32_t r, int32_t o):
        return (<uint64_t>s * self.n_rel + <uint64_t>r) * self.n_obj + <uint64_t>o

    cdef void add_fact(self, int32_t s, int32_t r, int32_t o):
        cdef int32_t idx = <int32_t>self.fs.size()
        self.fs.push_back(s)
        self.fr.push_back(r)
        self.fo.push_back(o)
        self.key_idx[self.fkey(s, r, o)] = idx
        self.by_rs[<uint64_t>r * self.n_obj + <uint64_t>s].push_back(idx)
        self.by_ro[<uint64_t>r * self.n_obj + <uint64_t>o].push_back(idx)
        self.by_r[r].push_back(idx)

    cdef void emit(self):
        cdef int32_t hs = self.binding[self.head[self.cur_rule, 0]]
        cdef int32_t hr = self.head[self.cur_rule, 1]
        cdef int32_t ho = self.binding[self.head[self.cur_rule, 2]]
        cdef uint64_t k = self.fkey(hs, hr, ho)
        cdef int32_t j
        if self.key_idx.count(k) or self.pending.count(k):
            return
        self.pending[k] = <int32_t>self.ps.size()
        self.ps.push_back(hs)
        self.pr.push_back(hr)
        self.po.push_back(ho)
        if self.want_prov:
            self.prov_rule.push_back(self.rule_ids[self.cur_rule])
            for j in range(self.cur_nb):
                self.prov_body.push_back(self.chosen[j])
            self.prov_start.push_back(<int32_t>self.prov_body.size())
        if self.has_goal and k == self.goal_key:
            self.status = GOAL_FOUND
        elif <int64_t>(self.fs.size() + self.ps.size()) - self.n_initial > self.max_derived:
            self.status = LIMIT

    cdef void join(self, int32_t depth):
        cdef int32_t a, sv, ov, rel, bs, bo, idx, s, o
        cdef size_t i, n
        cdef uint64_t k
        cdef vector[int32_t]* bucket
        cdef unordered_map[uint64_t, int32_t].iterator it
        if depth == self.cur_nb:
            self.emit()
            return
        a = self.plan[self.cur_plan + depth]
        sv = self.body[self.cur_body + a, 0]
        rel = self.body[self.cur_body + a, 1]
        ov = self.body[self.cur_body + a, 2]
        bs = self.binding[sv]
        bo = self.binding[ov]
        if bs >= 0 and bo >= 0:
            k = self.fkey(bs, rel, bo)
            it = self.key_idx.find(k)
            if it != self.key_idx.end():
                self.chosen[a] = deref(it).second
                self.join(depth + 1)
            return
        if bs >= 0:
            k = <uint64_t>rel * self.n_obj + <uint64_t>bs
            if not self.by_rs.count(k):
                return
            bucket = &self.by_rs[k]
            n = bucket.size()
            for i in range(n):
                idx = bucket[0][i]
                self.chosen[a] = idx
                self.binding[ov] = self.fo[idx]
                self.join(depth + 1)
                if self.status != FIXPOINT:
                    break
            self.binding[ov] = -1
            return
        if bo >= 0:
            k = <uint64_t>rel * self.n_obj + <uint64_t>bo
            if not self.by_ro.count(k):
                return
            bucket = &self.by_ro[k]
            n = bucket.size()
            for i in range(n):
                idx = bucket[0][i]
                self.chosen[a] = idx
                self.binding[sv] = self.fs[idx]
                self.join(depth + 1)
                if self.status != FIXPOINT:
                    break
            self.binding[sv] = -1
            return
        bucket = &self.by_r[rel]
        n = bucket.size()
        for i in range(n):
            idx = bucket[0][i]
            s = self.fs[idx]
            o = self.fo[idx]
            if sv == ov and s != o:
                continue
            self.chosen[a] = idx
            self.binding[sv] = s
            self.binding[ov] = o
            self.join(depth + 1)
            if self.status != FIXPOINT:
                break
        self.binding[sv] = -1
        self.binding[ov] = -1

    cdef void run(self):
        cdef int32_t n_rules = <int32_t>self.head.shape[0]
        cdef int32_t ri, p, nb, a, sv, ov, rel, s, o, idx
        cdef int32_t delta_lo = 0
        cdef int32_t delta_hi = <int32_t>self.fs.size()
        cdef size_t i, j, n
        cdef vector[int32_t]* bucket
        while delta_lo < delta_hi and self.status == FIXPOINT:
            for rel in range(<int32_t>self.n_rel):
                self.delta_by_r[rel].clear()
            for idx in range(delta_lo, delta_hi):
                self.delta_by_r[self.fr[idx]].push_back(idx)
            for ri in range(n_rules):
                self.cur_rule = ri
                self.cur_body = self.body_start[ri]
                nb = self.body_start[ri + 1] - self.cur_body
                self.cur_nb = nb
                for p in range(nb):
                    self.cur_plan = self.plan_start[ri] + p * nb
                    a = self.plan[self.cur_plan]
                    sv = self.body[self.cur_body + a, 0]
                    rel = self.body[self.cur_body + a, 1]
                    ov = self.body[self.cur_body + a, 2]
                    bucket = &self.delta_by_r[rel]
                    n = bucket.size()
                    for i in range(n):
                        idx = bucket[0][i]
                        s = self.fs[idx]
                        o = self.fo[idx]
                        if sv == ov and s != o:
                            continue
                        self.chosen[a] = idx
                        self.binding[sv] = s
                        self.binding[ov] = o
                        self.join(1)
                        self.binding[sv] = -1
                        self.binding[ov] = -1
                        if self.status != FIXPOINT:
                            return
            delta_lo = delta_hi
            for j in range(self.ps.size()):
                self.add_fact(self.ps[j], self.pr[j], self.po[j])
            self.ps.clear()
            self.pr.clear()
            self.po.clear()
            self.pending.clear()
            delta_hi = <int32_t>self.fs.size()


def closure(facts, int n_objects, int n_relations, rules, goal, long long max_derived, bint want_prov):
    """See ``dub._kernel_py.closure`` for the contract."""
    cdef _Chainer c = _Chainer()
    cdef const int32_t[:, ::1] fv = np.ascontiguousarray(facts, dtype=np.int32).reshape(-1, 3)
    cdef int32_t i, s, r, o, max_vars
    cdef size_t j, n_out
    cdef int32_t[:, ::1] outv
    cdef uint64_t k
    head, body, body_start, plan, plan_start, rule_ids, nvars = rules
    c.n_obj = max(n_objects, 1)
    c.n_rel = max(n_relations, 1)
    c.head = head
    c.body = body
    c.body_start = body_start
    c.plan = plan
    c.plan_start = plan_start
    c.rule_ids = rule_ids
    max_vars = int(max(nvars)) if len(nvars) else 0
    c.binding.assign(max_vars + 1, -1)
    c.chosen.assign(int(body.shape[0]) + 1, -1)
    c.by_r.resize(c.n_rel)
    c.delta_by_r.resize(c.n_rel)
    c.want_prov = want_prov
    c.prov_start.push_back(0)
    c.max_derived = max_derived
    c.status = FIXPOINT
    c.has_goal = goal is not None
    if c.has_goal:
        c.goal_key = c.fkey(goal[0], goal[1], goal[2])
    for i in range(fv.shape[0]):
        s, r, o = fv[i, 0], fv[i, 1], fv[i, 2]
        k = c.fkey(s, r, o)
        if c.key_idx.count(k):
            continue
        c.add_fact(s, r, o)
    c.n_initial = <int64_t>c.fs.size()
    if c.has_goal and c.key_idx.count(c.goal_key):
        c.status = GOAL_FOUND
    else:
        c.run()
    if c.status == GOAL_FOUND and not want_prov:
        return None, None, c.status
    # flush a round cut short by the goal so provenance indexes stay valid
    for j in range(c.ps.size()):
        c.add_fact(c.ps[j], c.pr[j], c.po[j])
    n_out = c.fs.size()
    out = np.empty((n_out, 3), dtype=np.int32)
    outv = out
    for j in range(n_out):
        outv[j, 0] = c.fs[j]
        outv[j, 1] = c.fr[j]
        outv[j, 2] = c.fo[j]
    if not want_prov:
        return out, None, c.status
    prov_rule = np.array([c.prov_rule[j] for j in range(c.prov_rule.size())], dtype=np.int32)
    prov_start = np.array([c.prov_start[j] for j in range(c.prov_start.size())], dtype=np.int32)
    prov_body = np.array([c.prov_body[j] for j in range(c.prov_body.size())], dtype=np.int32)
    return out, (prov_rule, prov_start, prov_body), c.status
