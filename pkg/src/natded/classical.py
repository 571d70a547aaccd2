"""The generic classical reasoner: rule-set containers (ClaSet) and the
safe_tac / fast_tac / best_tac procedures, working sequent-style over
natural deduction rules.

Safe rules are applied by matching (they never instantiate unknowns shared
with the rest of the proof state); unsafe rules may instantiate and are
therefore only tried inside the backtracking search.
"""

from __future__ import annotations

import heapq
from typing import Iterator, List, Optional, Tuple

from . import kernel as K
from .terms import (
    Abs, App, Bound, Const, Free, Term, Var, abstract_over_free, frees_of,
    term_size, vars_of,
)
from .tactics import (
    SearchBudget, Tactic, all_tac, assume_tac, eq_assume_tac, select_goal,
    state_size, then_,
)


class ClaSet:
    """Buckets of introduction/elimination rules for the classical reasoner.

    The *_rev fields carry support theorems for equality hypothesis
    substitution and contradiction detection; they are configured once when
    the base rule library is built."""

    def __init__(self, name="cs", safe_intros=(), safe_elims=(),
                 unsafe_intros=(), unsafe_elims=(), not_elim=None,
                 mp_rule=None, swap_rule=None,
                 hyp_subst_rules=None, dup_bound=3,
                 fast_budget=50000, best_budget=200000):
        self.name = name
        self.safe_intros = tuple(safe_intros)
        self.safe_elims = tuple(safe_elims)
        self.unsafe_intros = tuple(unsafe_intros)
        self.unsafe_elims = tuple(unsafe_elims)
        self.not_elim = not_elim
        self.mp_rule = mp_rule
        self.swap_rule = swap_rule
        self.hyp_subst_rules = hyp_subst_rules   # (rev_mp, subst, ssubst, impI)
        self.dup_bound = dup_bound
        self.fast_budget = fast_budget
        self.best_budget = best_budget

    def _copy(self, **kw):
        base = dict(name=self.name, safe_intros=self.safe_intros,
                    safe_elims=self.safe_elims, unsafe_intros=self.unsafe_intros,
                    unsafe_elims=self.unsafe_elims, not_elim=self.not_elim,
                    mp_rule=self.mp_rule, swap_rule=self.swap_rule,
                    hyp_subst_rules=self.hyp_subst_rules,
                    dup_bound=self.dup_bound, fast_budget=self.fast_budget,
                    best_budget=self.best_budget)
        base.update(kw)
        return ClaSet(**base)

    def add_safe_intros(self, rules):
        return self._copy(safe_intros=self.safe_intros + tuple(rules))

    def add_safe_elims(self, rules):
        return self._copy(safe_elims=self.safe_elims + tuple(rules))

    def add_unsafe_intros(self, rules):
        return self._copy(unsafe_intros=self.unsafe_intros + tuple(rules))

    def add_unsafe_elims(self, rules):
        return self._copy(unsafe_elims=self.unsafe_elims + tuple(rules))

    def add_safe_dests(self, rules):
        return self.add_safe_elims([K.make_elim(r) for r in rules])

    def add_unsafe_dests(self, rules):
        return self.add_unsafe_elims([K.make_elim(r) for r in rules])

    def set_not_elim(self, rule):
        return self._copy(not_elim=rule)

    def set_mp(self, rule):
        return self._copy(mp_rule=rule)

    def set_swap(self, rule):
        return self._copy(swap_rule=rule)

    def mp_elim(self):
        cached = getattr(self, "_mp_elim", None)
        if cached is None and self.mp_rule is not None:
            cached = K.make_elim(self.mp_rule)
            self._mp_elim = cached
        return cached

    def set_hyp_subst(self, rules):
        return self._copy(hyp_subst_rules=tuple(rules))

    def __repr__(self):
        return "<ClaSet %s: %d safe-I, %d safe-E, %d I, %d E>" % (
            self.name, len(self.safe_intros), len(self.safe_elims),
            len(self.unsafe_intros), len(self.unsafe_elims))

    def compiled(self):
        cache = getattr(self, "_compiled", None)
        if cache is None:
            swapped = []
            if self.swap_rule is not None:
                for r in self.safe_intros + self.unsafe_intros:
                    sw = _swapify(r, self.swap_rule)
                    if sw is not None:
                        swapped.append(sw)
            cache = (_index_rules(self.safe_intros),
                     _index_rules(self.safe_elims),
                     _index_rules(self.unsafe_intros),
                     _index_rules(self.unsafe_elims),
                     swapped)
            self._compiled = cache
        return cache


empty_cs = ClaSet("empty_cs")


def formula_head(t: Term):
    """Rigid head of a proposition's object formula (under the judgement
    wrapper), or of the proposition itself for meta-level forms."""
    from .unify import head_key
    body = _dest_tp(t)
    return head_key(body if body is not None else t)


def _swapify(intro, swap_rule):
    """Turn an introduction rule into an elimination on a negated assumption,
    by resolving it into the classical swap rule's second premise."""
    from .unify import head_key
    try:
        out = None
        for cand in K.resolve(intro, 2, swap_rule):
            out = cand
            break
        if out is None:
            return None
        _, concl = K.strip_implies(K.strip_meta_all_vars(intro.prop))
        body = _dest_tp(concl)
        return (out, head_key(body if body is not None else concl))
    except Exception:
        return None


def _index_rules(rules):
    """Pair each rule with the rigid head of its conclusion and of its major
    premise (for elim-rule prefiltering against assumption heads)."""
    from .unify import head_key
    out = []
    for r in rules:
        prems, concl = K.strip_implies(K.strip_meta_all_vars(r.prop))
        chead = formula_head(concl)
        mhead = None
        if prems:
            _, _, mconcl = K.dest_subgoal(K.prenex_subgoal(prems[0]))
            mhead = formula_head(mconcl)
        out.append((r, chead, mhead, _is_dup_rule(r)))
    return out


def _is_dup_rule(rule: K.Theorem) -> Optional[Term]:
    """An unsafe elim is duplication-style when its major premise reappears in
    a later premise (the eliminated assumption is kept for reuse)."""
    prems, _ = K.strip_implies(rule.prop)
    if len(prems) < 2:
        return None
    major = prems[0]
    for p in prems[1:]:
        inner_prems, _ = K.strip_implies(p)
        if major in inner_prems:
            return major
    return None


# ---------------------------------------------------------------------------
# Safe steps (matching only)

def _state_vars(state) -> set:
    vs = set(vars_of(state.prop))
    for a, b in state.tpairs:
        vs.update(vars_of(a))
        vs.update(vars_of(b))
    return vs


def _match_results(gen, state_vars):
    """Filter resolution results to those that did not instantiate any
    unknown of the state (safe-rule discipline)."""
    for thm, env in gen:
        if env.flexflex:
            continue
        if any(k in state_vars for k in env.assign):
            continue
        yield thm


def safe_resolve(rule, i, state, state_vars, mode="res"):
    return _match_results(
        K.resolve(rule, i, state, mode=mode, with_env=True), state_vars)


def contradiction_step(cs: ClaSet, i: int, state):
    """Close subgoal i whose assumptions contain both P and ~P (by matching)."""
    if cs.not_elim is None:
        return None
    for s1 in K.resolve(cs.not_elim, i, state, mode="eres"):
        for s2 in eq_assume_tac(i)(s1):
            return s2
    return None


# ---------------------------------------------------------------------------
# Equality hypothesis substitution

def _var_like(t: Term, params_n: int):
    if t.__class__ is Free:
        return True
    if t.__class__ is Bound and t.index < params_n:
        return True
    return False


def _occurs_term(sub: Term, t: Term) -> bool:
    if sub == t:
        return True
    cls = t.__class__
    if cls is App:
        return _occurs_term(sub, t.fun) or _occurs_term(sub, t.arg)
    if cls is Abs:
        from .terms import lift
        return _occurs_term(lift(sub, 1), t.body)
    return False


def _dest_tp_eq(h: Term):
    """Destructure Trueprop(a = b)."""
    if h.__class__ is App and h.fun.__class__ is Const and \
            h.fun.name == "Trueprop":
        body = h.arg
        hd, args = _strip2(body)
        if hd is not None and hd.name == "eq" and len(args) == 2:
            return args[0], args[1]
    return None


def _strip2(t: Term):
    args = []
    while t.__class__ is App:
        args.append(t.arg)
        t = t.fun
    args.reverse()
    if t.__class__ is Const:
        return t, args
    return None, args


def _subst_rule_slots(rule: K.Theorem):
    """For a substitution rule [| x1 = x2; P(..) |] ==> P(..), return the
    names (v1, v2, pv, replaced) where v1/v2 are the equation's unknowns, pv
    the context unknown, and replaced is 1 or 2 (which side the conclusion
    applies the context to: that side gets rewritten away)."""
    prems, concl = K.strip_implies(rule.prop)
    if len(prems) != 2:
        return None
    eq = _dest_tp_eq(prems[0])
    body = _dest_tp(concl)
    if eq is None or body is None or body.__class__ is not App:
        return None
    va, vb = eq
    if va.__class__ is not Var or vb.__class__ is not Var:
        return None
    pv, arg = body.fun, body.arg
    if pv.__class__ is not Var or arg.__class__ is not Var:
        return None
    if arg.name == va.name:
        return va.name, vb.name, pv.name, 1
    if arg.name == vb.name:
        return va.name, vb.name, pv.name, 2
    return None


def find_subst_hyp(state, i: int):
    """Index of a substitutable equality assumption of subgoal i: one side a
    parameter or free variable absent from the other side."""
    params, hyps, _ = K.dest_subgoal(state.subgoals()[i - 1])
    pn = len(params)
    for j, h in enumerate(hyps):
        eq = _dest_tp_eq(h)
        if eq is None:
            continue
        a, b = eq
        if a == b:
            continue
        if (_var_like(a, pn) and not _occurs_term(a, b)) or \
                (_var_like(b, pn) and not _occurs_term(b, a)):
            return j
    return None


def hyp_subst_tac(cs: ClaSet, i: int) -> Tactic:
    def tac(state):
        out = hyp_subst_step(cs, i, state)
        if out is not None:
            yield out
    return tac


def hyp_subst_step(cs: ClaSet, i: int, state):
    """Substitute a 'variable = term' assumption throughout subgoal i and
    delete it.  Built entirely from kernel steps: fold the other assumptions
    into the conclusion, resolve an explicitly instantiated substitution rule,
    then re-introduce the assumptions."""
    if cs.hyp_subst_rules is None:
        return None
    rev_mp, subst_rules, impI = (cs.hyp_subst_rules[0],
                                 cs.hyp_subst_rules[1:-1],
                                 cs.hyp_subst_rules[-1])
    j = find_subst_hyp(state, i)
    if j is None:
        return None
    params, hyps, concl = K.dest_subgoal(state.subgoals()[i - 1])
    if any(_dest_tp(h) is None for h in hyps) or _dest_tp(concl) is None:
        return None
    n = len(hyps)
    s = state
    # fold the other assumptions into the conclusion, last first, so that
    # re-introduction restores the original order (removals happen strictly
    # above the next target index, so indices below stay put)
    folded = 0
    for k in range(n - 1, -1, -1):
        if k == j:
            continue
        succ = _nth_eres(rev_mp, i, s, k)
        if succ is None:
            return None
        s = succ
        folded += 1
    params2, hyps2, concl2 = K.dest_subgoal(s.subgoals()[i - 1])
    if len(hyps2) != 1:
        return None
    eq = _dest_tp_eq(hyps2[0])
    if eq is None:
        return None
    a, b = eq
    # freeze parameters as fresh frees
    used = set(frees_of(s.prop))
    zs = []
    for hint, ty in params2:
        nm = "z_%s" % hint
        k2 = 0
        while nm in used:
            k2 += 1
            nm = "z_%s%d" % (hint, k2)
        used.add(nm)
        zs.append((nm, ty))
    frees = [Free(nm, ty) for nm, ty in zs]
    from .terms import subst_bounds

    def freeze(t):
        return subst_bounds(t, list(reversed(frees))) if frees else t

    a0, b0 = freeze(a), freeze(b)
    phi0 = freeze(_dest_tp(concl2))
    pn = len(params2)
    succ = None
    for rule in subst_rules:
        slots = _subst_rule_slots(rule)
        if slots is None:
            continue
        v1, v2, pv, replaced = slots
        target = a0 if replaced == 1 else b0
        other = b0 if replaced == 1 else a0
        if target.__class__ is not Free or _occurs_term(target, other):
            continue
        ctxt = Abs(target.name, target.ty,
                   abstract_over_free(phi0, target.name))
        rinst = K.instantiate(rule, {v1: a0, v2: b0, pv: ctxt})
        rinst = K.generalize(rinst, [nm for nm, _ in zs])
        for cand in K.resolve(rinst, i, s, mode="eres"):
            succ = cand
            break
        if succ is not None:
            break
    if succ is None:
        return None
    s = succ
    # re-introduce the folded assumptions
    for _ in range(folded):
        nxt = None
        for cand in K.resolve(impI, i, s):
            nxt = cand
            break
        if nxt is None:
            return None
        s = nxt
    return s


def _dest_tp(h: Term):
    if h.__class__ is App and h.fun.__class__ is Const and \
            h.fun.name == "Trueprop":
        return h.arg
    return None


def _mk_tp_like(sample_tp: Term, body: Term) -> Term:
    return App(sample_tp.fun, body)


def _nth_eres(rule, i, state, j):
    """The first eresolve successor that consumed assumption j of subgoal i."""
    for cand in K.resolve(rule, i, state, mode="eres", eres_hyp=j):
        return cand
    return None


# ---------------------------------------------------------------------------
# safe_tac

def safe_step(cs: ClaSet, state, i: int, memo=None):
    """One deterministic safe step on subgoal i, or None.  Safe steps only
    inspect and change subgoal i, so saturation is memoizable per subgoal."""
    sg = state.subgoals()[i - 1]
    sg_key = term_key(sg) if memo is not None else None
    if memo is not None and memo.get(sg_key, True) is False:
        return None
    params, hyps, concl = K.dest_subgoal(sg)
    sg_vars = set(vars_of(sg))
    chead = formula_head(concl)
    hyp_heads = {formula_head(h) for h in hyps}
    safe_i, safe_e, _, _, _sw = cs.compiled()
    out = None
    while True:
        # 1. assumption by matching
        if None in hyp_heads or chead in hyp_heads or chead is None:
            for s in eq_assume_tac(i)(state):
                out = s
                break
            if out is not None:
                break
        # 2. immediate contradiction
        if "Not" in hyp_heads:
            out = contradiction_step(cs, i, state)
            if out is not None:
                break
        # 2b. unit modus ponens: P-->Q and P both present (by matching)
        if "imp" in hyp_heads and cs.mp_rule is not None:
            hyp_set = set(hyps)
            me = cs.mp_elim()
            for j, h in enumerate(hyps):
                d = _dest_tp(h)
                if d is None or d.__class__ is not App or \
                        d.fun.__class__ is not App or \
                        d.fun.fun.__class__ is not Const or \
                        d.fun.fun.name != "imp":
                    continue
                p_part = _mk_tp_like(h, d.fun.arg)
                if p_part in hyp_set:
                    s1 = _nth_eres(me, i, state, j)
                    if s1 is not None:
                        for s2 in eq_assume_tac(i)(s1):
                            out = s2
                            break
                if out is not None:
                    break
            if out is not None:
                break
        # 3. zero-premise safe intros (close the goal outright, by matching)
        for r, ch, _mh, _dup in safe_i:
            if r.nprems() == 0 and (ch is None or ch == chead or chead is None):
                for s in safe_resolve(r, i, state, sg_vars):
                    out = s
                    break
            if out is not None:
                break
        if out is not None:
            break
        # 4. equality assumption substitution
        if "eq" in hyp_heads:
            out = hyp_subst_step(cs, i, state)
            if out is not None:
                break
        # 5. safe eliminations
        for r, _ch, mh, _dup in safe_e:
            if mh is not None and mh not in hyp_heads and None not in hyp_heads:
                continue
            for s in safe_resolve(r, i, state, sg_vars, mode="eres"):
                out = s
                break
            if out is not None:
                break
        if out is not None:
            break
        # 6. remaining safe introductions
        for r, ch, _mh, _dup in safe_i:
            if r.nprems() == 0:
                continue
            if ch is not None and chead is not None and ch != chead:
                continue
            for s in safe_resolve(r, i, state, sg_vars):
                out = s
                break
            if out is not None:
                break
        break
    if out is None and memo is not None:
        memo[sg_key] = False
    return out


def safe_tac(cs: ClaSet, memo=None) -> Tactic:
    """Exhaustively apply safe steps to all subgoals (deterministic)."""
    def tac(state):
        mm = {} if memo is None else memo
        s = state
        fuel = 10000
        while fuel > 0:
            fuel -= 1
            n = s.nprems()
            progressed = False
            for i in range(1, n + 1):
                s2 = safe_step(cs, s, i, mm)
                if s2 is not None:
                    s = s2
                    progressed = True
                    break
            if not progressed:
                break
        yield s
    return tac


def safe_step_tac(cs: ClaSet, i: int) -> Tactic:
    def tac(state):
        s = safe_step(cs, state, i)
        if s is not None:
            yield s
    return tac


# ---------------------------------------------------------------------------
# The search: fast_tac (depth-first) and best_tac (best-first)

def _expand(cs: ClaSet, state, dups, memo=None):
    """Successor list for the classical search, working on subgoal 1.
    Returns a list of (state, dups) pairs in preference order."""
    from .unify import head_key
    out = []
    # deterministic safe saturation first
    s = next(safe_tac(cs, memo)(state))
    if s.prop != state.prop:
        return [(s, dups, True)]
    if state.nprems() == 0:
        return []
    params, hyps, concl = K.dest_subgoal(state.subgoals()[0])
    chead = formula_head(concl)
    hyp_heads = {formula_head(h) for h in hyps}
    flexible = chead is None or None in hyp_heads
    safe_i, safe_e, unsafe_i, unsafe_e, _swapped = cs.compiled()
    # instantiating closers
    if flexible or chead in hyp_heads:
        for thm in assume_tac(1)(state):
            out.append((thm, dups, False))
    if cs.not_elim is not None and "Not" in hyp_heads:
        for s1 in K.resolve(cs.not_elim, 1, state, mode="eres"):
            for s2 in assume_tac(1)(s1):
                out.append((s2, dups, False))
    # safe rules, now with instantiation allowed
    for r, ch, _mh, _dup in safe_i:
        if ch is not None and chead is not None and ch != chead:
            continue
        for thm in K.resolve(r, 1, state):
            out.append((thm, dups, False))
    for r, _ch, mh, _dup in safe_e:
        if mh is not None and not flexible and mh not in hyp_heads:
            continue
        for thm in K.resolve(r, 1, state, mode="eres"):
            out.append((thm, dups, False))
    # unsafe rules
    for r, ch, _mh, _dup in unsafe_i:
        if ch is not None and chead is not None and ch != chead:
            continue
        for thm in K.resolve(r, 1, state):
            out.append((thm, dups, False))
    for r, _ch, mh, dup_major in unsafe_e:
        if dup_major is not None:
            continue
        if mh is not None and not flexible and mh not in hyp_heads:
            continue
        for thm in K.resolve(r, 1, state, mode="eres"):
            out.append((thm, dups, False))
    # fair instantiation: one child in which every universal-style assumption
    # (within its per-branch reuse bound) receives one fresh instance
    gamma = None
    d2 = None
    for r, _ch, mh, dup_major in unsafe_e:
        if dup_major is None:
            continue
        base = state if gamma is None else gamma
        _, cur_hyps, _ = K.dest_subgoal(base.subgoals()[0])
        targets = []
        for h in cur_hyps:
            hk = term_key(h)
            if (dups if d2 is None else d2).get(hk, 0) >= cs.dup_bound:
                continue
            if mh is not None and formula_head(h) != mh:
                continue
            targets.append(h)
        for h in targets:
            base2 = gamma if gamma is not None else state
            _, hs, _ = K.dest_subgoal(base2.subgoals()[0])
            try:
                j = hs.index(h)
            except ValueError:
                continue
            succ = _nth_eres(r, 1, base2, j)
            if succ is not None:
                gamma = succ
                if d2 is None:
                    d2 = dict(dups)
                hk = term_key(h)
                d2[hk] = d2.get(hk, 0) + 1
    if gamma is not None:
        out.append((gamma, d2, False))
    swaps_used = dups.get("#swaps", 0)
    if swaps_used < cs.dup_bound + 2:
        d2 = dict(dups)
        d2["#swaps"] = swaps_used + 1
        for sw_rule, inner_head in cs.compiled()[4]:
            for j, h in enumerate(hyps):
                d = _dest_tp(h)
                if d is None or d.__class__ is not App or \
                        d.fun.__class__ is not Const or d.fun.name != "Not":
                    continue
                body_head = head_key(d.arg)
                if inner_head is not None and body_head is not None and \
                        inner_head != body_head:
                    continue
                for thm in K.resolve(sw_rule, 1, state, mode="eres", eres_hyp=j):
                    out.append((thm, d2, False))
    return out


_KEY_CACHE = {}


def term_key(t: Term) -> Term:
    """Canonical renaming of unknowns in a single term (cached)."""
    out = _KEY_CACHE.get(t)
    if out is not None:
        return out
    mapping = {}

    def go(x):
        cls = x.__class__
        if cls is Var:
            nm = mapping.get(x.name)
            if nm is None:
                nm = "v%d" % len(mapping)
                mapping[x.name] = nm
            return Var(nm, x.ty)
        if cls is App:
            return App(go(x.fun), go(x.arg))
        if cls is Abs:
            return Abs("", x.var_ty, go(x.body))
        return x
    out = go(t)
    if len(_KEY_CACHE) > 300000:
        _KEY_CACHE.clear()
    _KEY_CACHE[t] = out
    return out


def _skeleton(t: Term) -> int:
    """A hash that ignores unknown names (used to sort assumptions)."""
    cls = t.__class__
    if cls is Var:
        return hash(("?", t.ty))
    if cls is App:
        return hash((_skeleton(t.fun), _skeleton(t.arg)))
    if cls is Abs:
        return hash(("A", _skeleton(t.body)))
    return hash(t)


def state_key(prop: Term) -> Term:
    """Canonical form for search deduplication: assumptions sorted within
    each subgoal and unknowns renamed by order of first occurrence, so both
    lifting variants and assumption permutations coincide."""
    prems, concl = K.strip_implies(prop)
    new_prems = []
    for sg in prems:
        params, hyps, c = K.dest_subgoal(sg)
        if len(hyps) > 1:
            hyps = sorted(hyps, key=_skeleton)
            sg = K.mk_subgoal(params, hyps, c)
        new_prems.append(sg)
    prop = K.mk_implies(new_prems, concl)

    mapping = {}

    def go(t):
        cls = t.__class__
        if cls is Var:
            nm = mapping.get(t.name)
            if nm is None:
                nm = "v%d" % len(mapping)
                mapping[t.name] = nm
            return Var(nm, t.ty)
        if cls is App:
            return App(go(t.fun), go(t.arg))
        if cls is Abs:
            return Abs("", t.var_ty, go(t.body))
        return t
    return go(prop)


def _dedup(children):
    seen = set()
    uniq = []
    for s, d, det in children:
        key = state_key(s.prop)
        if key in seen:
            continue
        seen.add(key)
        uniq.append((s, d, det))
    return uniq


def _order_children(parent, children, mode):
    if mode == "size":
        children.sort(key=lambda sd: (sd[0].nprems(), term_size(sd[0].prop)))
    elif mode == "closure":
        pn = parent.nprems()
        children.sort(key=lambda sd: 0 if sd[0].nprems() < pn else 1)
    return children


_ORDER_MODE = ["size"]
_DEPTH_START = [5]


def fast_search(cs: ClaSet, budget: Optional[int] = None) -> Tactic:
    nb = budget if budget is not None else cs.fast_budget

    def search(state):
        b = SearchBudget(nb)
        memo = {}
        depth_limit = _DEPTH_START[0]
        while b.nodes > 0:
            # depth-bounded depth-first pass; deepen geometrically so that
            # shallow proofs are found before junk subtrees can blow up
            seen = {}
            stack = [(state, {}, 0)]
            exhausted = True
            while stack:
                s, dups, depth = stack.pop()
                key = state_key(s.prop)
                prev = seen.get(key)
                if prev is not None and prev <= depth:
                    continue
                seen[key] = depth
                if not b.tick():
                    return
                if s.nprems() == 0:
                    yield s
                    continue
                if depth >= depth_limit:
                    exhausted = False
                    continue
                children = _order_children(
                    s, _dedup(_expand(cs, s, dups, memo)), _ORDER_MODE[0])
                for c, d, det in reversed(children):
                    stack.append((c, d, depth if det else depth + 1))
            if exhausted:
                return
            depth_limit *= 2
    return search


def best_search(cs: ClaSet, budget: Optional[int] = None) -> Tactic:
    nb = budget if budget is not None else cs.best_budget

    def search(state):
        b = SearchBudget(nb)
        seen = set()
        memo = {}
        count = 0
        heap = [(state_size(state), 0, state, {})]
        while heap:
            if not b.tick():
                return
            _, _, s, dups = heapq.heappop(heap)
            key = state_key(s.prop)
            if key in seen:
                continue
            seen.add(key)
            if s.nprems() == 0:
                yield s
                continue
            for s2, d2, _det in _dedup(_expand(cs, s, dups, memo)):
                count += 1
                heapq.heappush(heap, (state_size(s2), count, s2, d2))
    return search


def fast_tac(cs: ClaSet, i: int, budget: Optional[int] = None) -> Tactic:
    """Prove subgoal i completely by depth-first search, or return nothing."""
    return select_goal(fast_search(cs, budget), i)


def best_tac(cs: ClaSet, i: int, budget: Optional[int] = None) -> Tactic:
    """Prove subgoal i completely by best-first search, or return nothing."""
    return select_goal(best_search(cs, budget), i)
