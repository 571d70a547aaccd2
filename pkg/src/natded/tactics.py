"""Tactics and tacticals.

A tactic is a function from a proof state (a kernel Theorem with an explicit
subgoal count) to a lazy sequence of successor states.  Tacticals combine
tactics; search tacticals enumerate reachable states under a node budget.
"""

from __future__ import annotations

import heapq
from typing import Callable, Iterator, List

from . import kernel as K
from .terms import term_size

Tactic = Callable[[K.Theorem], Iterator[K.Theorem]]


class SearchBudget:
    """Mutable counter shared across one search invocation; when it runs out
    the stream simply ends (a flag records the truncation)."""

    __slots__ = ("nodes", "truncated")

    def __init__(self, nodes: int):
        self.nodes = nodes
        self.truncated = False

    def tick(self) -> bool:
        if self.nodes <= 0:
            self.truncated = True
            return False
        self.nodes -= 1
        return True


# ---------------------------------------------------------------------------
# Basic tactics

def all_tac(state):
    yield state


def fail_tac(state):
    return
    yield


def resolve_tac(rules, i: int) -> Tactic:
    def tac(state):
        for r in rules:
            yield from K.resolve(r, i, state)
    return tac


def eresolve_tac(rules, i: int) -> Tactic:
    def tac(state):
        for r in rules:
            yield from K.resolve(r, i, state, mode="eres")
    return tac


def dresolve_tac(rules, i: int) -> Tactic:
    def tac(state):
        for r in rules:
            yield from K.resolve(r, i, state, mode="dres")
    return tac


def assume_tac(i: int) -> Tactic:
    def tac(state):
        yield from K.assumption(i, state)
    return tac


def eq_assume_tac(i: int) -> Tactic:
    """Proof by assumption without instantiating any unknowns."""
    def tac(state):
        for thm, env in K.assumption(i, state, with_env=True):
            if not env.assign and not env.flexflex:
                yield thm
    return tac


# ---------------------------------------------------------------------------
# Tacticals

def then_(t1: Tactic, t2: Tactic) -> Tactic:
    def tac(state):
        for s1 in t1(state):
            yield from t2(s1)
    return tac


def every(tactics) -> Tactic:
    out = all_tac
    for t in reversed(list(tactics)):
        out = then_(t, out) if out is not all_tac else t
    return out if tactics else all_tac


def orelse(t1: Tactic, t2: Tactic) -> Tactic:
    def tac(state):
        it = iter(t1(state))
        first = next(it, None)
        if first is None:
            yield from t2(state)
        else:
            yield first
            yield from it
    return tac


def append_(t1: Tactic, t2: Tactic) -> Tactic:
    def tac(state):
        yield from t1(state)
        yield from t2(state)
    return tac


def first(tactics) -> Tactic:
    out = fail_tac
    for t in reversed(list(tactics)):
        out = orelse(t, out) if out is not fail_tac else t
    return out if tactics else fail_tac


def try_(t: Tactic) -> Tactic:
    return orelse(t, all_tac)


def repeat(t: Tactic, fuel: int = 5000) -> Tactic:
    """Apply t as many times as possible (backtracking across choices)."""
    def tac(state):
        def go(s, depth):
            progressed = False
            if depth < fuel:
                for s2 in t(s):
                    progressed = True
                    yield from go(s2, depth + 1)
            if not progressed:
                yield s
        yield from go(state, 0)
    return tac


def repeat1(t: Tactic, fuel: int = 5000) -> Tactic:
    return then_(t, repeat(t, fuel))


def repeat_determ(t: Tactic, fuel: int = 100000) -> Tactic:
    """Apply t until it fails, committing to the first result each time."""
    def tac(state):
        s = state
        for _ in range(fuel):
            nxt = next(iter(t(s)), None)
            if nxt is None:
                break
            s = nxt
        yield s
    return tac


def changed(t: Tactic) -> Tactic:
    def tac(state):
        for s in t(state):
            if s.prop != state.prop:
                yield s
    return tac


# ---------------------------------------------------------------------------
# Search

def has_fewer_prems(n: int):
    return lambda st: st.nprems() < n


def no_subgoals(st) -> bool:
    return st.nprems() == 0


def state_size(st) -> int:
    return st.nprems() + term_size(st.prop)


def depth_first(pred, tac: Tactic, budget: int = 20000) -> Tactic:
    """Enumerate states satisfying pred, reachable by iterating tac,
    depth-first with backtracking (iterative, so deep searches are safe)."""
    def search(state):
        b = SearchBudget(budget)
        stack = [iter([state])]
        while stack:
            s = next(stack[-1], None)
            if s is None:
                stack.pop()
                continue
            if not b.tick():
                return
            if pred(s):
                yield s
                continue
            stack.append(iter(tac(s)))
    return search


def best_first(pred, heuristic, tac: Tactic, budget: int = 200000) -> Tactic:
    """Best-first search by the heuristic (smaller is better)."""
    def search(state):
        b = SearchBudget(budget)
        count = 0
        heap = [(heuristic(state), 0, state)]
        while heap:
            if not b.tick():
                return
            _, _, s = heapq.heappop(heap)
            if pred(s):
                yield s
                continue
            for s2 in tac(s):
                count += 1
                heapq.heappush(heap, (heuristic(s2), count, s2))
    return search


def depth_solve(tac: Tactic, budget: int = 50000) -> Tactic:
    return depth_first(no_subgoals, tac, budget)


# ---------------------------------------------------------------------------
# Goal selection: run a tactic inside subgoal i only

def select_goal(tac: Tactic, i: int) -> Tactic:
    def stac(state):
        sgs = state.subgoals()
        if not 1 <= i <= len(sgs):
            return
        sub = K.trivial(state.theory, sgs[i - 1])
        for result in tac(sub):
            yield from K.resolve(result, i, state, lift_rule=False)
    return stac


def solve_goal(tac: Tactic, i: int, budget: int = 50000) -> Tactic:
    """Completely solve subgoal i using depth-first search over tac."""
    return select_goal(depth_solve(tac, budget), i)


# ---------------------------------------------------------------------------
# Explicit instantiation before resolution.  Terms are parsed in the state's
# theory; free variables matching the displayed parameter names of the target
# subgoal refer to those parameters.

def _inst_rule_for(state, i: int, rule, pairs):
    from .syntax import parse_term
    from .terms import Free, Fun, ITYPE, frees_of, subst_frees, vars_of

    params, hyps, concl = K.dest_subgoal(state.subgoals()[i - 1])
    # displayed parameter names, replicating the printer's freshening
    names = []
    for hint, ty in params:
        base = hint or "x"
        cand = base
        k = 0
        while cand in names:
            cand = base + "abcdefghijklmnopqrstuvwxyz"[k % 26] * (1 + k // 26)
            k += 1
        names.append(cand)
    zmap = {}
    zfrees = []
    for idx, ((hint, ty), disp) in enumerate(zip(params, names)):
        z = "z!%d" % idx
        zmap[disp] = Free(z, ty)
        zfrees.append(z)
    rule_vars = vars_of(K.strip_meta_all_vars(rule.prop))
    inst = {}
    todo = list(pairs)
    while todo:
        var_name = todo.pop(0)
        term_text = todo.pop(0)
        ty = rule_vars.get(var_name)
        t = parse_term(state.theory, term_text, expect=ty)
        t = subst_frees(t, zmap)
        inst[var_name] = t
    rinst = K.instantiate(rule, inst)
    if zfrees:
        rinst = K.generalize(rinst, zfrees)
    return rinst


def res_inst_tac(pairs):
    def with_rule(rule):
        def with_goal(i):
            def tac(state):
                rinst = _inst_rule_for(state, i, rule, pairs)
                yield from K.resolve(rinst, i, state)
            return tac
        return with_goal
    return with_rule


def eres_inst_tac(pairs):
    def with_rule(rule):
        def with_goal(i):
            def tac(state):
                rinst = _inst_rule_for(state, i, rule, pairs)
                yield from K.resolve(rinst, i, state, mode="eres")
            return tac
        return with_goal
    return with_rule


def dres_inst_tac(pairs):
    def with_rule(rule):
        def with_goal(i):
            def tac(state):
                rinst = _inst_rule_for(state, i, rule, pairs)
                yield from K.resolve(rinst, i, state, mode="dres")
            return tac
        return with_goal
    return with_rule
