"""The trusted kernel: meta-logic constants, the Theorem abstraction, and the
primitive inferences (trivial states, lifting, resolution-composition,
assumption, instantiation, definition unfolding).

Theorem values can be constructed only through the operations in this module;
that module boundary is the soundness boundary.  A Theorem carries:

  theory   -- the theory it belongs to
  prop     -- its proposition (a Term of type prop)
  hyps     -- local hypotheses (from stated goal premises), discharged at qed
  tpairs   -- postponed flex-flex disagreement pairs
  ngoals   -- explicit subgoal count when the theorem is a proof state
"""

from __future__ import annotations

from typing import Iterator, Optional

from .terms import (
    Abs, App, Bound, Const, Env, Free, Fun, PROP, Term, Type, TypeError_, Var,
    base_name, frees_of, lift, max_name_index, mk_abs, mk_app, normalize,
    strip_app, strip_fun_type, subst_frees, subst_vars, typecheck, type_of,
    vars_of,
)
from .theory import Theory, join_theories
from .unify import could_unify, match, NoMatch, unify

# ---------------------------------------------------------------------------
# Errors

class KernelError(Exception):
    pass


class UnknownAxiom(KernelError):
    pass


class IllTyped(KernelError):
    pass


class TheoryMismatch(KernelError):
    pass


class NoMajorPremise(KernelError):
    pass


class NotADefinition(KernelError):
    pass


class ResultWithSubgoals(KernelError):
    pass


class UndischargedHypotheses(KernelError):
    pass


# ---------------------------------------------------------------------------
# Meta-logic vocabulary.  ==> and == and !!(written 'all') are hard-wired.

IMPLIES = Const("==>", Fun(PROP, Fun(PROP, PROP)))


def all_const(ty: Type) -> Const:
    return Const("all", Fun(Fun(ty, PROP), PROP))


def eq_const(ty: Type) -> Const:
    return Const("==", Fun(ty, Fun(ty, PROP)))


def mk_implies(prems, concl: Term) -> Term:
    t = concl
    for p in reversed(prems):
        t = mk_app(IMPLIES, p, t)
    return t


def dest_implies(t: Term):
    if (t.__class__ is App and t.fun.__class__ is App
            and t.fun.fun == IMPLIES):
        return t.fun.arg, t.arg
    return None


def strip_implies(t: Term, limit: Optional[int] = None):
    prems = []
    while limit is None or len(prems) < limit:
        d = dest_implies(t)
        if d is None:
            break
        prems.append(d[0])
        t = d[1]
    return prems, t


def mk_all(hint: str, ty: Type, body: Term) -> Term:
    return App(all_const(ty), Abs(hint, ty, body))


def dest_all(t: Term):
    if (t.__class__ is App and t.fun.__class__ is Const and t.fun.name == "all"
            and t.arg.__class__ is Abs):
        a = t.arg
        return a.hint, a.var_ty, a.body
    return None


def mk_meta_eq(lhs: Term, rhs: Term, ty: Type) -> Term:
    return mk_app(eq_const(ty), lhs, rhs)


def dest_meta_eq(t: Term):
    if (t.__class__ is App and t.fun.__class__ is App
            and t.fun.fun.__class__ is Const and t.fun.fun.name == "=="):
        return t.fun.arg, t.arg
    raise NotADefinition("not a meta-equality: %r" % (t,))


def strip_meta_all_frees(t: Term) -> Term:
    """Strip outer !!-binders, replacing each bound variable by a Free named
    after its hint (used for analysing definition shapes)."""
    used = set(frees_of(t))
    while True:
        d = dest_all(t)
        if d is None:
            return t
        hint, ty, body = d
        name = hint
        k = 1
        while name in used:
            name = "%s%d" % (hint, k)
            k += 1
        used.add(name)
        t = _subst_bound0(body, Free(name, ty))


def _subst_bound0(body: Term, arg: Term) -> Term:
    from .terms import subst_bound
    return subst_bound(body, arg)


def strip_meta_all_vars(t: Term) -> Term:
    """Strip outer !!-binders, replacing bound variables by fresh Unknowns
    ('outermost meta-quantified variables are schematic')."""
    used = set(vars_of(t))
    while True:
        d = dest_all(t)
        if d is None:
            return t
        hint, ty, body = d
        name = hint
        k = 1
        while name in used:
            name = "%s%d" % (hint, k)
            k += 1
        used.add(name)
        t = _subst_bound0(body, Var(name, ty))


# ---------------------------------------------------------------------------
# Subgoal structure

def dest_subgoal(sg: Term):
    """Return (params, hyps, concl): params = [(hint, ty)] outermost first,
    hyps relative to the params binders."""
    params = []
    while True:
        d = dest_all(sg)
        if d is None:
            break
        params.append((d[0], d[1]))
        sg = d[2]
    hyps, concl = strip_implies(sg)
    return params, hyps, concl


def mk_subgoal(params, hyps, concl: Term) -> Term:
    t = mk_implies(hyps, concl)
    for hint, ty in reversed(params):
        t = mk_all(hint, ty, t)
    return t


def prenex_subgoal(sg: Term) -> Term:
    """Pull the subgoal's !!-parameters out in front of its assumptions
    (meta-logically equivalent; this is the display and lifting normal form)."""
    params = []
    hyps = []
    t = sg
    while True:
        d = dest_all(t)
        if d is not None:
            params.append((d[0], d[1]))
            t = d[2]
            continue
        di = dest_implies(t)
        if di is not None:
            hyps.append((len(params), di[0]))
            t = di[1]
            continue
        break
    if not params or not hyps:
        return sg
    k = len(params)
    if all(dep == k for dep, _ in hyps):
        return sg
    lifted = [lift(h, k - dep) for dep, h in hyps]
    return mk_subgoal(params, lifted, t)


# ---------------------------------------------------------------------------
# Theorem

_TOKEN = object()


class Theorem:
    __slots__ = ("theory", "prop", "hyps", "tpairs", "ngoals", "_sgs",
                 "maxidx")

    def __init__(self, theory, prop, hyps=frozenset(), tpairs=(), ngoals=None,
                 _token=None, maxidx=None):
        if _token is not _TOKEN:
            raise KernelError("Theorem values can only be made by kernel operations")
        object.__setattr__(self, "theory", theory)
        object.__setattr__(self, "prop", prop)
        object.__setattr__(self, "hyps", hyps)
        object.__setattr__(self, "tpairs", tuple(tpairs))
        object.__setattr__(self, "ngoals", ngoals)
        object.__setattr__(self, "_sgs", None)
        if maxidx is None:
            names = list(vars_of(prop))
            for a, b in self.tpairs:
                names.extend(vars_of(a))
                names.extend(vars_of(b))
            maxidx = max_name_index(names)
        object.__setattr__(self, "maxidx", maxidx)

    def __setattr__(self, *a):
        raise AttributeError("Theorems are immutable")

    # number of premises when the theorem is read as a rule
    def nprems(self) -> int:
        if self.ngoals is not None:
            return self.ngoals
        return len(strip_implies(self.prop)[0])

    def _split(self):
        cache = self._sgs
        if cache is None:
            cache = strip_implies(self.prop, self.nprems())
            object.__setattr__(self, "_sgs", cache)
        return cache

    def subgoals(self):
        return self._split()[0]

    def concl(self) -> Term:
        return self._split()[1]

    def is_state(self) -> bool:
        return self.ngoals is not None

    def __repr__(self):
        tag = "state[%d]" % self.ngoals if self.ngoals is not None else "thm"
        return "<%s %r>" % (tag, self.prop)


def _mk(theory, prop, hyps=frozenset(), tpairs=(), ngoals=None,
        maxidx=None) -> Theorem:
    return Theorem(theory, prop, hyps, tpairs, ngoals, _token=_TOKEN,
                   maxidx=maxidx)


# ---------------------------------------------------------------------------
# Basic constructors

def axiom(thy: Theory, name: str) -> Theorem:
    """Fetch an axiom; its free variables (and outermost meta-quantifiers)
    become schematic unknowns."""
    t = thy.axiom_term(name)
    if t is None:
        raise UnknownAxiom("unknown axiom %r in theory %s" % (name, thy.name))
    t = strip_meta_all_vars(t)
    fr = frees_of(t)
    if fr:
        used = set(vars_of(t))
        mapping = {}
        for n, ty in fr.items():
            nn = n
            k = 1
            while nn in used:
                nn = "%s%d" % (n, k)
                k += 1
            used.add(nn)
            mapping[n] = Var(nn, ty)
        t = subst_frees(t, mapping)
    return _mk(thy.axiom_owner(name) or thy, normalize(t))


def trivial(thy: Theory, phi: Term) -> Theorem:
    """Initial proof state phi ==> phi."""
    try:
        typecheck(phi, PROP, signature=thy)
    except TypeError_ as e:
        raise IllTyped(str(e))
    phi = normalize(phi)
    return _mk(thy, mk_app(IMPLIES, prenex_subgoal(phi), phi), ngoals=1)


def goal_with_premises(thy: Theory, phi: Term):
    """Split the top-level premises of phi: returns (state for the conclusion,
    premise theorems).  Each premise theorem carries itself as a hypothesis,
    so it can only enter sealed results through finish()'s discharge check."""
    try:
        typecheck(phi, PROP, signature=thy)
    except TypeError_ as e:
        raise IllTyped(str(e))
    phi = normalize(phi)
    prems, concl = strip_implies(phi)
    prem_thms = [_mk(thy, p, hyps=frozenset([p])) for p in prems]
    return trivial(thy, concl), prem_thms


def instantiate(thm: Theorem, inst) -> Theorem:
    """Instantiate unknowns; inst is a {name: term} dict or an Env."""
    if isinstance(inst, Env):
        mapping = dict(inst.assign)
    else:
        mapping = dict(inst)
    declared = vars_of(thm.prop)
    for a, b in thm.tpairs:
        declared.update(vars_of(a))
        declared.update(vars_of(b))
    checked = {}
    for name, t in mapping.items():
        if name not in declared:
            continue
        try:
            typecheck(t, declared[name], signature=thm.theory)
        except TypeError_ as e:
            raise IllTyped("instantiation of ?%s: %s" % (name, e))
        checked[name] = t
    if not checked:
        return thm
    prop = normalize(subst_vars(thm.prop, checked))
    tpairs = tuple((normalize(subst_vars(a, checked)), normalize(subst_vars(b, checked)))
                   for a, b in thm.tpairs)
    tpairs = tuple(p for p in tpairs if p[0] != p[1])
    return _mk(thm.theory, prop, thm.hyps, tpairs, thm.ngoals)


def generalize(thm: Theorem, names=None) -> Theorem:
    """Convert Free variables into schematic Unknowns (all frees by default).
    Only hypothesis-free theorems may be generalized."""
    if thm.hyps:
        raise UndischargedHypotheses("cannot generalize a theorem with hypotheses")
    fr = frees_of(thm.prop)
    if names is not None:
        fr = {n: ty for n, ty in fr.items() if n in names}
    if not fr:
        return thm
    used = set(vars_of(thm.prop))
    mapping = {}
    for n in sorted(fr):
        nn = n
        k = 1
        while nn in used:
            nn = "%s%d" % (n, k)
            k += 1
        used.add(nn)
        mapping[n] = Var(nn, fr[n])
    prop = subst_frees(thm.prop, mapping)
    tpairs = tuple((subst_frees(a, mapping), subst_frees(b, mapping))
                   for a, b in thm.tpairs)
    return _mk(thm.theory, prop, thm.hyps, tpairs, thm.ngoals)


# ---------------------------------------------------------------------------
# Lifting and resolution

def _rule_parts(rule: Theorem):
    """Premises and conclusion of a rule, with outer !! made schematic.
    Proof states used as rules contribute exactly their subgoals."""
    prop = strip_meta_all_vars(rule.prop)
    prems, concl = strip_implies(prop, rule.ngoals)
    return prems, concl


def _rename_rule_vars(prems, concl, state_maxidx, rule_maxidx):
    """Fresh names for the rule's unknowns, avoiding the state's."""
    rule_vars = dict(vars_of(concl))
    for p in prems:
        rule_vars.update(vars_of(p))
    idx = max(state_maxidx, rule_maxidx)
    mapping = {}
    for n in rule_vars:
        idx += 1
        mapping[n] = "%s%d" % (base_name(n), idx)
    return mapping, idx


def _lift_term(t: Term, var_map: dict, rule_vars: dict, params, depth: int = 0) -> Term:
    """Rename unknowns via var_map and apply them to the subgoal parameters
    (lifting).  params is [(hint, ty)] outermost first."""
    k = len(params)
    cls = t.__class__
    if cls is Var:
        new_name = var_map[t.name]
        if k == 0:
            return Var(new_name, t.ty)
        new_ty = t.ty
        for _, pty in reversed(params):
            new_ty = Fun(pty, new_ty)
        args = [Bound(k - 1 - j + depth) for j in range(k)]
        return mk_app(Var(new_name, new_ty), *args)
    if cls is App:
        return App(_lift_term(t.fun, var_map, rule_vars, params, depth),
                   _lift_term(t.arg, var_map, rule_vars, params, depth))
    if cls is Abs:
        return Abs(t.hint, t.var_ty,
                   _lift_term(t.body, var_map, rule_vars, params, depth + 1))
    return t


_VARS_CACHE = {}


def vars_cached(t: Term) -> frozenset:
    out = _VARS_CACHE.get(t)
    if out is None:
        out = frozenset(vars_of(t))
        if len(_VARS_CACHE) > 200000:
            _VARS_CACHE.clear()
        _VARS_CACHE[t] = out
    return out


def _apply_env_state(env: Env, prems, concl, tpairs, extra_flex=(),
                     fresh=()):
    assigned = set(env.assign)
    fresh_set = set(fresh)

    def upd(p):
        if not assigned or not (vars_cached(p) & assigned):
            return p
        return prenex_subgoal(normalize(env.norm(p)))

    new_prems = [prenex_subgoal(normalize(env.norm(p))) if p in fresh_set
                 else upd(p) for p in prems]
    new_concl = upd(concl)
    new_tpairs = []
    for a, b in tpairs:
        a2, b2 = normalize(env.norm(a)), normalize(env.norm(b))
        if a2 != b2:
            new_tpairs.append((a2, b2))
    for a, b in extra_flex:
        a2, b2 = normalize(env.norm(a)), normalize(env.norm(b))
        if a2 != b2:
            new_tpairs.append((a2, b2))
    return new_prems, new_concl, new_tpairs


def resolve(rule: Theorem, i: int, state: Theorem, mode: str = "res",
            unify_depth: int = 20, trace=None, with_env: bool = False,
            eres_hyp=None, lift_rule: bool = True):
    """Resolution-composition: unify the (lifted) conclusion of ``rule`` with
    subgoal i of ``state`` and replace that subgoal by the rule's lifted,
    instantiated premises.

    mode 'res'  : plain resolution
    mode 'eres' : elim-resolution; additionally unify the rule's first premise
                  with one assumption of the subgoal and delete it
    mode 'dres' : destruct-resolution (forward from an assumption)
    """
    if mode == "dres":
        rule = make_elim(rule)
        mode = "eres"
    thy = join_theories(rule.theory, state.theory)
    n = state.nprems()
    if not 1 <= i <= n:
        return
    prems = state.subgoals()
    concl = state.concl()
    sg = prems[i - 1]
    params, hyps, sg_concl = dest_subgoal(sg)

    r_prems, r_concl = _rule_parts(rule)
    if mode == "eres" and not r_prems:
        raise NoMajorPremise("elim-resolution needs a rule with at least one premise")
    var_map, idx = _rename_rule_vars(r_prems, r_concl, state.maxidx,
                                     rule.maxidx)
    rule_vars = {}
    if lift_rule:
        lifted_concl = _lift_term(r_concl, var_map, rule_vars, params)
        lifted_prems = [_lift_term(p, var_map, rule_vars, params) for p in r_prems]
        # unify conclusions in the shared parameter context; the assumption
        # wrappers are identical on both sides by construction
        target = mk_abs(params, lifted_concl)
        sg = mk_abs(params, sg_concl)
        if not could_unify(lifted_concl, sg_concl):
            return
    else:
        # composition of an already-structured theorem (e.g. a finished
        # sub-proof) directly against the whole subgoal
        lifted_concl = _lift_term(r_concl, var_map, rule_vars, [])
        lifted_prems = [_lift_term(p, var_map, rule_vars, []) for p in r_prems]
        target = lifted_concl
        if not could_unify(target, sg):
            return
    env0 = Env(counter=idx)
    hyps_out = state.hyps | rule.hyps
    base_tpairs = tuple(state.tpairs) + tuple(rule.tpairs)

    for env in unify(target, sg, env0, unify_depth, trace):
        if mode == "res":
            if lift_rule:
                new_sgs = [mk_subgoal(params, hyps, p) for p in lifted_prems]
            else:
                new_sgs = list(lifted_prems)
            np, nc, ntp = _apply_env_state(
                env, prems[:i - 1] + new_sgs + prems[i:], concl, base_tpairs,
                env.flexflex, fresh=new_sgs)
            out = _mk(thy, mk_implies(np, nc), hyps_out, ntp,
                      (n - 1 + len(new_sgs)) if state.is_state() else None,
                      maxidx=env.counter)
            yield (out, env) if with_env else out
        else:
            # elim-resolution: consume one matching assumption
            major = prenex_subgoal(normalize(env.norm(lifted_prems[0])))
            maj_params, _maj_hyps, maj_concl = dest_subgoal(major)
            binders = list(params) + maj_params
            for j in range(len(hyps)):
                if eres_hyp is not None and j != eres_hyp:
                    continue
                hyp_j = normalize(env.norm(hyps[j]))
                if not could_unify(maj_concl, hyp_j):
                    continue
                a = mk_abs(binders, maj_concl)
                b = mk_abs(binders, lift(hyp_j, len(maj_params)) if maj_params else hyp_j)
                for env2 in unify(a, b, env, unify_depth, trace):
                    rest_hyps = hyps[:j] + hyps[j + 1:]
                    new_sgs = [mk_subgoal(params, rest_hyps, p)
                               for p in lifted_prems[1:]]
                    np, nc, ntp = _apply_env_state(
                        env2, prems[:i - 1] + new_sgs + prems[i:], concl,
                        base_tpairs, env2.flexflex, fresh=new_sgs)
                    out = _mk(thy, mk_implies(np, nc), hyps_out, ntp,
                              (n - 1 + len(new_sgs)) if state.is_state() else None,
                              maxidx=env2.counter)
                    yield (out, env2) if with_env else out


def assumption(i: int, state: Theorem, unify_depth: int = 20, with_env: bool = False):
    """Close subgoal i by unifying its conclusion with one of its assumptions."""
    n = state.nprems()
    if not 1 <= i <= n:
        return
    prems = state.subgoals()
    concl = state.concl()
    params, hyps, sg_concl = dest_subgoal(prems[i - 1])
    base_tpairs = tuple(state.tpairs)
    for j in range(len(hyps)):
        if not could_unify(hyps[j], sg_concl):
            continue
        a = mk_abs(params, hyps[j])
        b = mk_abs(params, sg_concl)
        for env in unify(a, b, Env(counter=state.maxidx), unify_depth):
            np, nc, ntp = _apply_env_state(
                env, prems[:i - 1] + prems[i:], concl, base_tpairs, env.flexflex)
            out = _mk(state.theory, mk_implies(np, nc), state.hyps, ntp,
                      (n - 1) if state.is_state() else None,
                      maxidx=env.counter)
            yield (out, env) if with_env else out


def make_elim(rule: Theorem) -> Theorem:
    """Turn [|P1;...;Pn|] ==> R into [|P1;...;Pn; R ==> ?Q|] ==> ?Q, for
    destruct-resolution (forward reasoning from an assumption)."""
    prems, concl = _rule_parts(rule)
    if not prems:
        raise NoMajorPremise("make_elim needs a rule with at least one premise")
    used = set(vars_of(rule.prop))
    qn = "Q"
    k = 0
    while qn in used:
        k += 1
        qn = "Q%d" % k
    q = Var(qn, PROP)
    prop = mk_implies(list(prems) + [mk_app(IMPLIES, concl, q)], q)
    return _mk(rule.theory, prop, rule.hyps, rule.tpairs)


# ---------------------------------------------------------------------------
# Definition unfolding

def _def_parts(d: Theorem):
    body = strip_meta_all_vars(d.prop)
    lhs, rhs = dest_meta_eq(body)
    if not set(vars_of(rhs)) <= set(vars_of(lhs)):
        raise NotADefinition("rhs unknowns not covered by lhs")
    return lhs, rhs


def rewrite_term(t: Term, pairs, ctx=(), fuel=20000) -> Term:
    """Exhaustively rewrite with (lhs, rhs) meta-equation instances,
    leftmost-innermost, matching under local binders."""
    budget = [fuel]

    def go(t, ctx):
        cls = t.__class__
        if cls is App:
            t2 = App(go(t.fun, ctx), go(t.arg, ctx))
        elif cls is Abs:
            t2 = Abs(t.hint, t.var_ty, go(t.body, (t.var_ty,) + ctx))
        else:
            t2 = t
        changed = True
        while changed and budget[0] > 0:
            changed = False
            for lhs, rhs in pairs:
                m = _match_open(lhs, t2, ctx)
                if m is not None:
                    t2n = normalize(m.norm(rhs))
                    t2n = _unfreeze_bounds(t2n)
                    if t2n != t2:
                        budget[0] -= 1
                        t2 = go(t2n, ctx)
                        changed = True
                        break
                    t2 = t2n
        return t2

    return go(t, tuple(ctx))


_BOUND_MARK = "\x00b"


def _freeze_bounds(t: Term, ctx, depth: int = 0) -> Term:
    cls = t.__class__
    if cls is Bound:
        if t.index >= depth:
            outer = t.index - depth
            return Free("%s%d" % (_BOUND_MARK, outer), ctx[outer])
        return t
    if cls is App:
        return App(_freeze_bounds(t.fun, ctx, depth), _freeze_bounds(t.arg, ctx, depth))
    if cls is Abs:
        return Abs(t.hint, t.var_ty, _freeze_bounds(t.body, ctx, depth + 1))
    return t


def _unfreeze_bounds(t: Term, depth: int = 0) -> Term:
    cls = t.__class__
    if cls is Free and t.name.startswith(_BOUND_MARK):
        return Bound(int(t.name[len(_BOUND_MARK):]) + depth)
    if cls is App:
        return App(_unfreeze_bounds(t.fun, depth), _unfreeze_bounds(t.arg, depth))
    if cls is Abs:
        return Abs(t.hint, t.var_ty, _unfreeze_bounds(t.body, depth + 1))
    return t


def _match_open(pattern: Term, obj: Term, ctx):
    """Match a closed pattern against a term that may have loose bounds from
    enclosing binders (temporarily frozen as reserved Frees)."""
    if not could_unify(pattern, obj):
        return None
    frozen = _freeze_bounds(obj, ctx) if ctx else obj
    try:
        return match(pattern, frozen)
    except NoMatch:
        return None


def unfold(thm: Theorem, defs) -> Theorem:
    """Expand definition instances (lhs -> rhs) throughout the proposition."""
    pairs = [_def_parts(d) for d in defs]
    if not pairs:
        return thm
    prop = normalize(rewrite_term(thm.prop, pairs))
    hyps = thm.hyps
    for d in defs:
        hyps = hyps | d.hyps
    return _mk(thm.theory, prop, hyps, thm.tpairs, thm.ngoals)


def fold_defs(thm: Theorem, defs) -> Theorem:
    """Contract definition instances (rhs -> lhs) throughout the proposition."""
    pairs = []
    for d in defs:
        lhs, rhs = _def_parts(d)
        pairs.append((rhs, lhs))
    prop = normalize(rewrite_term(thm.prop, pairs))
    hyps = thm.hyps
    for d in defs:
        hyps = hyps | d.hyps
    return _mk(thm.theory, prop, hyps, thm.tpairs, thm.ngoals)


def unfold_goals(state: Theorem, defs) -> Theorem:
    """Expand definitions in the subgoals only, keeping the main goal."""
    pairs = [_def_parts(d) for d in defs]
    if not pairs:
        return state
    prems = state.subgoals()
    concl = state.concl()
    new_prems = [prenex_subgoal(normalize(rewrite_term(p, pairs))) for p in prems]
    hyps = state.hyps
    for d in defs:
        hyps = hyps | d.hyps
    return _mk(state.theory, mk_implies(new_prems, concl), hyps,
               state.tpairs, state.ngoals)


# ---------------------------------------------------------------------------
# Sealing a finished proof

def solve_flexflex(state: Theorem) -> Theorem:
    """Assign each postponed flex-flex pair trivially: both unknowns become
    constant functions onto a shared fresh unknown."""
    if not state.tpairs:
        return state
    prop = state.prop
    counter = max_name_index(list(vars_of(prop)))
    tpairs = list(state.tpairs)
    while tpairs:
        a, b = tpairs.pop(0)
        if a == b:
            continue
        binds = {}
        counter += 1
        for side in (a, b):
            t = side
            while t.__class__ is Abs:
                t = t.body
            head, args = strip_app(t)
            if head.__class__ is not Var:
                raise KernelError("non flex-flex pair left at qed time")
            arg_tys, res_ty = strip_fun_type(head.ty)
            fresh = Var("F%d" % counter, res_ty)
            binding = fresh
            for ty in reversed(arg_tys):
                binding = Abs("u", ty, binding)
            binds[head.name] = binding
        prop = normalize(subst_vars(prop, binds))
        tpairs = [(normalize(subst_vars(x, binds)), normalize(subst_vars(y, binds)))
                  for x, y in tpairs]
        tpairs = [p for p in tpairs if p[0] != p[1]]
    return _mk(state.theory, prop, state.hyps, (), state.ngoals)


def finish(state: Theorem, premises=()) -> Theorem:
    """Seal a finished proof: no subgoals may remain; postponed flex-flex
    pairs are solved trivially; stated premises are discharged, which must
    cover all hypotheses used."""
    if state.nprems() != 0:
        raise ResultWithSubgoals("%d subgoal(s) remain" % state.nprems())
    state = solve_flexflex(state)
    concl = state.prop
    undischarged = set(state.hyps) - set(premises)
    if undischarged:
        raise UndischargedHypotheses(
            "result uses hypotheses not among the stated premises")
    prop = mk_implies(list(premises), concl)
    return _mk(state.theory, normalize(prop))


# ---------------------------------------------------------------------------
# Forward combination helpers (rule RS rule)

def compose(rule: Theorem, i: int, target: Theorem) -> Iterator[Theorem]:
    """Resolve ``rule`` against premise i of ``target`` (both plain theorems)."""
    yield from resolve(rule, i, target)


def rs(a: Theorem, b: Theorem) -> Theorem:
    """a RS b: unique composition of a with the first premise of b."""
    out = []
    for t in compose(a, 1, b):
        out.append(t)
        if len(out) > 1:
            raise KernelError("RS: more than one resolvent")
    if not out:
        raise KernelError("RS: no resolvents")
    return out[0]
