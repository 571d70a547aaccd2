"""Generic rewriting: simpsets of (conditional) rewrite rules, contextual use
of assumptions, congruence traversal, and a solver callback for conditions.

Simplification is proof-producing: every rewrite is performed by resolving
kernel theorems (iff-transitivity, congruence rules, explicitly instantiated
substitution contexts), so the output state is a kernel theorem like any
other.  The engine never trusts its own term-level planning: planning only
chooses which kernel steps to attempt.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from . import kernel as K
from .terms import (
    Abs, App, Bound, Const, Free, Fun, ITYPE, OTYPE, Term, Var,
    abstract_over_free, frees_of, subst_bounds, term_size, vars_of,
)
from .unify import match_opt
from .tactics import Tactic, assume_tac


class SimpError(Exception):
    pass


class SimpRule:
    """A compiled rewrite rule: conds ==> lhs ~ rhs.

    kind 'iff' rewrites formulae, 'eq' rewrites terms, 'true'/'false' rewrite
    a whole atom to True/False (from non-equational theorems)."""

    __slots__ = ("thm", "conds", "lhs", "rhs", "kind", "name")

    def __init__(self, thm, conds, lhs, rhs, kind, name=""):
        self.thm = thm
        self.conds = conds
        self.lhs = lhs
        self.rhs = rhs
        self.kind = kind
        self.name = name

    def __repr__(self):
        return "<simp %s %s>" % (self.kind, self.name or self.lhs)


def _dest_tp(t: Term):
    if t.__class__ is App and t.fun.__class__ is Const and \
            t.fun.name == "Trueprop":
        return t.arg
    return None


def _dest2(t: Term, name: str):
    if (t.__class__ is App and t.fun.__class__ is App
            and t.fun.fun.__class__ is Const and t.fun.fun.name == name):
        return t.fun.arg, t.arg
    return None


def _dest1(t: Term, name: str):
    if t.__class__ is App and t.fun.__class__ is Const and t.fun.name == name:
        return t.arg
    return None


def compile_rule(thm: K.Theorem, name="") -> Optional[SimpRule]:
    prop = K.strip_meta_all_vars(thm.prop)
    prems, concl = K.strip_implies(prop)
    body = _dest_tp(concl)
    if body is None:
        return None
    d = _dest2(body, "iff")
    if d is not None:
        return SimpRule(thm, prems, d[0], d[1], "iff", name)
    d = _dest2(body, "eq")
    if d is not None:
        return SimpRule(thm, prems, d[0], d[1], "eq", name)
    d = _dest1(body, "Not")
    if d is not None:
        return SimpRule(thm, prems, d, None, "false", name)
    return SimpRule(thm, prems, body, None, "true", name)


class Simpset:
    """Rewrite rules + congruence rules + solver + the wiring kit of support
    theorems used to justify each rewrite as a kernel inference."""

    def __init__(self, kit: Dict[str, K.Theorem], rules=(), congs=None,
                 solver=None, name="ss", cond_depth=10, step_limit=1000):
        self.kit = kit
        self.rules: Tuple[SimpRule, ...] = tuple(rules)
        self.congs: Dict[str, K.Theorem] = dict(congs or {})
        self.solver = solver          # function: subgoal index -> Tactic
        self.name = name
        self.cond_depth = cond_depth
        self.step_limit = step_limit

    def _copy(self, **kw):
        base = dict(kit=self.kit, rules=self.rules, congs=self.congs,
                    solver=self.solver, name=self.name,
                    cond_depth=self.cond_depth, step_limit=self.step_limit)
        base.update(kw)
        return Simpset(**base)

    def add_simps(self, thms):
        new = list(self.rules)
        for t in thms:
            r = compile_rule(t)
            if r is None:
                raise SimpError("cannot use theorem as a rewrite rule")
            new.append(r)
        return self._copy(rules=tuple(new))

    def del_simps(self, thms):
        props = {t.prop for t in thms}
        return self._copy(rules=tuple(r for r in self.rules
                                      if r.thm.prop not in props))

    def add_congs(self, thms):
        congs = dict(self.congs)
        for t in thms:
            key = _cong_key(t)
            if key is None:
                raise SimpError("cannot determine congruence head")
            congs[key] = t
        return self._copy(congs=congs)

    def set_solver(self, solver):
        return self._copy(solver=solver)

    def __repr__(self):
        return "<Simpset %s: %d rules, %d congs>" % (
            self.name, len(self.rules), len(self.congs))


def _cong_key(thm: K.Theorem) -> Optional[str]:
    prop = K.strip_meta_all_vars(thm.prop)
    _, concl = K.strip_implies(prop)
    body = _dest_tp(concl)
    if body is None:
        return None
    for rel in ("iff", "eq"):
        d = _dest2(body, rel)
        if d is not None:
            head = d[0]
            while head.__class__ is App:
                head = head.fun
            if head.__class__ is Const:
                return head.name
    return None


# ---------------------------------------------------------------------------
# Freezing subgoal parameters as reserved frees (engine-side planning and
# explicit instantiation both need closed terms)

_PFX = "z@"


def _freeze(t: Term, params) -> Term:
    k = len(params)
    if k == 0:
        return t
    frees = [Free("%s%d" % (_PFX, i), ty) for i, (_, ty) in enumerate(params)]
    return subst_bounds(t, list(reversed(frees)))


def _is_frozen_free(t: Term) -> bool:
    return t.__class__ is Free and t.name.startswith(_PFX)


# ---------------------------------------------------------------------------
# Assumption-derived rewrite rules

def asm_rules(hyps_frozen: List[Term]) -> List[SimpRule]:
    out = []
    for h in hyps_frozen:
        body = _dest_tp(h)
        if body is None:
            continue
        conds = []
        # strip bounded-universal prefixes into conditions
        t = body
        depth = 0
        binders = []
        while True:
            d = _dest_ball(t)
            if d is None or depth >= 3:
                break
            dom, abs_t = d
            if abs_t.__class__ is not Abs:
                break
            binders.append((abs_t.hint, dom))
            t = abs_t.body
            depth += 1
        if binders:
            # replace the bound variables by schematic unknowns
            vs = [Var("as%d" % i, ITYPE) for i in range(len(binders))]
            t2 = subst_bounds(t, list(reversed(vs)))
            conds = [_mk_tp(_mk_mem(v, _shift_dom(dom, vs, i)))
                     for i, (v, (_, dom)) in enumerate(zip(vs, binders))]
            eq = _dest2(t2, "eq")
            if eq is not None and not _subterm(eq[0], eq[1]) and eq[0] != eq[1]:
                out.append(SimpRule(None, conds, eq[0], eq[1], "eq",
                                    "asm-ball"))
            continue
        eq = _dest2(body, "eq")
        if eq is not None:
            if eq[0] != eq[1] and not _subterm(eq[0], eq[1]):
                out.append(SimpRule(None, [], eq[0], eq[1], "eq", "asm"))
            continue
        iff = _dest2(body, "iff")
        if iff is not None:
            if iff[0] != iff[1] and not _subterm(iff[0], iff[1]):
                out.append(SimpRule(None, [], iff[0], iff[1], "iff", "asm"))
            continue
        neg = _dest1(body, "Not")
        if neg is not None:
            out.append(SimpRule(None, [], neg, None, "false", "asm"))
            continue
        out.append(SimpRule(None, [], body, None, "true", "asm"))
    return out


def _dest_ball(t: Term):
    if (t.__class__ is App and t.fun.__class__ is App
            and t.fun.fun.__class__ is Const and t.fun.fun.name == "Ball"):
        return t.fun.arg, t.arg
    return None


def _shift_dom(dom: Term, vs, i: int) -> Term:
    # domains of later binders may mention earlier bound variables
    return subst_bounds(dom, list(reversed(vs[:i]))) if i else dom


def _mk_tp(t: Term) -> Term:
    return App(Const("Trueprop", Fun(OTYPE, K.PROP)), t)


def _mk_mem(a: Term, b: Term) -> Term:
    c = Const("mem", Fun(ITYPE, Fun(ITYPE, OTYPE)))
    return App(App(c, a), b)


def _subterm(sub: Term, t: Term) -> bool:
    if sub == t:
        return True
    cls = t.__class__
    if cls is App:
        return _subterm(sub, t.fun) or _subterm(sub, t.arg)
    if cls is Abs:
        from .terms import lift
        return _subterm(lift(sub, 1), t.body)
    return False


# ---------------------------------------------------------------------------
# The engine

class _Engine:
    def __init__(self, ss: Simpset, use_asms: bool, base_hyps: int):
        self.ss = ss
        self.use_asms = use_asms
        self.base_hyps = base_hyps    # context hyps beyond this index are
                                      # usable as rewrites even in plain mode
        self.steps = 0

    # -- helpers -------------------------------------------------------------

    def kit(self, name):
        thm = self.ss.kit.get(name)
        if thm is None:
            raise SimpError("simplifier kit lacks %r" % name)
        return thm

    def sg_parts(self, state, i):
        sg = state.subgoals()[i - 1]
        return K.dest_subgoal(sg)

    def current_rules(self, state, i) -> List[SimpRule]:
        params, hyps, _ = self.sg_parts(state, i)
        start = 0 if self.use_asms else self.base_hyps
        hf = [_freeze(h, params) for h in hyps[start:]]
        return asm_rules(hf) + list(self.ss.rules)

    def first_resolve(self, rule, i, state, mode="res"):
        for s in K.resolve(rule, i, state, mode=mode):
            return s
        return None

    def resolve_frozen(self, rule_inst, i, state, zs):
        """Resolve an explicitly built rule instance whose frozen parameter
        frees are re-generalized so lifting rebinds them to the params."""
        gen = K.generalize(rule_inst, zs) if zs else rule_inst
        return self.first_resolve(gen, i, state)

    # -- formula rewriting ----------------------------------------------------

    def rewrite_iff_position(self, state, i, depth) -> Optional[K.Theorem]:
        """Subgoal i: hyps ==> (phi <-> ?X).  Fully rewrite phi, instantiate
        ?X, and discharge the subgoal.  Returns the new state."""
        seen = set()
        for _ in range(self.ss.step_limit):
            params, hyps, concl = self.sg_parts(state, i)
            body = _dest_tp(concl)
            d = _dest2(body, "iff") if body is not None else None
            if d is None:
                return None
            phi_f = _freeze(d[0], params)
            if phi_f in seen:
                break
            # 1. whole-formula rules
            s2 = self.try_formula_rules(state, i, phi_f, params, depth)
            if s2 is not None:
                state = s2
                seen.add(phi_f)
                continue
            # 2. term redexes inside an atomic formula
            s2 = self.try_atom_term_rewrite(state, i, phi_f, params, depth)
            if s2 is not None:
                state = s2
                seen.add(phi_f)
                continue
            # 3. congruence descent into a compound formula
            s2 = self.try_cong(state, i, phi_f, params, depth)
            if s2 is not None:
                state = s2
                seen.add(phi_f)
                continue
            break
        # close with reflexivity
        return self.first_resolve(self.kit("iff_refl"), i, state)

    def try_formula_rules(self, state, i, phi, params, depth):
        for rule in self.current_rules(state, i):
            if rule.kind == "eq":
                continue
            m = match_opt(rule.lhs, phi)
            if m is None:
                continue
            s2 = self.apply_formula_rule(state, i, rule, m, phi, params, depth)
            if s2 is not None:
                self.steps += 1
                return s2
        return None

    def apply_formula_rule(self, state, i, rule, m, phi, params, depth):
        saved = state
        s = self.first_resolve(self.kit("iff_trans"), i, state)
        if s is None:
            return None
        # leg 1 at position i: phi <-> ?Y
        if rule.kind == "iff":
            if rule.thm is not None:
                s = self.first_resolve(rule.thm, i, s)
            else:
                # assumption P <-> Q: close the leg by assumption
                s = self.first_assume(i, s)
            if s is None:
                return None
            s = self.discharge_conditions(s, i, len(rule.conds), depth)
            if s is None:
                return None
        elif rule.kind in ("true", "false"):
            intro = self.kit("iff_true_intr" if rule.kind == "true"
                             else "iff_false_intr")
            s = self.first_resolve(intro, i, s)
            if s is None:
                return None
            # remaining subgoal at i: the atom itself (or its negation)
            s2 = self.justify_fact(s, i, rule, m, params, depth)
            if s2 is None:
                return None
            s = s2
        else:
            return None
        return s

    def first_assume(self, i, state):
        for s in assume_tac(i)(state):
            return s
        return None

    def justify_fact(self, state, i, rule, m, params, depth):
        """Prove subgoal i, an instance of a non-equational rule's conclusion
        (or of an assumption)."""
        if rule.thm is None:
            if rule.conds:
                s = self.close_via_bspec(state, i, rule, params, depth)
                return s
            return self.first_assume(i, state)
        s = self.first_resolve(rule.thm, i, state)
        if s is None:
            return None
        return self.discharge_conditions(s, i, len(rule.conds), depth)

    def close_via_bspec(self, state, i, rule, params, depth):
        """Close an instance of a Ball-quantified assumption: resolve the
        matching bspec theorem, close the quantified premise by assumption,
        and discharge the membership conditions."""
        k = len(rule.conds)
        bspec = self.ss.kit.get("bspec%d" % k)
        if bspec is None:
            return None
        s = self.first_resolve(bspec, i, state)
        if s is None:
            return None
        s = self.first_assume(i, s)     # the Ball assumption itself
        if s is None:
            return None
        return self.discharge_conditions(s, i, k, depth)

    def discharge_conditions(self, state, i, k, depth):
        if depth > self.ss.cond_depth:
            return None if k else state
        s = state
        for _ in range(k):
            s2 = self.prove_condition(s, i, depth + 1)
            if s2 is None:
                return None
            s = s2
        return s

    def prove_condition(self, state, i, depth):
        # assumption (may instantiate unknowns, e.g. typing conditions)
        s = self.first_assume(i, state)
        if s is not None:
            return s
        # recursive simplification to True
        s = self.first_resolve(self.kit("iffD2"), i, state)
        if s is not None:
            s2 = self.rewrite_iff_position(s, i, depth)
            if s2 is not None:
                params, hyps, concl = self.sg_parts(s2, i)
                body = _dest_tp(concl)
                if body is not None and body.__class__ is Const and \
                        body.name == "True":
                    s3 = self.first_resolve(self.kit("TrueI"), i, s2)
                    if s3 is not None:
                        return s3
                s3 = self.run_solver(s2, i)
                if s3 is not None:
                    return s3
        # solver on the original condition
        return self.run_solver(state, i)

    def run_solver(self, state, i):
        if self.ss.solver is None:
            return None
        tac = self.ss.solver(i)
        for s in tac(state):
            return s
        return None

    # -- congruences -----------------------------------------------------

    def try_cong(self, state, i, phi, params, depth):
        head = phi
        while head.__class__ is App:
            head = head.fun
        if head.__class__ is not Const:
            return None
        cong = self.ss.congs.get(head.name)
        if cong is None:
            return None
        if not self.can_rewrite_inside(state, i, phi):
            return None
        saved = state
        s = self.first_resolve(self.kit("iff_trans"), i, state)
        if s is None:
            return None
        s = self.first_resolve(cong, i, s)
        if s is None:
            return None
        legs = cong.nprems()
        for _ in range(legs):
            s2 = self.prove_leg(s, i, depth)
            if s2 is None:
                return None
            s = s2
        # detect no-change: compare with the original formula
        params2, _, concl2 = self.sg_parts(s, i)
        body2 = _dest_tp(concl2)
        d2 = _dest2(body2, "iff") if body2 is not None else None
        if d2 is not None and _freeze(d2[0], params2) == phi:
            return None   # nothing changed below; avoid a useless loop
        return s

    def prove_leg(self, state, i, depth):
        """Discharge one congruence premise: an iff- or eq-goal with a
        flexible right-hand side, possibly under extra binders/assumptions."""
        params, hyps, concl = self.sg_parts(state, i)
        body = _dest_tp(concl)
        if body is None:
            return None
        if _dest2(body, "iff") is not None:
            return self.rewrite_iff_position(state, i, depth)
        if _dest2(body, "eq") is not None:
            return self.rewrite_term_position(state, i, depth)
        return None

    def can_rewrite_inside(self, state, i, phi) -> bool:
        rules = self.current_rules(state, i)

        def scan_formula(f) -> bool:
            head = f
            while head.__class__ is App:
                head = head.fun
            for r in rules:
                if r.kind != "eq" and match_opt(r.lhs, f) is not None:
                    return True
            if head.__class__ is Const and head.name in self.ss.congs:
                args = []
                t = f
                while t.__class__ is App:
                    args.append(t.arg)
                    t = t.fun
                for a in args:
                    if a.__class__ is Abs:
                        if scan_formula_open(a.body):
                            return True
                    elif _type_is_o(a):
                        if scan_formula(a):
                            return True
                    else:
                        if scan_term(a):
                            return True
                return False
            return scan_term_args(f)

        def scan_formula_open(f) -> bool:
            # under a binder: conservative—any rule lhs matching any subterm
            return scan_term(f) or any(
                r.kind != "eq" and _could(r.lhs, f) for r in rules)

        def scan_term_args(f) -> bool:
            t = f
            while t.__class__ is App:
                if scan_term(t.arg):
                    return True
                t = t.fun
            return False

        def scan_term(t) -> bool:
            if t.__class__ is Abs:
                return False
            for r in rules:
                if r.kind == "eq" and match_opt(r.lhs, t) is not None:
                    return True
            if t.__class__ is App:
                return scan_term(t.fun) or scan_term(t.arg)
            return False

        return scan_formula(phi)

    # -- atomic formulae: rewrite term positions -----------------------------

    def try_atom_term_rewrite(self, state, i, phi, params, depth):
        """phi is treated as an atom; rewrite the first term redex in its
        arguments via an explicit substitution context."""
        head = phi
        while head.__class__ is App:
            head = head.fun
        if head.__class__ is Const and head.name in self.ss.congs:
            return None
        found = self.find_term_redex(state, i, phi)
        if found is None:
            return None
        u, rule, m = found
        rhs_inst = _norm_env(m, rule.rhs)
        if rhs_inst == u:
            return None
        zs = _frozen_frees(phi) | _frozen_frees(u)
        # phi <-> ?X  becomes  phi <-> ?Y (leg) and ?Y <-> ?X
        s = self.first_resolve(self.kit("iff_trans"), i, state)
        if s is None:
            return None
        # leg: phi <-> phi[rhs/u]  via  subst_iff: a = b ==> (P(a) <-> P(b))
        ctxt_var = Free("%s%s" % (_PFX, "hole"), ITYPE)
        phi_ctx = _replace(phi, u, ctxt_var)
        ctxt = Abs("y", ITYPE, abstract_over_free(phi_ctx, ctxt_var.name))
        si = self.kit("subst_iff")
        names = _rule_var_names(si, ("a", "b", "P"))
        inst = K.instantiate(si, {names[0]: u, names[1]: rhs_inst,
                                  names[2]: ctxt})
        s = self.resolve_frozen(inst, i, s, sorted(zs))
        if s is None:
            return None
        # new subgoal at i: u = rhs_inst; justify by the rewrite rule
        s = self.justify_eq(s, i, rule, depth)
        if s is None:
            return None
        self.steps += 1
        return s

    def find_term_redex(self, state, i, phi):
        rules = [r for r in self.current_rules(state, i) if r.kind == "eq"]
        if not rules:
            return None
        best = None

        def visit(t):
            nonlocal best
            if best is not None or t.__class__ is Abs:
                return
            if t.__class__ is App:
                visit(t.fun)
                visit(t.arg)
                if best is not None:
                    return
            if not _type_is_i(t):
                return
            for r in rules:
                m = match_opt(r.lhs, t)
                if m is not None:
                    best = (t, r, m)
                    return

        # innermost-leftmost: visit arguments first
        args = []
        t = phi
        while t.__class__ is App:
            args.append(t.arg)
            t = t.fun
        for a in reversed(args):
            visit(a)
            if best is not None:
                break
        return best

    def justify_eq(self, state, i, rule, depth):
        """Prove subgoal i of the form  u = r  (instances already fixed)."""
        if rule.thm is None:
            if rule.conds:
                return self.close_via_bspec(state, i, rule,
                                            self.sg_parts(state, i)[0], depth)
            return self.first_assume(i, state)
        s = self.first_resolve(rule.thm, i, state)
        if s is None:
            # orientation: the stored rule may need symmetry
            sym = self.ss.kit.get("sym")
            if sym is None:
                return None
            s = self.first_resolve(sym, i, state)
            if s is None:
                return None
            s = self.first_resolve(rule.thm, i, s)
            if s is None:
                return None
        return self.discharge_conditions(s, i, len(rule.conds), depth)

    # -- term positions -------------------------------------------------------

    def rewrite_term_position(self, state, i, depth) -> Optional[K.Theorem]:
        """Subgoal i: hyps ==> (s = ?x): rewrite s, instantiate ?x."""
        for _ in range(self.ss.step_limit):
            params, hyps, concl = self.sg_parts(state, i)
            body = _dest_tp(concl)
            d = _dest2(body, "eq") if body is not None else None
            if d is None:
                return None
            s_f = _freeze(d[0], params)
            found = None
            rules = [r for r in self.current_rules(state, i)
                     if r.kind == "eq"]

            def visit(t):
                nonlocal found
                if found is not None or t.__class__ is Abs:
                    return
                if t.__class__ is App:
                    visit(t.fun)
                    visit(t.arg)
                    if found is not None:
                        return
                if not _type_is_i(t):
                    return
                for r in rules:
                    m = match_opt(r.lhs, t)
                    if m is not None:
                        found = (t, r, m)
                        return

            visit(s_f)
            if found is None:
                break
            u, rule, m = found
            rhs_inst = _norm_env(m, rule.rhs)
            if rhs_inst == u:
                break
            s2 = self.first_resolve(self.kit("trans"), i, state)
            if s2 is None:
                break
            ctxt_var = Free("%s%s" % (_PFX, "hole"), ITYPE)
            ctx_body = _replace(s_f, u, ctxt_var)
            ctxt = Abs("y", ITYPE, abstract_over_free(ctx_body, ctxt_var.name))
            tc = self.kit("term_cong")
            names = _rule_var_names(tc, ("a", "b", "f"))
            inst = K.instantiate(tc, {names[0]: u, names[1]: rhs_inst,
                                      names[2]: ctxt})
            zs = _frozen_frees(s_f) | _frozen_frees(u)
            s2 = self.resolve_frozen(inst, i, s2, sorted(zs))
            if s2 is None:
                break
            s2 = self.justify_eq(s2, i, rule, depth)
            if s2 is None:
                break
            state = s2
            self.steps += 1
        return self.first_resolve(self.kit("refl"), i, state)


def _could(lhs, t) -> bool:
    from .unify import could_unify
    return could_unify(lhs, t)


def _type_is_i(t: Term) -> bool:
    try:
        from .terms import type_of
        return type_of(t) == ITYPE
    except Exception:
        return False


def _type_is_o(t: Term) -> bool:
    try:
        from .terms import type_of
        return type_of(t) == OTYPE
    except Exception:
        return False


def _norm_env(env, t):
    from .terms import normalize
    return normalize(env.norm(t))


def _replace(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    cls = t.__class__
    if cls is App:
        return App(_replace(t.fun, old, new), _replace(t.arg, old, new))
    return t


def _frozen_frees(t: Term) -> set:
    return {n for n in frees_of(t) if n.startswith(_PFX)}


def _rule_var_names(thm: K.Theorem, preferred):
    """Variable names of a kit rule, in (term1, term2, context) order."""
    vs = vars_of(K.strip_meta_all_vars(thm.prop))
    names = list(preferred)
    if all(n in vs for n in names):
        return names
    ordered = sorted(vs)
    funs = [n for n in ordered if isinstance(vs[n], Fun)]
    bases = [n for n in ordered if not isinstance(vs[n], Fun)]
    return bases[0], bases[1], funs[0]


# ---------------------------------------------------------------------------
# Entry points

def _simp(ss: Simpset, i: int, use_asms: bool) -> Tactic:
    def tac(state):
        n = state.nprems()
        if not 1 <= i <= n:
            return
        params, hyps, concl = K.dest_subgoal(state.subgoals()[i - 1])
        body = _dest_tp(concl)
        if body is None:
            yield state
            return
        eng = _Engine(ss, use_asms, len(hyps))
        phi = _freeze(body, params)
        # fast path: nothing to do
        probe = eng.current_rules(state, i)
        if not probe:
            yield state
            return
        if not eng.can_rewrite_inside(state, i, phi) and \
                not eng.try_probe_top(state, i, phi):
            yield state
            return
        s = eng.first_resolve(eng.kit("iffD2"), i, state)
        if s is None:
            yield state
            return
        s2 = eng.rewrite_iff_position(s, i, 0)
        if s2 is None or eng.steps == 0:
            yield state
            return
        # the rewritten subgoal is now at position i; close it if trivial
        params2, hyps2, concl2 = K.dest_subgoal(s2.subgoals()[i - 1])
        body2 = _dest_tp(concl2)
        if body2 is not None and body2.__class__ is Const and \
                body2.name == "True":
            s3 = eng.first_resolve(eng.kit("TrueI"), i, s2)
            if s3 is not None:
                yield s3
                return
        yield s2
    return tac


def _probe_top(self, state, i, phi):
    for r in self.current_rules(state, i):
        if r.kind != "eq" and match_opt(r.lhs, phi) is not None:
            return True
    return False


_Engine.try_probe_top = _probe_top


def simp_tac(ss: Simpset, i: int) -> Tactic:
    """Rewrite subgoal i with the simpset (plus contextual information from
    the formula itself); close it when it rewrites to truth."""
    return _simp(ss, i, use_asms=False)


def asm_simp_tac(ss: Simpset, i: int) -> Tactic:
    """Like simp_tac, additionally using the subgoal's assumptions as
    rewrite rules."""
    return _simp(ss, i, use_asms=True)


# ---------------------------------------------------------------------------
# contextual_rewrite: the planner-level preview of 'x = t --> psi[x]'
# handling, exposed for testing.

def contextual_rewrite(ss: Simpset, formula: Term) -> Term:
    """Pure term-level preview: inside 'a = t --> psi', occurrences of a in
    psi are replaced by t (chained left to right)."""
    d = _dest2(formula, "imp")
    if d is None:
        return formula
    lhs, rhs = d
    rhs2 = contextual_rewrite(ss, rhs)
    eq = _dest2(lhs, "eq")
    if eq is not None and eq[0] != eq[1] and not _subterm(eq[0], eq[1]):
        rhs2 = _replace_all(rhs2, eq[0], eq[1])
        rhs2 = contextual_rewrite(ss, rhs2)
    from .terms import mk_app
    c = Const("imp", Fun(OTYPE, Fun(OTYPE, OTYPE)))
    return App(App(c, lhs), rhs2)


def _replace_all(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    cls = t.__class__
    if cls is App:
        return App(_replace_all(t.fun, old, new), _replace_all(t.arg, old, new))
    if cls is Abs:
        from .terms import lift
        return Abs(t.hint, t.var_ty,
                   _replace_all(t.body, lift(old, 1), lift(new, 1)))
    return t
