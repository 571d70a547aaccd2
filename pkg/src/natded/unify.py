"""Higher-order unification.

Produces a lazy stream of environments.  Pairs inside the pattern fragment
(every unknown applied to distinct bound variables) are solved
deterministically, with pruning; anything beyond that falls into a
depth-bounded imitation/projection search in the style of Huet's procedure.
Flex-flex pairs are postponed and attached to the returned environment.

``match`` is the one-sided deterministic variant used by rewriting.
"""

from __future__ import annotations

from typing import Iterator, Optional

from .terms import (
    Abs, App, Base, Bound, Const, Env, Free, Fun, Term, Var,
    beta_normalize, lift, mk_app, strip_app, strip_fun_type, type_of,
)


class NoMatch(Exception):
    """Raised by match() when the pattern does not match."""


class UnifyTrace:
    """Optional trace hook: collects one entry per disagreement-pair decision
    and records whether the search was truncated by the depth bound."""

    __slots__ = ("events", "truncated", "callback")

    def __init__(self, callback=None):
        self.events = []
        self.truncated = False
        self.callback = callback

    def record(self, kind: str, detail: str):
        self.events.append((kind, detail))
        if self.callback is not None:
            self.callback(kind, detail)


def head_key(t: Term) -> Optional[str]:
    """Rigid head name of a term, or None when flexible (unknown-headed).

    Used as a cheap pre-filter before attempting unification."""
    while True:
        cls = t.__class__
        if cls is Abs:
            t = t.body
        elif cls is App:
            t = t.fun
        elif cls is Const or cls is Free:
            return t.name
        elif cls is Bound:
            return "%bound"
        else:
            return None


def could_unify(t: Term, u: Term) -> bool:
    a, b = head_key(t), head_key(u)
    return a is None or b is None or a == b


# ---------------------------------------------------------------------------

def _eta_expand_to(t: Term, n_extra: int, tys) -> Term:
    """Wrap t in n_extra abstractions of the given domain types and apply it
    to the new bound variables."""
    t = lift(t, n_extra)
    t = mk_app(t, *[Bound(n_extra - 1 - i) for i in range(n_extra)])
    for ty in reversed(tys):
        t = Abs("x", ty, t)
    return beta_normalize(t)


def _pattern_args(args) -> Optional[list]:
    """If args are distinct bound variables, return their indices else None."""
    idxs = []
    seen = set()
    for a in args:
        if a.__class__ is not Bound:
            return None
        if a.index in seen:
            return None
        seen.add(a.index)
        idxs.append(a.index)
    return idxs


class _Prune(Exception):
    pass


def _abstract_pattern(t: Term, allowed: dict, env: Env, depth: int = 0):
    """Rebuild t for use as the body of a pattern binding.

    ``allowed`` maps outer bound index -> new de Bruijn index (at depth 0).
    Loose bounds not in ``allowed`` cause pruning when they occur inside an
    unknown's arguments, and failure when they occur rigidly.  Returns
    (term, env); raises _Prune on failure."""
    cls = t.__class__
    if cls is Bound:
        if t.index < depth:
            return t, env
        outer = t.index - depth
        if outer in allowed:
            return Bound(allowed[outer] + depth), env
        raise _Prune()
    if cls is Abs:
        b, env = _abstract_pattern(t.body, allowed, env, depth + 1)
        return Abs(t.hint, t.var_ty, b), env
    if cls is App:
        head, args = strip_app(t)
        if head.__class__ is Var:
            # try to keep arguments that survive; prune the ones that mention
            # disallowed variables by inventing a narrower unknown
            kept = []
            kept_tys = []
            survives = []
            arg_tys, res_ty = strip_fun_type(head.ty)
            if len(arg_tys) < len(args):
                raise _Prune()
            for a, aty in zip(args, arg_tys):
                try:
                    a2, env = _abstract_pattern(a, allowed, env, depth)
                    kept.append(a2)
                    kept_tys.append(aty)
                    survives.append(True)
                except _Prune:
                    survives.append(False)
            if all(survives):
                return mk_app(head, *kept), env
            # head := \z1..zn. head'(surviving zs)
            new_ty = res_ty
            for ty in reversed(arg_tys[len(args):]):
                new_ty = Fun(ty, new_ty)
            h_ty = new_ty
            for ty in reversed(kept_tys):
                h_ty = Fun(ty, h_ty)
            fresh, env = env.fresh_var(_base_of(head.name), h_ty)
            body_args = [Bound(len(args) - 1 - i)
                         for i, ok in enumerate(survives) if ok]
            binding = mk_app(fresh, *body_args)
            for ty in reversed(arg_tys[:len(args)]):
                binding = Abs("z", ty, binding)
            env = env.bind(head.name, binding)
            return mk_app(fresh, *kept), env
        f2, env = _abstract_pattern(t.fun, allowed, env, depth)
        a2, env = _abstract_pattern(t.arg, allowed, env, depth)
        return App(f2, a2), env
    return t, env


def _base_of(name: str) -> str:
    i = len(name)
    while i > 0 and name[i - 1].isdigit():
        i -= 1
    return name[:i] or name


def _occurs(name: str, t: Term, env: Env) -> bool:
    cls = t.__class__
    if cls is Var:
        if t.name == name:
            return True
        r = env.lookup(t.name)
        return _occurs(name, r, env) if r is not None else False
    if cls is App:
        return _occurs(name, t.fun, env) or _occurs(name, t.arg, env)
    if cls is Abs:
        return _occurs(name, t.body, env)
    return False


# ---------------------------------------------------------------------------
# The solver.
#
# A work pair is (ctx, t, u): ctx is the tuple of binder types shared by both
# sides (innermost first); t and u are beta-normal relative to env chasing.

def _solve(pairs, env: Env, depth: int, trace: Optional[UnifyTrace]) -> Iterator[Env]:
    queue = list(pairs)
    flexrigid = []
    flexflex = []

    while queue:
        ctx, t, u = queue.pop()
        # invariant: queued terms are beta-normal up to the env substitution
        if env.assign:
            t = env.norm(t)
            u = env.norm(u)
        if t == u:
            continue
        tc, uc = t.__class__, u.__class__
        if tc is Abs and uc is Abs:
            queue.append(((t.var_ty,) + ctx, t.body, u.body))
            continue
        if tc is Abs:
            u2 = App(lift(u, 1), Bound(0))
            queue.append(((t.var_ty,) + ctx, t.body, u2))
            continue
        if uc is Abs:
            t2 = App(lift(t, 1), Bound(0))
            queue.append(((u.var_ty,) + ctx, t2, u.body))
            continue
        th, targs = strip_app(t)
        uh, uargs = strip_app(u)
        t_flex = th.__class__ is Var
        u_flex = uh.__class__ is Var
        if not t_flex and not u_flex:
            if th != uh or len(targs) != len(uargs):
                return  # clash
            for a, b in zip(targs, uargs):
                queue.append((ctx, a, b))
            continue
        # eta-expand flexible pairs that still have function type, so that
        # heads are fully applied before pattern/search treatment
        ty = type_of(t, ctx)
        if isinstance(ty, Fun):
            ctx2 = (ty.dom,) + ctx
            queue.append((ctx2, App(lift(t, 1), Bound(0)), App(lift(u, 1), Bound(0))))
            continue
        if t_flex and u_flex:
            # trivially solvable flex-flex: identical argument lists let us
            # equate the heads directly (covers ?X =?= ?Y and re-composition
            # of sub-proofs over shared unknowns)
            if th.name != uh.name and targs == uargs and \
                    _pattern_args(targs) is not None and th.ty == uh.ty:
                if not _occurs(uh.name, th, env):
                    env = env.bind(th.name, uh)
                    queue.extend(flexrigid)
                    queue.extend(flexflex)
                    flexrigid = []
                    flexflex = []
                    continue
            flexflex.append((ctx, t, u))
            continue
        if u_flex:
            t, u = u, t
            th, targs, uh, uargs = uh, uargs, th, targs
        # now t is flex, u rigid
        idxs = _pattern_args(targs)
        if idxs is not None:
            # deterministic pattern case
            if _occurs(th.name, u, env):
                return
            allowed = {b: len(idxs) - 1 - i for i, b in enumerate(idxs)}
            try:
                body, env = _abstract_pattern(u, allowed, env, 0)
            except _Prune:
                return
            arg_tys, _res = strip_fun_type(th.ty)
            binding = body
            for ty in reversed(arg_tys[:len(idxs)]):
                binding = Abs("y", ty, binding)
            env = env.bind(th.name, binding)
            if trace is not None:
                trace.record("pattern", th.name)
            # re-examine postponed pairs: the binding may unblock them
            queue.extend(flexrigid)
            queue.extend(flexflex)
            flexrigid = []
            flexflex = []
            continue
        flexrigid.append((ctx, t, u))

    if not flexrigid:
        out = env
        for ctx, t, u in flexflex:
            a, b = t, u
            for ty in ctx:
                a = Abs("x", ty, a)
                b = Abs("x", ty, b)
            out = out.add_flexflex((a, b))
        yield out
        return

    # Huet search step on the first non-pattern flex-rigid pair
    if depth <= 0:
        if trace is not None:
            trace.truncated = True
            trace.record("depth-exhausted", "")
        return
    ctx, t, u = flexrigid[0]
    rest = flexrigid[1:] + flexflex + [(ctx, t, u)]
    th, targs = strip_app(t)
    uh, uargs = strip_app(u)
    arg_tys, res_ty = strip_fun_type(th.ty)
    p = len(targs)

    def fresh_h_args(env, tys_needed, base):
        """Fresh unknowns applied to the binding's lambda variables."""
        hs = []
        for sigma in tys_needed:
            hty = sigma
            for ty in reversed(arg_tys[:p]):
                hty = Fun(ty, hty)
            h, env = env.fresh_var(base, hty)
            hs.append(mk_app(h, *[Bound(p - 1 - i) for i in range(p)]))
        return hs, env

    def close(body, env2):
        binding = body
        for ty in reversed(arg_tys[:p]):
            binding = Abs("y", ty, binding)
        return env2.bind(th.name, binding)

    # projections first
    for j in range(p):
        sig_args, sig_res = strip_fun_type(arg_tys[j])
        # after applying the projected variable we must land on the result type
        tres = res_ty
        if sig_res != tres:
            continue
        hs, env2 = fresh_h_args(env, sig_args, _base_of(th.name))
        body = mk_app(Bound(p - 1 - j), *hs)
        env3 = close(body, env2)
        if trace is not None:
            trace.record("project", "%s.%d" % (th.name, j))
        yield from _solve(rest, env3, depth - 1, trace)
    # imitation (impossible when the rigid head is a bound variable)
    if uh.__class__ is Const or uh.__class__ is Free:
        uh_arg_tys, _ = strip_fun_type(uh.ty)
        hs, env2 = fresh_h_args(env, uh_arg_tys[:len(uargs)], _base_of(th.name))
        body = mk_app(lift(uh, p), *hs)
        env3 = close(body, env2)
        if trace is not None:
            trace.record("imitate", "%s=%s" % (th.name, head_key(u)))
        yield from _solve(rest, env3, depth - 1, trace)


def unify(t: Term, u: Term, env: Optional[Env] = None, depth: int = 20,
          trace: Optional[UnifyTrace] = None) -> Iterator[Env]:
    """Stream of unifying environments for t =?= u (equal types required).

    Each yielded env theta satisfies: normalize(theta(t)) alpha-equals
    normalize(theta(u)) modulo the postponed flex-flex pairs attached to it."""
    if env is None:
        env = Env()
    if not could_unify(t, u):
        return iter(())
    return _solve([((), beta_normalize(t), beta_normalize(u))], env, depth, trace)


def unify_first(t: Term, u: Term, env: Optional[Env] = None, depth: int = 20) -> Optional[Env]:
    for e in unify(t, u, env, depth):
        return e
    return None


# ---------------------------------------------------------------------------
# One-sided matching (deterministic; pattern lhs only).

def match(pattern: Term, obj: Term, env: Optional[Env] = None) -> Env:
    """Env theta with theta(pattern) alpha-equal to obj; only the pattern's
    unknowns are assigned.  Deterministic.  Raises NoMatch on failure."""
    if env is None:
        env = Env()
    queue = [(pattern, obj)]
    while queue:
        p, o = queue.pop()
        p = env.head_norm(beta_normalize(env.norm(p)) if env.assign else beta_normalize(p))
        o = beta_normalize(o)
        if p == o:
            continue
        pc, oc = p.__class__, o.__class__
        if pc is Abs and oc is Abs:
            queue.append((p.body, o.body))
            continue
        if pc is Abs:
            queue.append((p.body, App(lift(o, 1), Bound(0))))
            continue
        if oc is Abs:
            queue.append((App(lift(p, 1), Bound(0)), o.body))
            continue
        ph, pargs = strip_app(p)
        if ph.__class__ is Var:
            idxs = _pattern_args(pargs)
            if idxs is None:
                raise NoMatch("non-pattern lhs at ?%s" % ph.name)
            allowed = {b: len(idxs) - 1 - i for i, b in enumerate(idxs)}
            try:
                body, env2 = _abstract_pattern(o, allowed, env, 0)
            except _Prune:
                raise NoMatch("object depends on a disallowed bound variable")
            if env2 is not env:
                # matching must not invent bindings via pruning of the object
                raise NoMatch("object not rigid under pattern")
            arg_tys, _ = strip_fun_type(ph.ty)
            binding = body
            for ty in reversed(arg_tys[:len(idxs)]):
                binding = Abs("y", ty, binding)
            prev = env.lookup(ph.name)
            if prev is not None:
                if beta_normalize(env.norm(prev)) != beta_normalize(env.norm(binding)):
                    raise NoMatch("nonlinear pattern mismatch at ?%s" % ph.name)
            else:
                env = env.bind(ph.name, binding)
            continue
        oh, oargs = strip_app(o)
        if ph != oh or len(pargs) != len(oargs):
            raise NoMatch("head clash")
        queue.extend(zip(pargs, oargs))
    return env


def match_opt(pattern: Term, obj: Term, env: Optional[Env] = None) -> Optional[Env]:
    try:
        return match(pattern, obj, env)
    except NoMatch:
        return None
