"""Simply-typed lambda-terms with de Bruijn indices.

This is the representation layer for everything in the system: object
formulae, meta-propositions, rules and proof states are all values of
``Term``.  Bound variables are de Bruijn indices, so alpha-equivalence is
plain structural equality (abstraction name hints are kept only for
printing and are ignored by ``__eq__``/``__hash__``).
"""

from __future__ import annotations

from typing import Iterator, Optional


class TypeError_(Exception):
    """Ill-typed term or type mismatch."""


class UnknownConstant(Exception):
    """Constant not declared in the ambient signature."""


# ---------------------------------------------------------------------------
# Types

class Type:
    __slots__ = ()

    def __rshift__(self, other: "Type") -> "Type":
        return Fun(self, other)


class Base(Type):
    __slots__ = ("name", "_h")

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_h", hash(("B", name)))

    def __setattr__(self, *a):
        raise AttributeError("types are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Base) and other.name == self.name

    def __hash__(self):
        return self._h

    def __repr__(self):
        return self.name


class Fun(Type):
    __slots__ = ("dom", "cod", "_h")

    def __init__(self, dom: Type, cod: Type):
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "_h", hash(("F", dom._h, cod._h)))  # type: ignore

    def __setattr__(self, *a):
        raise AttributeError("types are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Fun) and other._h == self._h
                and other.dom == self.dom and other.cod == self.cod)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return type_to_str(self)


ITYPE = Base("i")        # sets
OTYPE = Base("o")        # object-level formulae
PROP = Base("prop")      # meta-level propositions


def mk_fun_type(doms, cod: Type) -> Type:
    ty = cod
    for d in reversed(doms):
        ty = Fun(d, ty)
    return ty


def strip_fun_type(ty: Type):
    doms = []
    while isinstance(ty, Fun):
        doms.append(ty.dom)
        ty = ty.cod
    return doms, ty


def type_to_str(ty: Type) -> str:
    if isinstance(ty, Base):
        return ty.name
    if not isinstance(ty, Fun):
        return repr(ty)
    doms, cod = strip_fun_type(ty)
    parts = []
    for d in doms:
        parts.append(type_to_str(d) if isinstance(d, Base) else "(%s)" % type_to_str(d))
    if len(parts) == 1:
        return "%s => %s" % (parts[0], type_to_str(cod))
    return "[%s] => %s" % (", ".join(type_to_str(d) for d in doms), type_to_str(cod))


# ---------------------------------------------------------------------------
# Terms

class Term:
    __slots__ = ()


class Const(Term):
    __slots__ = ("name", "ty", "_h")

    def __init__(self, name: str, ty: Type):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "ty", ty)
        object.__setattr__(self, "_h", hash(("C", name, ty._h)))  # type: ignore

    def __setattr__(self, *a):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Const) and other._h == self._h
                and other.name == self.name and other.ty == self.ty)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return "Const(%r)" % self.name


class Free(Term):
    __slots__ = ("name", "ty", "_h")

    def __init__(self, name: str, ty: Type):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "ty", ty)
        object.__setattr__(self, "_h", hash(("f", name, ty._h)))  # type: ignore

    def __setattr__(self, *a):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Free) and other._h == self._h
                and other.name == self.name and other.ty == self.ty)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return "Free(%r)" % self.name


class Var(Term):
    """A schematic unknown, written ?name."""

    __slots__ = ("name", "ty", "_h")

    def __init__(self, name: str, ty: Type):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "ty", ty)
        object.__setattr__(self, "_h", hash(("V", name, ty._h)))  # type: ignore

    def __setattr__(self, *a):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Var) and other._h == self._h
                and other.name == self.name and other.ty == self.ty)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return "Var(?%s)" % self.name


class Bound(Term):
    __slots__ = ("index", "_h")

    def __init__(self, index: int):
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "_h", hash(("b", index)))

    def __setattr__(self, *a):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Bound) and other.index == self.index

    def __hash__(self):
        return self._h

    def __repr__(self):
        return "Bound(%d)" % self.index


class Abs(Term):
    """Abstraction; ``hint`` is a printing hint only (not part of equality)."""

    __slots__ = ("hint", "var_ty", "body", "_h")

    def __init__(self, hint: str, var_ty: Type, body: Term):
        object.__setattr__(self, "hint", hint)
        object.__setattr__(self, "var_ty", var_ty)
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "_h", hash(("A", var_ty._h, body._h)))  # type: ignore

    def __setattr__(self, *a):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Abs) and other._h == self._h
                and other.var_ty == self.var_ty and other.body == self.body)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return "Abs(%s, %r)" % (self.hint, self.body)


class App(Term):
    __slots__ = ("fun", "arg", "_h")

    def __init__(self, fun: Term, arg: Term):
        object.__setattr__(self, "fun", fun)
        object.__setattr__(self, "arg", arg)
        object.__setattr__(self, "_h", hash(("@", fun._h, arg._h)))  # type: ignore

    def __setattr__(self, *a):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, App) and other._h == self._h
                and other.fun == self.fun and other.arg == self.arg)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return "App(%r, %r)" % (self.fun, self.arg)


# ---------------------------------------------------------------------------
# Spine helpers

def mk_app(head: Term, *args: Term) -> Term:
    t = head
    for a in args:
        t = App(t, a)
    return t


def strip_app(t: Term):
    """Return (head, [args]) of an application spine."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def mk_abs(hints_tys, body: Term) -> Term:
    for hint, ty in reversed(hints_tys):
        body = Abs(hint, ty, body)
    return body


def strip_abs(t: Term):
    binders = []
    while isinstance(t, Abs):
        binders.append((t.hint, t.var_ty))
        t = t.body
    return binders, t


# ---------------------------------------------------------------------------
# de Bruijn machinery

def lift(t: Term, inc: int, cutoff: int = 0) -> Term:
    """Shift loose bound variables >= cutoff by inc."""
    if inc == 0:
        return t
    cls = t.__class__
    if cls is Bound:
        return Bound(t.index + inc) if t.index >= cutoff else t
    if cls is App:
        f = lift(t.fun, inc, cutoff)
        a = lift(t.arg, inc, cutoff)
        return t if (f is t.fun and a is t.arg) else App(f, a)
    if cls is Abs:
        b = lift(t.body, inc, cutoff + 1)
        return t if b is t.body else Abs(t.hint, t.var_ty, b)
    return t


def subst_bounds(t: Term, args, depth: int = 0) -> Term:
    """Simultaneously replace Bound(depth+i) by args[i]; shift higher bounds down.

    args[0] replaces the innermost binder being removed."""
    n = len(args)
    cls = t.__class__
    if cls is Bound:
        i = t.index
        if i < depth:
            return t
        if i < depth + n:
            return lift(args[i - depth], depth, 0)
        return Bound(i - n)
    if cls is App:
        f = subst_bounds(t.fun, args, depth)
        a = subst_bounds(t.arg, args, depth)
        return t if (f is t.fun and a is t.arg) else App(f, a)
    if cls is Abs:
        b = subst_bounds(t.body, args, depth + 1)
        return t if b is t.body else Abs(t.hint, t.var_ty, b)
    return t


def subst_bound(body: Term, arg: Term) -> Term:
    """Capture-avoiding replacement of Bound(0) in ``body`` by ``arg``."""
    return subst_bounds(body, [arg])


def has_loose_bounds(t: Term, depth: int = 0) -> bool:
    cls = t.__class__
    if cls is Bound:
        return t.index >= depth
    if cls is App:
        return has_loose_bounds(t.fun, depth) or has_loose_bounds(t.arg, depth)
    if cls is Abs:
        return has_loose_bounds(t.body, depth + 1)
    return False


def occurs_bound(t: Term, idx: int, depth: int = 0) -> bool:
    """Does the loose bound variable with (relative) index idx occur in t?"""
    cls = t.__class__
    if cls is Bound:
        return t.index == idx + depth
    if cls is App:
        return occurs_bound(t.fun, idx, depth) or occurs_bound(t.arg, idx, depth)
    if cls is Abs:
        return occurs_bound(t.body, idx, depth + 1)
    return False


def loose_bounds(t: Term, depth: int = 0, acc=None) -> set:
    """Set of loose bound indices, counted relative to the outside of t."""
    if acc is None:
        acc = set()
    cls = t.__class__
    if cls is Bound:
        if t.index >= depth:
            acc.add(t.index - depth)
    elif cls is App:
        loose_bounds(t.fun, depth, acc)
        loose_bounds(t.arg, depth, acc)
    elif cls is Abs:
        loose_bounds(t.body, depth + 1, acc)
    return acc


# ---------------------------------------------------------------------------
# Normalization: beta reduction followed by eta contraction.

_NORM_FUEL = 5_000_000


class _Fuel:
    __slots__ = ("n",)

    def __init__(self, n):
        self.n = n

    def tick(self):
        self.n -= 1
        if self.n <= 0:
            raise TypeError_("normalization fuel exhausted")


def _norm(t: Term, fuel: _Fuel) -> Term:
    fuel.tick()
    cls = t.__class__
    if cls is App:
        f = _norm(t.fun, fuel)
        if isinstance(f, Abs):
            return _norm(subst_bound(f.body, t.arg), fuel)
        a = _norm(t.arg, fuel)
        return t if (f is t.fun and a is t.arg) else App(f, a)
    if cls is Abs:
        b = _norm(t.body, fuel)
        # eta: \x. f(x) --> f  when x not free in f
        if isinstance(b, App) and b.arg.__class__ is Bound and b.arg.index == 0 \
                and not occurs_bound(b.fun, 0):
            return lift(b.fun, -1, 1)
        return t if b is t.body else Abs(t.hint, t.var_ty, b)
    return t


def normalize(t: Term) -> Term:
    """Beta-normal, eta-contracted form.  Idempotent and type-preserving."""
    return _norm(t, _Fuel(_NORM_FUEL))


def beta_normalize(t: Term) -> Term:
    """Beta-normal form without eta contraction (used internally)."""
    cls = t.__class__
    if cls is App:
        f = beta_normalize(t.fun)
        if isinstance(f, Abs):
            return beta_normalize(subst_bound(f.body, t.arg))
        a = beta_normalize(t.arg)
        return t if (f is t.fun and a is t.arg) else App(f, a)
    if cls is Abs:
        b = beta_normalize(t.body)
        return t if b is t.body else Abs(t.hint, t.var_ty, b)
    return t


# ---------------------------------------------------------------------------
# Typing

def type_of(t: Term, ctx=()) -> Type:
    """Infer the type; ctx is the binder context, innermost first."""
    cls = t.__class__
    if cls is Const or cls is Free or cls is Var:
        return t.ty
    if cls is Bound:
        if t.index >= len(ctx):
            raise TypeError_("loose bound variable %d" % t.index)
        return ctx[t.index]
    if cls is Abs:
        return Fun(t.var_ty, type_of(t.body, (t.var_ty,) + tuple(ctx)))
    # App
    fty = type_of(t.fun, ctx)
    if not isinstance(fty, Fun):
        raise TypeError_("application of non-function: %r : %s" % (t.fun, type_to_str(fty)))
    aty = type_of(t.arg, ctx)
    if fty.dom != aty:
        raise TypeError_("type mismatch in application: expected %s, got %s"
                         % (type_to_str(fty.dom), type_to_str(aty)))
    return fty.cod


def is_meta_const(c: "Const") -> bool:
    """The meta-logic constants ==> , !! (named 'all') and == are hard-wired;
    'all' and '==' are type-indexed families."""
    ty = c.ty
    if c.name == "==>":
        return ty == Fun(PROP, Fun(PROP, PROP))
    if c.name == "all":
        return (isinstance(ty, Fun) and isinstance(ty.dom, Fun)
                and ty.dom.cod == PROP and ty.cod == PROP)
    if c.name == "==":
        return (isinstance(ty, Fun) and isinstance(ty.cod, Fun)
                and ty.dom == ty.cod.dom and ty.cod.cod == PROP)
    return False


def typecheck(t: Term, expected: Optional[Type] = None, signature=None, ctx=()) -> Type:
    """Full check: well-typed application structure, declared constants,
    and (optionally) an expected result type."""
    if signature is not None:
        for c in consts_of(t):
            if c.name in ("==>", "all", "=="):
                if not is_meta_const(c):
                    raise TypeError_("meta constant %r used at type %s"
                                     % (c.name, type_to_str(c.ty)))
                continue
            declared = signature.get(c.name)
            if declared is None:
                raise UnknownConstant("undeclared constant %r" % c.name)
            if declared != c.ty:
                raise TypeError_("constant %r used at type %s, declared %s"
                                 % (c.name, type_to_str(c.ty), type_to_str(declared)))
    ty = type_of(t, ctx)
    if expected is not None and ty != expected:
        raise TypeError_("expected type %s, found %s" % (type_to_str(expected), type_to_str(ty)))
    return ty


# ---------------------------------------------------------------------------
# Occurrence / collection utilities

def fold_aterms(t: Term, f, acc):
    cls = t.__class__
    if cls is App:
        return fold_aterms(t.arg, f, fold_aterms(t.fun, f, acc))
    if cls is Abs:
        return fold_aterms(t.body, f, acc)
    return f(t, acc)


def vars_of(t: Term) -> dict:
    """Unknowns occurring in t as {name: type}."""
    out = {}

    def go(t):
        cls = t.__class__
        if cls is Var:
            out[t.name] = t.ty
        elif cls is App:
            go(t.fun)
            go(t.arg)
        elif cls is Abs:
            go(t.body)
    go(t)
    return out


def frees_of(t: Term) -> dict:
    out = {}

    def go(t):
        cls = t.__class__
        if cls is Free:
            out[t.name] = t.ty
        elif cls is App:
            go(t.fun)
            go(t.arg)
        elif cls is Abs:
            go(t.body)
    go(t)
    return out


def consts_of(t: Term) -> list:
    out = []

    def go(t):
        cls = t.__class__
        if cls is Const:
            out.append(t)
        elif cls is App:
            go(t.fun)
            go(t.arg)
        elif cls is Abs:
            go(t.body)
    go(t)
    return out


def occurs_var(name: str, t: Term) -> bool:
    cls = t.__class__
    if cls is Var:
        return t.name == name
    if cls is App:
        return occurs_var(name, t.fun) or occurs_var(name, t.arg)
    if cls is Abs:
        return occurs_var(name, t.body)
    return False


def subst_frees(t: Term, mapping: dict) -> Term:
    """Replace Free variables by closed terms (no capture possible: the
    replacements must be closed)."""
    cls = t.__class__
    if cls is Free:
        r = mapping.get(t.name)
        return t if r is None else r
    if cls is App:
        return App(subst_frees(t.fun, mapping), subst_frees(t.arg, mapping))
    if cls is Abs:
        return Abs(t.hint, t.var_ty, subst_frees(t.body, mapping))
    return t


def subst_vars(t: Term, mapping: dict) -> Term:
    """Replace Unknowns by terms (replacements must be closed)."""
    cls = t.__class__
    if cls is Var:
        r = mapping.get(t.name)
        return t if r is None else r
    if cls is App:
        return App(subst_vars(t.fun, mapping), subst_vars(t.arg, mapping))
    if cls is Abs:
        return Abs(t.hint, t.var_ty, subst_vars(t.body, mapping))
    return t


def abstract_over_free(t: Term, name: str, depth: int = 0) -> Term:
    """Replace occurrences of Free(name) by Bound(depth); the result is
    intended as the body of a new abstraction."""
    cls = t.__class__
    if cls is Free:
        return Bound(depth) if t.name == name else t
    if cls is App:
        return App(abstract_over_free(t.fun, name, depth),
                   abstract_over_free(t.arg, name, depth))
    if cls is Abs:
        return Abs(t.hint, t.var_ty, abstract_over_free(t.body, name, depth + 1))
    return t


def term_size(t: Term) -> int:
    n = 0
    stack = [t]
    while stack:
        t = stack.pop()
        n += 1
        cls = t.__class__
        if cls is App:
            stack.append(t.fun)
            stack.append(t.arg)
        elif cls is Abs:
            stack.append(t.body)
    return n


# ---------------------------------------------------------------------------
# Environments (substitutions for unknowns)

class Env:
    """A substitution for schematic unknowns, plus a counter for inventing
    fresh ones and any postponed flex-flex pairs.

    Immutable; ``bind`` returns an extended copy."""

    __slots__ = ("assign", "counter", "flexflex")

    def __init__(self, assign=None, counter: int = 0, flexflex=()):
        object.__setattr__(self, "assign", assign if assign is not None else {})
        object.__setattr__(self, "counter", counter)
        object.__setattr__(self, "flexflex", tuple(flexflex))

    def __setattr__(self, *a):
        raise AttributeError("Env is immutable")

    def bind(self, name: str, t: Term) -> "Env":
        new = dict(self.assign)
        new[name] = t
        return Env(new, self.counter, self.flexflex)

    def with_counter(self, n: int) -> "Env":
        return Env(self.assign, n, self.flexflex)

    def add_flexflex(self, pair) -> "Env":
        return Env(self.assign, self.counter, self.flexflex + (pair,))

    def clear_flexflex(self) -> "Env":
        return Env(self.assign, self.counter, ())

    def lookup(self, name: str):
        return self.assign.get(name)

    def fresh_var(self, base: str, ty: Type):
        n = self.counter + 1
        return Var("%s%d" % (base, n), ty), self.with_counter(n)

    def is_empty(self) -> bool:
        return not self.assign

    def norm(self, t: Term) -> Term:
        """Apply the substitution, chasing chains, and beta-normalize."""
        if not self.assign:
            return t
        return beta_normalize(self._walk(t))

    def _walk(self, t: Term) -> Term:
        cls = t.__class__
        if cls is Var:
            r = self.assign.get(t.name)
            return t if r is None else self._walk(r)
        if cls is App:
            f = self._walk(t.fun)
            a = self._walk(t.arg)
            return t if (f is t.fun and a is t.arg) else App(f, a)
        if cls is Abs:
            b = self._walk(t.body)
            return t if b is t.body else Abs(t.hint, t.var_ty, b)
        return t

    def head_norm(self, t: Term) -> Term:
        """Chase the head unknown and beta-reduce at the top only."""
        while True:
            head, args = strip_app(t)
            if head.__class__ is Var:
                r = self.assign.get(head.name)
                if r is not None:
                    t = mk_app(r, *args)
                    t = _contract_head(t)
                    continue
            return t

    def __repr__(self):
        return "Env(%r)" % (self.assign,)


def _contract_head(t: Term) -> Term:
    """Beta-reduce top-level redexes only."""
    while isinstance(t, App):
        head, args = strip_app(t)
        if isinstance(head, Abs):
            n = 0
            body = head
            while isinstance(body, Abs) and n < len(args):
                body = body.body
                n += 1
            t = mk_app(subst_bounds(body, list(reversed(args[:n]))), *args[n:])
        else:
            return t
    return t


def apply_env(env: Env, t: Term) -> Term:
    """All assigned unknowns replaced, result normalized."""
    return normalize(env._walk(t)) if env.assign else normalize(t)


# ---------------------------------------------------------------------------
# Fresh-name support

def max_name_index(names) -> int:
    """Largest numeric suffix among the given names (0 when none)."""
    best = 0
    for n in names:
        i = len(n)
        while i > 0 and n[i - 1].isdigit():
            i -= 1
        if i < len(n):
            best = max(best, int(n[i:]))
    return best


def base_name(n: str) -> str:
    i = len(n)
    while i > 0 and n[i - 1].isdigit():
        i -= 1
    return n[:i] or n
