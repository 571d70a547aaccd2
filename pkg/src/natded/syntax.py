"""Concrete syntax: lexer, term parser with type inference, and parsers for
theory files and proof scripts.

Grammar notes:
  - infix/binder notation is data-driven from the theory's notation table
  - set-builder braces, pairs <a,b>, [| .. |] ==> sugar, %-abstraction and
    !!-quantification are fixed structural syntax
  - object formulae are coerced into meta-propositions by inserting the
    judgement constant (Trueprop) where a prop is required
"""

from __future__ import annotations

from typing import List, Optional, Tuple

from .terms import (
    Abs, App, Base, Bound, Const, Free, Fun, ITYPE, OTYPE, PROP, Term, Type,
    TypeError_, Var, lift, mk_app, mk_fun_type, normalize, type_to_str,
)
from .theory import NotationDecl, Theory
from . import kernel as K


class SyntaxError_(Exception):
    def __init__(self, msg, line=None, col=None):
        if line is not None:
            msg = "%d:%d: %s" % (line, col, msg)
        super().__init__(msg)
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# Lexer

_SYMBOLS = [
    "==>", "<->", "-->", "-``", "[|", "|]", "==", "=>", "<=", "->", "!!",
    "#+", "#-", "``", "(", ")", "[", "]", "{", "}", ",", ".", ":", ";", "=",
    "<", ">", "%", "'", "`", "-", "*", "|", "&", "~", "+", "/", "@",
]


class Tok:
    __slots__ = ("kind", "val", "line", "col")

    def __init__(self, kind, val, line, col):
        self.kind = kind      # 'id', 'var', 'num', 'sym', 'str', 'eof'
        self.val = val
        self.line = line
        self.col = col

    def __repr__(self):
        return "Tok(%s,%r)" % (self.kind, self.val)


def tokenize(text: str) -> List[Tok]:
    toks = []
    i, n = 0, len(text)
    line, col = 1, 1

    def push(kind, val, l, c):
        toks.append(Tok(kind, val, l, c))

    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#" and text[i:i + 2] not in ("#+", "#-"):
            while i < n and text[i] != "\n":
                i += 1
            continue
        l0, c0 = line, col
        if ch == '"':
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n and text[j + 1] in '"\\':
                    buf.append(text[j + 1])
                    j += 2
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                raise SyntaxError_("unterminated string", l0, c0)
            push("str", "".join(buf), l0, c0)
            col += j + 1 - i
            i = j + 1
            continue
        if ch == "?":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            if j == i + 1:
                raise SyntaxError_("expected identifier after '?'", l0, c0)
            push("var", text[i + 1:j], l0, c0)
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in ("EX", "ALL") and j < n and text[j] == "!":
                word += "!"
                j += 1
            push("id", word, l0, c0)
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            push("num", text[i:j], l0, c0)
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                push("sym", sym, l0, c0)
                i += len(sym)
                col += len(sym)
                break
        else:
            raise SyntaxError_("unexpected character %r" % ch, l0, c0)
    toks.append(Tok("eof", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# Type metavariables for inference

class TMeta(Type):
    __slots__ = ("id", "ref", "_h")
    _next = [0]

    def __init__(self):
        TMeta._next[0] += 1
        object.__setattr__(self, "id", TMeta._next[0])
        object.__setattr__(self, "ref", [None])
        object.__setattr__(self, "_h", hash(("M", TMeta._next[0])))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return self._h

    def __repr__(self):
        return "?t%d" % self.id


def t_resolve(ty: Type) -> Type:
    while isinstance(ty, TMeta) and ty.ref[0] is not None:
        ty = ty.ref[0]
    if isinstance(ty, Fun):
        d, c = t_resolve(ty.dom), t_resolve(ty.cod)
        if d is ty.dom and c is ty.cod:
            return ty
        return Fun(d, c)
    return ty


def t_unify(a: Type, b: Type, where=""):
    a, b = t_resolve(a), t_resolve(b)
    if a is b or a == b:
        return
    if isinstance(a, TMeta):
        a.ref[0] = b
        return
    if isinstance(b, TMeta):
        b.ref[0] = a
        return
    if isinstance(a, Fun) and isinstance(b, Fun):
        t_unify(a.dom, b.dom, where)
        t_unify(a.cod, b.cod, where)
        return
    raise TypeError_("type mismatch%s: %s vs %s"
                     % (" in " + where if where else "", type_to_str(t_resolve(a)),
                        type_to_str(t_resolve(b))))


def t_default(ty: Type) -> Type:
    """Ground a type, defaulting unconstrained metavariables to i."""
    ty = t_resolve(ty)
    if isinstance(ty, TMeta):
        return ITYPE
    if isinstance(ty, Fun):
        return Fun(t_default(ty.dom), t_default(ty.cod))
    return ty


# ---------------------------------------------------------------------------
# Notation table (built from a theory)

class NotationTable:
    def __init__(self, thy: Theory):
        self.infix = {}      # token -> (const, prec, assoc 'l'/'r', dom)
        self.prefix = {}     # token -> (const, prec)
        self.binder = {}     # token -> const         (plain:  B x. P)
        self.binderdom = {}  # token -> const         (domain: B x:A. P)
        self.by_const = {}   # const name -> (kind, token, prec)
        for d in thy.all_notation():
            if d.kind in ("infixl", "infixr"):
                self.infix[d.token] = (d.const, d.prec, d.kind[-1], False)
            elif d.kind == "infixr_dom":
                self.infix[d.token] = (d.const, d.prec, "r", True)
            elif d.kind == "prefix":
                self.prefix[d.token] = (d.const, d.prec)
            elif d.kind == "binder":
                self.binder[d.token] = d.const
            elif d.kind == "binderdom":
                self.binderdom[d.token] = d.const
            self.by_const.setdefault(d.const, []).append((d.kind, d.token, d.prec))


# ---------------------------------------------------------------------------
# Term parser

class TermParser:
    def __init__(self, thy: Theory, toks: List[Tok], pos: int = 0):
        self.thy = thy
        self.nt = NotationTable(thy)
        self.toks = toks
        self.pos = pos
        self.scopes: List[Tuple[str, Type]] = []   # bound vars, innermost last
        self.free_types = {}
        self.var_types = {}

    # -- token helpers
    def peek(self, k=0) -> Tok:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, val: str) -> Tok:
        t = self.next()
        if t.val != val:
            raise SyntaxError_("expected %r, found %r" % (val, t.val or "<eof>"),
                               t.line, t.col)
        return t

    def at(self, val: str) -> bool:
        return self.peek().val == val and self.peek().kind in ("sym", "id")

    def error(self, msg):
        t = self.peek()
        raise SyntaxError_(msg, t.line, t.col)

    # -- constants / atoms
    def const_or_free(self, name: str, tok: Tok) -> Term:
        for idx in range(len(self.scopes) - 1, -1, -1):
            if self.scopes[idx][0] == name:
                return Bound(len(self.scopes) - 1 - idx)
        ty = self.thy.const_type(name)
        if ty is not None:
            return Const(name, ty)
        tm = self.free_types.get(name)
        if tm is None:
            tm = TMeta()
            self.free_types[name] = tm
        return Free(name, tm)

    def parse(self, min_prec: int = 0) -> Term:
        left = self.parse_prefix(min_prec)
        while True:
            t = self.peek()
            info = self.nt.infix.get(t.val) if t.kind in ("sym", "id") else None
            if info is None:
                return left
            const, prec, assoc, dom_form = info
            if prec < min_prec:
                return left
            self.next()
            rhs = self.parse(prec + 1 if assoc == "l" else prec)
            cty = self.thy.const_type(const)
            if dom_form:
                # e.g. A -> B  ==  Pi(A, %_. B)
                body = Abs("x", ITYPE, lift(rhs, 1))
                left = mk_app(Const(const, cty), left, body)
            else:
                left = mk_app(Const(const, cty), left, rhs)
        return left

    def parse_prefix(self, min_prec: int) -> Term:
        t = self.peek()
        if t.kind in ("sym", "id") and t.val in self.nt.prefix:
            const, prec = self.nt.prefix[t.val]
            if prec >= min_prec:
                self.next()
                arg = self.parse(prec)
                return App(Const(const, self.thy.const_type(const)), arg)
        if t.kind == "id" and (t.val in self.nt.binder or t.val in self.nt.binderdom) \
                and self.peek(1).kind == "id":
            return self.parse_binder()
        if t.val == "!!":
            return self.parse_meta_all()
        if t.val == "%":
            return self.parse_lambda()
        if t.val == "[|":
            return self.parse_big_implication()
        return self.parse_app()

    def parse_binder(self) -> Term:
        tok = self.next()
        names = []
        while self.peek().kind == "id":
            names.append(self.next().val)
        if not names:
            self.error("binder %s needs a variable" % tok.val)
        if self.at(":"):
            if tok.val not in self.nt.binderdom:
                self.error("binder %s takes no domain" % tok.val)
            if len(names) != 1:
                self.error("one variable per bounded binder")
            self.next()
            dom = self.parse(51)   # domains parse above comparison level
            self.expect(".")
            const = self.nt.binderdom[tok.val]
            cty = self.thy.const_type(const)
            # second argument type x_ty => ...
            x_ty = cty.cod.dom.dom if isinstance(cty.cod.dom, Fun) else ITYPE
            self.scopes.append((names[0], x_ty))
            body = self.parse(0)
            self.scopes.pop()
            return mk_app(Const(const, cty), dom, Abs(names[0], x_ty, body))
        if tok.val not in self.nt.binder:
            self.error("binder %s requires ':'" % tok.val)
        self.expect(".")
        const = self.nt.binder[tok.val]
        cty = self.thy.const_type(const)
        x_ty = cty.dom.dom if isinstance(cty.dom, Fun) else ITYPE
        for nm in names:
            self.scopes.append((nm, x_ty))
        body = self.parse(0)
        for nm in reversed(names):
            self.scopes.pop()
            body = App(Const(const, cty), Abs(nm, x_ty, body))
        return body

    def parse_meta_all(self) -> Term:
        self.expect("!!")
        names = []
        while self.peek().kind == "id":
            names.append(self.next().val)
        if not names:
            self.error("!! needs a variable")
        self.expect(".")
        tys = [TMeta() for _ in names]
        for nm, ty in zip(names, tys):
            self.scopes.append((nm, ty))
        body = self.parse(0)
        body = self.coerce_prop(body)
        for nm, ty in zip(reversed(names), reversed(tys)):
            self.scopes.pop()
            body = App(Const("all", Fun(Fun(ty, PROP), PROP)), Abs(nm, ty, body))
        return body

    def parse_lambda(self) -> Term:
        self.expect("%")
        names = []
        while self.peek().kind == "id":
            names.append(self.next().val)
        if not names:
            self.error("% needs a variable")
        self.expect(".")
        tys = [TMeta() for _ in names]
        for nm, ty in zip(names, tys):
            self.scopes.append((nm, ty))
        body = self.parse(0)
        for nm, ty in zip(reversed(names), reversed(tys)):
            self.scopes.pop()
            body = Abs(nm, ty, body)
        return body

    def parse_big_implication(self) -> Term:
        self.expect("[|")
        prems = [self.parse(0)]
        while self.at(";"):
            self.next()
            prems.append(self.parse(0))
        self.expect("|]")
        self.expect("==>")
        concl = self.parse(1)
        concl = self.coerce_prop(concl)
        for p in reversed(prems):
            concl = mk_app(K.IMPLIES, self.coerce_prop(p), concl)
        return concl

    def cur_ctx(self):
        return tuple(ty for _, ty in reversed(self.scopes))

    def coerce_prop(self, t: Term) -> Term:
        """Make t a proposition: object formulae get the judgement wrapper."""
        ty = t_resolve(self.type_of(t, self.cur_ctx()))
        if ty == PROP:
            return t
        tp = self.thy.const_type("Trueprop")
        if tp is None:
            raise TypeError_("no judgement constant declared")
        t_unify(ty, OTYPE, "proposition coercion")
        return App(Const("Trueprop", tp), t)

    def parse_app(self) -> Term:
        t = self.parse_atom()
        return t

    def parse_atom(self) -> Term:
        tok = self.peek()
        if tok.val == "(":
            self.next()
            t = self.parse(0)
            # meta infixes live here so they survive parenthesization
            t = self.maybe_meta_infix(t)
            self.expect(")")
            return t
        if tok.val == "{":
            return self.parse_braces()
        if tok.val == "<":
            return self.parse_pair()
        if tok.kind == "var":
            self.next()
            tm = self.var_types.get(tok.val)
            if tm is None:
                tm = TMeta()
                self.var_types[tok.val] = tm
            t = Var(tok.val, tm)
            return self.parse_call_args(t)
        if tok.kind == "num":
            self.next()
            ty = self.thy.const_type(tok.val)
            if ty is None:
                raise SyntaxError_("numeral %s is not a declared constant" % tok.val,
                                   tok.line, tok.col)
            return Const(tok.val, ty)
        if tok.kind == "id":
            self.next()
            t = self.const_or_free(tok.val, tok)
            return self.parse_call_args(t)
        self.error("unexpected token %r" % (tok.val or "<eof>"))

    def parse_call_args(self, head: Term) -> Term:
        if self.peek().val == "(" and self._adjacent():
            self.next()
            args = [self.parse(0)]
            while self.at(","):
                self.next()
                args.append(self.parse(0))
            self.expect(")")
            return mk_app(head, *args)
        return head

    def _adjacent(self) -> bool:
        # function-call parentheses must follow immediately (f(x) not f (x));
        # we approximate by always allowing it, which is unambiguous here
        return True

    def parse_pair(self) -> Term:
        self.expect("<")
        items = [self.parse(0)]
        while self.at(","):
            self.next()
            items.append(self.parse(0))
        self.expect(">")
        if len(items) < 2:
            self.error("pairs need at least two components")
        cty = self.thy.const_type("Pair")
        t = items[-1]
        for a in reversed(items[:-1]):
            t = mk_app(Const("Pair", cty), a, t)
        return t

    def parse_braces(self) -> Term:
        self.expect("{")
        if self.at("}"):
            self.error("empty braces: use 0 for the empty set")
        # Collect: { x : A . P }
        if self.peek().kind == "id" and self.peek(1).val == ":":
            name = self.next().val
            self.next()  # ':'
            dom = self.parse(0)
            self.expect(".")
            cty = self.thy.const_type("Collect")
            self.scopes.append((name, ITYPE))
            body = self.parse(0)
            self.scopes.pop()
            self.expect("}")
            return mk_app(Const("Collect", cty), dom, Abs(name, ITYPE, body))
        first = self.parse(0)
        if self.at("."):
            self.next()
            if self.peek().kind != "id" or self.peek(1).val != ":":
                self.error("expected 'x:A' after '.' in set comprehension")
            xname = self.next().val
            self.next()
            dom = self.parse(0)
            if self.at(","):
                # Replace: { y . x:A, Q }  -- first must be a fresh variable
                self.next()
                if first.__class__ is not Free:
                    self.error("replacement element must be a variable")
                yname = first.name
                self.free_types.pop(yname, None)
                cty = self.thy.const_type("Replace")
                self.scopes.append((xname, ITYPE))
                self.scopes.append((yname, ITYPE))
                body = self.parse(0)
                self.scopes.pop()
                self.scopes.pop()
                self.expect("}")
                return mk_app(Const("Replace", cty), dom,
                              Abs(xname, ITYPE, Abs(yname, ITYPE, body)))
            # RepFun: { b . x:A } -- rebind the element term under the binder
            self.expect("}")
            cty = self.thy.const_type("RepFun")
            body = self._rebind_free(first, xname)
            self.free_types.pop(xname, None)
            return mk_app(Const("RepFun", cty), dom, Abs(xname, ITYPE, body))
        # finite set {a, b, c} as cons chains
        items = [first]
        while self.at(","):
            self.next()
            items.append(self.parse(0))
        self.expect("}")
        cons_ty = self.thy.const_type("cons")
        zero = Const("0", self.thy.const_type("0"))
        t = zero
        for a in reversed(items):
            t = mk_app(Const("cons", cons_ty), a, t)
        return t

    def _rebind_free(self, t: Term, name: str, depth: int = 0) -> Term:
        """Turn the free variable `name` into Bound(depth) inside t (used for
        the functional-replacement sugar, parsed before the binder is known)."""
        cls = t.__class__
        if cls is Free and t.name == name:
            return Bound(depth)
        if cls is App:
            return App(self._rebind_free(t.fun, name, depth),
                       self._rebind_free(t.arg, name, depth))
        if cls is Abs:
            return Abs(t.hint, t.var_ty, self._rebind_free(t.body, name, depth + 1))
        return t

    def maybe_meta_infix(self, t: Term) -> Term:
        return t

    # -- type inference ------------------------------------------------------

    def type_of(self, t: Term, ctx=()) -> Type:
        cls = t.__class__
        if cls is Const or cls is Free or cls is Var:
            return t.ty
        if cls is Bound:
            return ctx[t.index]
        if cls is Abs:
            return Fun(t.var_ty, self.type_of(t.body, (t.var_ty,) + tuple(ctx)))
        fty = t_resolve(self.type_of(t.fun, ctx))
        aty = self.type_of(t.arg, ctx)
        if isinstance(fty, TMeta):
            cod = TMeta()
            t_unify(fty, Fun(aty, cod))
            return cod
        if not isinstance(fty, Fun):
            raise TypeError_("application of non-function of type %s"
                             % type_to_str(fty))
        t_unify(fty.dom, aty, "application argument")
        return fty.cod


# meta-level operator parsing: ==> , == , !! appear in rule statements.
# They are handled as the lowest-precedence layer around the object grammar.

class PropParser(TermParser):
    def parse_prop(self) -> Term:
        t = self.parse_implication()
        return t

    def parse_implication(self) -> Term:
        if self.peek().val == "[|":
            return self.parse_big_implication()
        left = self.parse_eq_level()
        if self.at("==>"):
            self.next()
            right = self.parse_implication()
            return mk_app(K.IMPLIES, self.coerce_prop(left), self.coerce_prop(right))
        return left

    def parse_eq_level(self) -> Term:
        left = self.parse(0)
        if self.at("=="):
            self.next()
            right = self.parse(0)
            ctx = self.cur_ctx()
            lty = t_resolve(self.type_of(left, ctx))
            rty = t_resolve(self.type_of(right, ctx))
            t_unify(lty, rty, "meta-equality")
            ty = t_resolve(lty)
            if isinstance(ty, TMeta):
                ty = ITYPE
                t_unify(lty, ty)
            return mk_app(K.eq_const(t_default(ty)), left, right)
        return left

    def parse_prefix(self, min_prec: int) -> Term:
        t = self.peek()
        if t.val == "!!":
            # a !!-prefix inside a prop position may be followed by ==> etc.
            self.expect("!!")
            names = []
            while self.peek().kind == "id":
                names.append(self.next().val)
            if not names:
                self.error("!! needs a variable")
            self.expect(".")
            tys = [TMeta() for _ in names]
            for nm, ty in zip(names, tys):
                self.scopes.append((nm, ty))
            body = self.parse_implication()
            body = self.coerce_prop(body)
            for nm, ty in zip(reversed(names), reversed(tys)):
                self.scopes.pop()
                body = App(Const("all", Fun(Fun(ty, PROP), PROP)), Abs(nm, ty, body))
            return body
        return super().parse_prefix(min_prec)

    def parse_big_implication(self) -> Term:
        self.expect("[|")
        prems = [self.parse_implication()]
        while self.at(";"):
            self.next()
            prems.append(self.parse_implication())
        self.expect("|]")
        self.expect("==>")
        concl = self.parse_implication()
        concl = self.coerce_prop(concl)
        for p in reversed(prems):
            concl = mk_app(K.IMPLIES, self.coerce_prop(p), concl)
        return concl

    def parse_atom(self) -> Term:
        tok = self.peek()
        if tok.val == "(":
            self.next()
            t = self.parse_implication()
            self.expect(")")
            return t
        return super().parse_atom()


# ---------------------------------------------------------------------------
# Grounding a parsed term: resolve type metavariables and re-typecheck.

def _ground(t: Term) -> Term:
    cls = t.__class__
    if cls is Const:
        ty = t_default(t.ty)
        return t if ty == t.ty else Const(t.name, ty)
    if cls is Free:
        return Free(t.name, t_default(t.ty))
    if cls is Var:
        return Var(t.name, t_default(t.ty))
    if cls is Bound:
        return t
    if cls is Abs:
        return Abs(t.hint, t_default(t.var_ty), _ground(t.body))
    return App(_ground(t.fun), _ground(t.arg))


def parse_term(thy: Theory, text: str, expect: Optional[Type] = None) -> Term:
    """Parse and fully type-check a term in the theory's notation."""
    toks = tokenize(text)
    p = PropParser(thy, toks)
    t = p.parse_prop()
    if p.peek().kind != "eof":
        p.error("trailing input")
    inferred = p.type_of(t, ())
    if expect is not None:
        t_unify(inferred, expect, "expected type")
    t = _ground(t)
    from .terms import typecheck
    typecheck(t, t_resolve(expect) if isinstance(expect, TMeta) else expect,
              signature=thy)
    return normalize(t)


def parse_prop(thy: Theory, text: str) -> Term:
    """Parse a meta-proposition (object formulae are wrapped in the judgement)."""
    toks = tokenize(text)
    p = PropParser(thy, toks)
    t = p.parse_prop()
    if p.peek().kind != "eof":
        p.error("trailing input")
    t = p.coerce_prop(t)
    p.type_of(t, ())
    t = _ground(t)
    from .terms import typecheck
    typecheck(t, PROP, signature=thy)
    return normalize(t)


# ---------------------------------------------------------------------------
# Theory files

def parse_type(thy: Theory, toks: List[Tok], pos: int) -> Tuple[Type, int]:
    def atom(pos):
        t = toks[pos]
        if t.val == "(":
            ty, pos = parse_type(thy, toks, pos + 1)
            if toks[pos].val != ")":
                raise SyntaxError_("expected ')'", toks[pos].line, toks[pos].col)
            return ty, pos + 1
        if t.val == "[":
            doms = []
            pos += 1
            while True:
                ty, pos = parse_type(thy, toks, pos)
                doms.append(ty)
                if toks[pos].val == ",":
                    pos += 1
                    continue
                break
            if toks[pos].val != "]":
                raise SyntaxError_("expected ']'", toks[pos].line, toks[pos].col)
            pos += 1
            if toks[pos].val != "=>":
                raise SyntaxError_("expected '=>'", toks[pos].line, toks[pos].col)
            cod, pos = parse_type(thy, toks, pos + 1)
            return mk_fun_type(doms, cod), pos
        if t.kind == "id":
            if t.val == "prop":
                return PROP, pos + 1
            if t.val in thy.declared_type_names():
                return Base(t.val), pos + 1
            raise SyntaxError_("unknown type %r" % t.val, t.line, t.col)
        raise SyntaxError_("expected a type", t.line, t.col)

    ty, pos = atom(pos)
    if toks[pos].val == "=>":
        cod, pos = parse_type(thy, toks, pos + 1)
        return Fun(ty, cod), pos
    return ty, pos


def parse_theory(text: str, parents: dict) -> Theory:
    """Parse a theory file; ``parents`` maps theory names to loaded theories."""
    toks = tokenize(text)
    pos = 0

    def tok():
        return toks[pos]

    def need(val):
        nonlocal pos
        t = toks[pos]
        if t.val != val:
            raise SyntaxError_("expected %r, found %r" % (val, t.val), t.line, t.col)
        pos += 1
        return t

    def need_kind(kind):
        nonlocal pos
        t = toks[pos]
        if t.kind != kind:
            raise SyntaxError_("expected %s, found %r" % (kind, t.val), t.line, t.col)
        pos += 1
        return t

    need("theory")
    name = need_kind("id").val
    parent = None
    if tok().val == "parent":
        pos += 1
        pname = need_kind("id").val
        parent = parents.get(pname)
        if parent is None:
            raise SyntaxError_("unknown parent theory %r" % pname,
                               tok().line, tok().col)
    thy = Theory(name, parent)

    section = None
    while tok().kind != "eof":
        t = tok()
        if t.kind == "id" and t.val in ("types", "consts", "notation", "rules",
                                        "defs", "end"):
            section = t.val
            pos += 1
            if section == "end":
                break
            continue
        if section == "types":
            thy.declare_type(need_kind("id").val)
            continue
        if section == "consts":
            names = [toks[pos].val]
            if toks[pos].kind not in ("id", "num"):
                raise SyntaxError_("expected constant name", t.line, t.col)
            pos += 1
            while tok().val == ",":
                pos += 1
                names.append(toks[pos].val)
                pos += 1
            # '::' arrives as ':' ':'
            need(":")
            need(":")
            if tok().kind == "str":
                sub = tokenize(tok().val)
                ty, spos = parse_type(thy, sub, 0)
                if sub[spos].kind != "eof":
                    raise SyntaxError_("trailing input in type", t.line, t.col)
                pos += 1
            else:
                ty, pos = parse_type(thy, toks, pos)
            for nm in names:
                thy.declare_const(nm, ty)
            continue
        if section == "notation":
            kind = need_kind("id").val
            if kind in ("infixl", "infixr", "prefix", "infixr_dom"):
                prec = int(need_kind("num").val)
                token = need_kind("str").val
                const = toks[pos].val
                pos += 1
                thy.declare_notation(NotationDecl(kind, token, const, prec))
            elif kind in ("binder", "binderdom"):
                token = need_kind("str").val
                const = toks[pos].val
                pos += 1
                thy.declare_notation(NotationDecl(kind, token, const, 0))
            else:
                raise SyntaxError_("unknown notation kind %r" % kind, t.line, t.col)
            continue
        if section in ("rules", "defs"):
            nm = need_kind("id").val
            stmt = need_kind("str").val
            prop = parse_prop(thy, stmt)
            if section == "rules":
                thy.add_axiom(nm, prop)
            else:
                thy.add_def(nm, prop)
            continue
        raise SyntaxError_("unexpected token %r outside any section" % t.val,
                           t.line, t.col)
    return thy.seal()


# ---------------------------------------------------------------------------
# Proof scripts

class Command:
    pass


class GoalCmd(Command):
    def __init__(self, thy_name, text, defs=(), prem_names=None, line=0):
        self.thy_name = thy_name
        self.text = text
        self.defs = tuple(defs)
        self.prem_names = prem_names   # list of names for stripped premises
        self.line = line

    def __repr__(self):
        return "GoalCmd(%s, %r)" % (self.thy_name, self.text)


class ByCmd(Command):
    def __init__(self, expr, src, line=0):
        self.expr = expr
        self.src = src
        self.line = line

    def __repr__(self):
        return "ByCmd(%s)" % (self.src,)


class BackCmd(Command):
    def __init__(self, line=0):
        self.line = line


class UndoCmd(Command):
    def __init__(self, line=0):
        self.line = line


class ValCmd(Command):
    def __init__(self, name, expr, src, line=0):
        self.name = name
        self.expr = expr
        self.src = src
        self.line = line

    def __repr__(self):
        return "ValCmd(%s = %s)" % (self.name, self.src)


# expression AST: ('name', s) ('int', n) ('str', s) ('list', [..])
#                 ('app', f, x) ('op', opname, lhs, rhs)

_BUILDER_OPS = {
    "addSIs", "addIs", "addSEs", "addEs", "addDs", "addSDs",
    "addsimps", "delsimps", "addcongs", "setsolver", "setnotelim",
    "sethypsubst", "setmp", "setswap", "THEN", "ORELSE", "APPEND", "RS",
}


class ScriptParser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    def peek(self, k=0):
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, val):
        t = self.next()
        if t.val != val:
            raise SyntaxError_("expected %r, found %r" % (val, t.val), t.line, t.col)
        return t

    def skip_semi(self):
        while self.peek().val == ";":
            self.next()

    def parse(self) -> List[Command]:
        cmds = []
        while self.peek().kind != "eof":
            self.skip_semi()
            if self.peek().kind == "eof":
                break
            t = self.peek()
            if t.val == "goal" or t.val == "goalw":
                cmds.append(self.parse_goal(None))
            elif t.val == "by":
                line = t.line
                self.next()
                self.expect("(")
                expr, src = self.parse_expr()
                self.expect(")")
                cmds.append(ByCmd(expr, src, line))
            elif t.val == "back":
                self.next()
                cmds.append(BackCmd(t.line))
            elif t.val == "undo":
                self.next()
                cmds.append(UndoCmd(t.line))
            elif t.val == "val":
                self.next()
                if self.peek().val == "[":
                    self.next()
                    names = [self.next().val]
                    while self.peek().val == ",":
                        self.next()
                        names.append(self.next().val)
                    self.expect("]")
                    self.expect("=")
                    cmds.append(self.parse_goal(names))
                else:
                    nm = self.next().val
                    self.expect("=")
                    expr, src = self.parse_expr()
                    cmds.append(ValCmd(nm, expr, src, t.line))
            else:
                raise SyntaxError_("unknown command %r" % t.val, t.line, t.col)
            self.skip_semi()
        return cmds

    def parse_goal(self, prem_names) -> GoalCmd:
        t = self.next()       # goal | goalw
        kind = t.val
        thy_name = self.next().val
        if self.peek().val == ".":
            self.next()
            self.next()       # 'thy' suffix
        defs = []
        if kind == "goalw":
            self.expect("[")
            if self.peek().val != "]":
                defs.append(self.next().val)
                while self.peek().val == ",":
                    self.next()
                    defs.append(self.next().val)
            self.expect("]")
        stmt = self.next()
        if stmt.kind != "str":
            raise SyntaxError_("expected quoted goal statement", stmt.line, stmt.col)
        return GoalCmd(thy_name, stmt.val, defs, prem_names, t.line)

    def parse_expr(self):
        start = self.pos
        e = self.expr_ops()
        src = self.render(start, self.pos)
        return e, src

    def render(self, a, b):
        parts = []
        for t in self.toks[a:b]:
            if t.kind == "str":
                parts.append('"%s"' % t.val)
            else:
                parts.append(str(t.val))
        return " ".join(parts)

    def expr_ops(self):
        left = self.expr_app()
        while self.peek().kind == "id" and self.peek().val in _BUILDER_OPS:
            op = self.next().val
            right = self.expr_app()
            left = ("op", op, left, right)
        return left

    def expr_app(self):
        atoms = [self.expr_atom()]
        while True:
            t = self.peek()
            if t.kind in ("id", "var") and t.val not in _BUILDER_OPS and \
                    t.val not in (")", "]", ";", ",") and t.kind != "eof":
                if t.val in ("goal", "goalw", "by", "back", "val", "undo"):
                    break
                atoms.append(self.expr_atom())
            elif t.kind == "num" or t.val == "(" or t.val == "[" or t.kind == "str":
                atoms.append(self.expr_atom())
            else:
                break
        e = atoms[0]
        for a in atoms[1:]:
            e = ("app", e, a)
        return e

    def expr_atom(self):
        t = self.next()
        if t.kind == "num":
            return ("int", int(t.val))
        if t.kind == "str":
            return ("str", t.val)
        if t.val == "(":
            if self.peek().val == ")":
                self.next()
                return ("unit",)
            e = self.expr_ops()
            self.expect(")")
            return e
        if t.val == "[":
            items = []
            if self.peek().val != "]":
                items.append(self.expr_ops())
                while self.peek().val == ",":
                    self.next()
                    items.append(self.expr_ops())
            self.expect("]")
            return ("list", items)
        if t.kind == "id":
            return ("name", t.val)
        raise SyntaxError_("unexpected %r in expression" % t.val, t.line, t.col)


def parse_script(text: str) -> List[Command]:
    return ScriptParser(text).parse()
