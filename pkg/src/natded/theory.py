"""Theories: named, immutable collections of type/constant declarations,
notation, axioms and definitions, with an ancestry chain."""

from __future__ import annotations

from typing import Optional

from .terms import (
    Const, Term, Type, TypeError_, consts_of, frees_of, strip_app, strip_fun_type,
)


class TheoryError(Exception):
    pass


class DuplicateConstant(TheoryError):
    pass


class UndeclaredConstant(TheoryError):
    pass


class NotADefinition(TheoryError):
    pass


class NotationDecl:
    """One concrete-syntax declaration.

    kind: 'infixl' | 'infixr' | 'binder' | 'binderdom' | 'prefix'
    token: concrete token; const: underlying constant name; prec: precedence.
    """

    __slots__ = ("kind", "token", "const", "prec")

    def __init__(self, kind: str, token: str, const: str, prec: int = 0):
        self.kind = kind
        self.token = token
        self.const = const
        self.prec = prec

    def __repr__(self):
        return "NotationDecl(%s %r %s %d)" % (self.kind, self.token, self.const, self.prec)


class Theory:
    """Immutable once constructed; extensions create children."""

    def __init__(self, name: str, parent: Optional["Theory"] = None):
        self.name = name
        self.parent = parent
        self.types: list = []
        self.consts: dict = {}
        self.notation: list = []
        self.axioms: dict = {}
        self.defs: set = set()
        self._sealed = False

    # -- construction (before sealing) --------------------------------------

    def declare_type(self, name: str):
        self._check_open()
        self.types.append(name)

    def declare_const(self, name: str, ty: Type):
        self._check_open()
        if self.const_type(name) is not None:
            raise DuplicateConstant("constant %r already declared" % name)
        self.consts[name] = ty

    def declare_notation(self, decl: NotationDecl):
        self._check_open()
        self.notation.append(decl)

    def add_axiom(self, name: str, prop: Term):
        self._check_open()
        if name in self.axioms:
            raise TheoryError("duplicate axiom name %r" % name)
        for c in consts_of(prop):
            if not self._is_meta(c.name) and self.const_type(c.name) is None:
                raise UndeclaredConstant("axiom %s uses undeclared constant %r" % (name, c.name))
        self.axioms[name] = prop

    def add_def(self, name: str, prop: Term):
        """A definition c(x1,..,xn) == rhs; checks the definitional invariants."""
        self._check_open()
        lhs, rhs = _dest_def(prop)
        head, args = strip_app(lhs)
        if head.__class__ is not Const:
            raise NotADefinition("definition %s: lhs head is not a constant" % name)
        seen = set()
        for a in args:
            if a.__class__.__name__ != "Free" or a.name in seen:
                raise NotADefinition(
                    "definition %s: lhs arguments must be distinct variables" % name)
            seen.add(a.name)
        if any(c.name == head.name for c in consts_of(rhs)):
            raise NotADefinition(
                "definition %s: defined constant occurs in its own rhs" % name)
        extra = set(frees_of(rhs)) - seen
        if extra:
            raise NotADefinition(
                "definition %s: rhs has hidden parameters %s" % (name, sorted(extra)))
        self.add_axiom(name, prop)
        self.defs.add(name)

    def seal(self):
        self._sealed = True
        return self

    def _check_open(self):
        if self._sealed:
            raise TheoryError("theory %s is sealed; extend it with a child" % self.name)

    @staticmethod
    def _is_meta(name: str) -> bool:
        return name in ("==>", "all", "==")

    # -- queries -------------------------------------------------------------

    def const_type(self, name: str) -> Optional[Type]:
        thy = self
        while thy is not None:
            ty = thy.consts.get(name)
            if ty is not None:
                return ty
            thy = thy.parent
        return None

    def get(self, name: str):
        """Declared constant type, for typecheck's signature protocol."""
        return self.const_type(name)

    def axiom_term(self, name: str) -> Optional[Term]:
        thy = self
        while thy is not None:
            t = thy.axioms.get(name)
            if t is not None:
                return t
            thy = thy.parent
        return None

    def axiom_owner(self, name: str) -> Optional["Theory"]:
        thy = self
        while thy is not None:
            if name in thy.axioms:
                return thy
            thy = thy.parent
        return None

    def is_def(self, name: str) -> bool:
        thy = self
        while thy is not None:
            if name in thy.defs:
                return True
            thy = thy.parent
        return False

    def ancestry(self) -> list:
        out = []
        thy = self
        while thy is not None:
            out.append(thy)
            thy = thy.parent
        return out

    def extends(self, other: "Theory") -> bool:
        thy = self
        while thy is not None:
            if thy is other:
                return True
            thy = thy.parent
        return False

    def all_notation(self) -> list:
        out = []
        for thy in reversed(self.ancestry()):
            out.extend(thy.notation)
        return out

    def all_axiom_names(self) -> list:
        out = []
        for thy in reversed(self.ancestry()):
            out.extend(thy.axioms.keys())
        return out

    def declared_type_names(self) -> set:
        out = set()
        for thy in self.ancestry():
            out.update(thy.types)
        return out

    def __repr__(self):
        return "Theory(%s)" % self.name


def join_theories(a: Theory, b: Theory) -> Theory:
    if a.extends(b):
        return a
    if b.extends(a):
        return b
    raise TheoryError("theories %s and %s do not share an ancestry" % (a.name, b.name))


def _dest_def(prop: Term):
    """Strip any outer meta-quantifiers and split a meta-equality."""
    from .kernel import strip_meta_all_frees, dest_meta_eq  # circular-safe at call time
    body = strip_meta_all_frees(prop)
    lhs, rhs = dest_meta_eq(body)
    return lhs, rhs
