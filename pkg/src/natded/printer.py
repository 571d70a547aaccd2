"""Pretty printer: renders terms in the concrete notation of the current
theory, collapsing product/function-space abbreviations, set-builder braces
and finite-set chains, and laying out proof states as numbered subgoals."""

from __future__ import annotations

from typing import List, Optional

from .terms import (
    Abs, App, Bound, Const, Free, ITYPE, Term, Var, occurs_bound, lift,
    strip_app,
)


def _guess_dom(t: Term):
    # display-only abstraction; the variable type is never shown
    return ITYPE
from .theory import Theory
from . import kernel as K


class Printer:
    def __init__(self, thy: Theory):
        self.thy = thy
        self.infix = {}
        self.prefix = {}
        self.binder = {}
        self.binderdom = {}
        self.dom_infix = {}
        for d in thy.all_notation():
            if d.kind in ("infixl", "infixr"):
                self.infix[d.const] = (d.token, d.prec, d.kind[-1])
            elif d.kind == "infixr_dom":
                self.dom_infix[d.const] = (d.token, d.prec)
            elif d.kind == "prefix":
                self.prefix[d.const] = (d.token, d.prec)
            elif d.kind == "binder":
                self.binder.setdefault(d.const, d.token)
            elif d.kind == "binderdom":
                self.binderdom.setdefault(d.const, d.token)

    # ------------------------------------------------------------------
    def term(self, t: Term, names: Optional[List[str]] = None) -> str:
        return self._pp(t, 0, names or [])

    def _fresh(self, hint: str, names: List[str]) -> str:
        base = hint or "x"
        cand = base
        suffix = "abcdefghijklmnopqrstuvwxyz"
        k = 0
        while cand in names:
            cand = base + suffix[k % 26] * (1 + k // 26)
            k += 1
        return cand

    def _pp(self, t: Term, prec: int, names: List[str]) -> str:
        s = self._try_special(t, prec, names)
        if s is not None:
            return s
        head, args = strip_app(t)
        cls = head.__class__

        if cls is Const:
            nm = head.name
            if nm == "Trueprop" and len(args) == 1:
                return self._pp(args[0], prec, names)
            if nm == "==>":
                return self._pp_implication(t, prec, names)
            if nm == "all" and len(args) == 1 and args[0].__class__ is Abs:
                return self._pp_meta_all(t, prec, names)
            if nm == "==" and len(args) == 2:
                lhs = self._pp(args[0], 4, names)
                rhs = self._pp(args[1], 4, names)
                return self._paren("%s == %s" % (lhs, rhs), 3, prec)
            if nm in self.infix and len(args) == 2:
                tok, p, assoc = self.infix[nm]
                lp = p if assoc == "l" else p + 1
                rp = p + 1 if assoc == "l" else p
                s = "%s %s %s" % (self._pp(args[0], lp, names), tok,
                                  self._pp(args[1], rp, names))
                return self._paren(s, p, prec)
            if nm in self.prefix and len(args) == 1:
                tok, p = self.prefix[nm]
                s = "%s %s" % (tok, self._pp(args[0], p, names))
                return self._paren(s, p, prec)
            if nm in self.dom_infix and len(args) == 2:
                arg1 = self._eta_abs(args[1])
                if arg1 is not None and not occurs_bound(arg1.body, 0):
                    tok, p = self.dom_infix[nm]
                    body = lift(arg1.body, -1, 1)
                    s = "%s %s %s" % (self._pp(args[0], p + 1, names), tok,
                                      self._pp(body, p, names))
                    return self._paren(s, p, prec)
            if nm in self.binderdom and len(args) == 2:
                a = self._eta_abs(args[1])
                if a is not None:
                    tok = self.binderdom[nm]
                    x = self._fresh(a.hint, names)
                    s = "%s %s:%s. %s" % (tok, x, self._pp(args[0], 51, names),
                                          self._pp(a.body, 0, names + [x]))
                    return self._paren(s, 0, prec, force=prec > 0)
            if nm in self.binder and len(args) == 1:
                a = self._eta_abs(args[0])
                if a is not None:
                    tok = self.binder[nm]
                    xs = []
                    names2 = list(names)
                    body = None
                    cur_t = t
                    while True:
                        h2, a2 = strip_app(cur_t)
                        if (h2.__class__ is Const and h2.name == nm
                                and len(a2) == 1):
                            ab = self._eta_abs(a2[0])
                            if ab is not None:
                                x = self._fresh(ab.hint, names2)
                                xs.append(x)
                                names2.append(x)
                                body = ab.body
                                cur_t = ab.body
                                continue
                        break
                    s = "%s %s. %s" % (tok, " ".join(xs),
                                       self._pp(body, 0, names2))
                    return self._paren(s, 0, prec, force=prec > 0)
        if not args:
            return self._pp_atomhead(head, names)
        fn = self._pp_atomhead(head, names) if cls is not Abs \
            else "(%s)" % self._pp(head, 0, names)
        return "%s(%s)" % (fn, ",".join(self._pp(a, 0, names) for a in args))

    def _eta_abs(self, t: Term) -> Optional[Abs]:
        """View a term of function type as an abstraction for binder display,
        eta-expanding when necessary."""
        if t.__class__ is Abs:
            return t
        if t.__class__ in (Const, Free, Var, App, Bound):
            return Abs("x", _guess_dom(t), App(lift(t, 1), Bound(0)))
        return None

    def _pp_atomhead(self, head: Term, names: List[str]) -> str:
        cls = head.__class__
        if cls is Const or cls is Free:
            return head.name
        if cls is Var:
            return "?%s" % head.name
        if cls is Bound:
            if head.index < len(names):
                return names[len(names) - 1 - head.index]
            return "B.%d" % head.index
        if cls is Abs:
            x = self._fresh(head.hint, names)
            return "(%%%s. %s)" % (x, self._pp(head.body, 0, names + [x]))
        return repr(head)

    def _paren(self, s: str, p: int, prec: int, force: Optional[bool] = None) -> str:
        need = p < prec if force is None else force
        return "(%s)" % s if need else s

    def _pp_implication(self, t: Term, prec: int, names: List[str]) -> str:
        prems, concl = K.strip_implies(t)
        if not prems:
            return self._pp(t, prec, names)
        if len(prems) == 1:
            s = "%s ==> %s" % (self._pp(prems[0], 2, names),
                               self._pp(concl, 1, names))
        else:
            s = "[| %s |] ==> %s" % (
                "; ".join(self._pp(p, 0, names) for p in prems),
                self._pp(concl, 1, names))
        return self._paren(s, 1, prec)

    def _pp_meta_all(self, t: Term, prec: int, names: List[str]) -> str:
        xs = []
        names2 = list(names)
        while True:
            d = K.dest_all(t)
            if d is None:
                break
            hint, ty, body = d
            x = self._fresh(hint, names2)
            xs.append(x)
            names2.append(x)
            t = body
        s = "!!%s. %s" % (" ".join(xs), self._pp(t, 0, names2))
        return self._paren(s, 0, prec, force=prec > 0)

    # -- special built-in notations ------------------------------------
    def _try_special(self, t: Term, prec: int, names: List[str]) -> Optional[str]:
        head, args = strip_app(t)
        if head.__class__ is not Const:
            return None
        nm = head.name
        if nm == "cons" and len(args) == 2:
            items = []
            cur = t
            while True:
                h, a = strip_app(cur)
                if h.__class__ is Const and h.name == "cons" and len(a) == 2:
                    items.append(a[0])
                    cur = a[1]
                else:
                    break
            if h.__class__ is Const and h.name == "0" and not a:
                return "{%s}" % ",".join(self._pp(x, 0, names) for x in items)
            return None
        if nm == "Pair" and len(args) == 2:
            items = [args[0]]
            cur = args[1]
            while True:
                h, a = strip_app(cur)
                if h.__class__ is Const and h.name == "Pair" and len(a) == 2:
                    items.append(a[0])
                    cur = a[1]
                else:
                    break
            items.append(cur)
            return "<%s>" % ",".join(self._pp(x, 0, names) for x in items)
        if nm == "Collect" and len(args) == 2:
            a = self._eta_abs(args[1])
            if a is None:
                return None
            x = self._fresh(a.hint, names)
            return "{%s: %s . %s}" % (x, self._pp(args[0], 0, names),
                                      self._pp(a.body, 0, names + [x]))
        if nm == "Replace" and len(args) == 2:
            a = self._eta_abs(args[1])
            if a is None:
                return None
            inner = self._eta_abs(a.body)
            if inner is None:
                return None
            x = self._fresh(a.hint, names)
            y = self._fresh(inner.hint if inner.hint != "x" else "y", names + [x])
            return "{%s . %s: %s, %s}" % (
                y, x, self._pp(args[0], 0, names),
                self._pp(inner.body, 0, names + [x, y]))
        if nm == "RepFun" and len(args) == 2:
            a = self._eta_abs(args[1])
            if a is None:
                return None
            x = self._fresh(a.hint, names)
            return "{%s . %s: %s}" % (self._pp(a.body, 0, names + [x]), x,
                                      self._pp(args[0], 0, names))
        return None

    # ------------------------------------------------------------------
    def subgoal(self, sg: Term) -> str:
        params, hyps, concl = K.dest_subgoal(sg)
        names: List[str] = []
        shown = []
        for hint, ty in params:
            x = self._fresh(hint, names)
            names.append(x)
            shown.append(x)
        body_parts = []
        if hyps:
            if len(hyps) == 1:
                body_parts.append("%s ==>" % self._pp(hyps[0], 2, names))
            else:
                body_parts.append("[| %s |] ==>" %
                                  "; ".join(self._pp(h, 0, names) for h in hyps))
        body_parts.append(self._pp(concl, 1, names))
        body = " ".join(body_parts)
        if shown:
            return "!!%s. %s" % (" ".join(shown), body)
        return body

    def state(self, state, level: Optional[int] = None) -> str:
        """Render a proof state in session format: main goal then subgoals."""
        lines = []
        if level is not None:
            lines.append("Level %d" % level)
        lines.append(self.term(state.concl()))
        sgs = state.subgoals()
        if not sgs:
            lines.append("No subgoals!")
        else:
            for idx, sg in enumerate(sgs, start=1):
                lines.append("%d. %s" % (idx, self.subgoal(sg)))
        return "\n".join(lines)


def print_term(thy: Theory, t: Term) -> str:
    return Printer(thy).term(t)


def print_state(thy: Theory, state, level: Optional[int] = None) -> str:
    return Printer(thy).state(state, level)
