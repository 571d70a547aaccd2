"""Interactive sessions: the goal/by/back/result discipline, a script
interpreter shared by the batch runner, REPL and protocol server, and
theory loading."""

from __future__ import annotations

import importlib.resources as resources
import pathlib
from typing import Dict, List, Optional

from . import kernel as K
from . import tactics as T
from . import classical as C
from .printer import Printer
from .syntax import (
    GoalCmd, ByCmd, BackCmd, UndoCmd, ValCmd, SyntaxError_, parse_prop,
    parse_script, parse_theory,
)
from .theory import Theory


class ScriptError(Exception):
    def __init__(self, msg, line=None, transcript=None):
        super().__init__(("line %s: " % line if line else "") + msg)
        self.line = line
        self.transcript = transcript


class TacticFailed(ScriptError):
    pass


class ResultWithSubgoals(ScriptError):
    pass


THEORY_ORDER = ["IFOL", "FOL", "ZF", "Perm", "Nat", "Ramsey"]


def theory_dir() -> pathlib.Path:
    return pathlib.Path(__file__).parent / "theories"


def proofs_dir() -> pathlib.Path:
    return pathlib.Path(__file__).parent / "proofs"


def load_theories(extra_files=()) -> Dict[str, Theory]:
    thys: Dict[str, Theory] = {}
    for name in THEORY_ORDER:
        text = (theory_dir() / ("%s.thy" % name)).read_text()
        thys[name] = parse_theory(text, thys)
    for path in extra_files:
        text = pathlib.Path(path).read_text()
        thy = parse_theory(text, thys)
        thys[thy.name] = thy
    return thys


class Proof:
    """One active backward proof."""

    def __init__(self, thy, state, premises, prem_names, goal_text):
        self.thy = thy
        self.state = state
        self.premises = premises          # list of premise Terms (to discharge)
        self.prem_names = prem_names
        self.goal_text = goal_text
        self.level = 0
        self.undo_stack = []              # (state, level, pending-stream)
        self.pending = None               # iterator of alternatives for `back`


class Session:
    def __init__(self, theories: Optional[Dict[str, Theory]] = None,
                 store: Optional[dict] = None, budget: Optional[int] = None,
                 trace_unify: bool = False):
        self.theories = theories if theories is not None else load_theories()
        self.store = store if store is not None else {}
        self.proof: Optional[Proof] = None
        self.transcript: List[str] = []
        self.budget = budget
        self.trace_unify = trace_unify
        self.last_trace: List[tuple] = []

    # -- output --------------------------------------------------------------

    def emit(self, text: str):
        self.transcript.append(text)

    def state_block(self) -> str:
        p = self.proof
        pr = Printer(p.thy)
        return pr.state(p.state, p.level)

    # -- name lookup ---------------------------------------------------------

    def lookup(self, name: str):
        if name in self.store:
            return self.store[name]
        if name in self.theories:
            return self.theories[name]
        # axioms of any loaded theory (latest theories shadow earlier)
        for tname in reversed(THEORY_ORDER):
            thy = self.theories.get(tname)
            if thy is not None and thy.axiom_term(name) is not None:
                return K.axiom(thy, name)
        builtin = _BUILTINS.get(name)
        if builtin is not None:
            return builtin
        raise ScriptError("unknown name %r" % name)

    def thm(self, name: str) -> K.Theorem:
        v = self.lookup(name)
        if not isinstance(v, K.Theorem):
            raise ScriptError("%r is not a theorem" % name)
        return v

    # -- commands ------------------------------------------------------------

    def cmd_goal(self, cmd: GoalCmd):
        thy = self.theories.get(cmd.thy_name)
        if thy is None:
            raise ScriptError("unknown theory %r" % cmd.thy_name, cmd.line)
        try:
            phi = parse_prop(thy, cmd.text)
        except Exception as e:
            raise ScriptError("goal does not parse: %s" % e, cmd.line)
        defs = [self.thm(d) for d in cmd.defs] if cmd.defs else []
        if cmd.prem_names is not None:
            state, prems = K.goal_with_premises(thy, phi)
            if len(prems) < len(cmd.prem_names):
                raise ScriptError("goal has %d premises, %d names given"
                                  % (len(prems), len(cmd.prem_names)), cmd.line)
            premises = [p.prop for p in prems]
            if defs:
                prems = [K.unfold(p, defs) for p in prems]
            for nm, p in zip(cmd.prem_names, prems):
                self.store[nm] = p
        else:
            state = K.trivial(thy, phi)
            premises = []
        if defs:
            state = K.unfold_goals(state, defs)
        self.proof = Proof(thy, state, premises, cmd.prem_names, cmd.text)
        self.emit(self.state_block())

    def cmd_by(self, cmd: ByCmd):
        if self.proof is None:
            raise ScriptError("no goal", cmd.line)
        tac = self.eval_expr(cmd.expr)
        if not callable(tac):
            raise ScriptError("by: expression is not a tactic", cmd.line)
        p = self.proof
        stream = iter(tac(p.state))
        first = next(stream, None)
        if first is None:
            raise TacticFailed("by (%s) failed\n%s" % (cmd.src, self.state_block()),
                               cmd.line, self.transcript)
        p.undo_stack.append((p.state, p.level, p.pending))
        p.state = first
        p.pending = stream
        p.level += 1
        self.emit(self.state_block())

    def cmd_back(self, cmd: BackCmd):
        p = self.proof
        if p is None or p.pending is None:
            raise ScriptError("back: no alternatives", cmd.line)
        nxt = next(p.pending, None)
        if nxt is None:
            raise TacticFailed("back: no more alternatives", cmd.line,
                               self.transcript)
        p.state = nxt
        self.emit(self.state_block())

    def cmd_undo(self, cmd: UndoCmd):
        p = self.proof
        if p is None or not p.undo_stack:
            raise ScriptError("nothing to undo", cmd.line)
        p.state, p.level, p.pending = p.undo_stack.pop()
        self.emit(self.state_block())

    def result(self) -> K.Theorem:
        p = self.proof
        if p is None:
            raise ScriptError("result: no proof")
        if p.state.nprems() != 0:
            raise ResultWithSubgoals(
                "result: %d subgoal(s) remain" % p.state.nprems(), None,
                self.transcript)
        thm = K.finish(p.state, p.premises)
        return K.generalize(thm)

    def cmd_val(self, cmd: ValCmd):
        v = self.eval_expr(cmd.expr)
        self.store[cmd.name] = v
        if isinstance(v, K.Theorem):
            pr = Printer(self.proof.thy if self.proof else
                         self.theories[THEORY_ORDER[-1]])
            self.emit("val %s = %s" % (cmd.name, pr.term(v.prop)))

    def run(self, commands):
        for cmd in commands:
            if isinstance(cmd, GoalCmd):
                self.emit(_echo_goal(cmd))
                self.cmd_goal(cmd)
            elif isinstance(cmd, ByCmd):
                self.emit("by (%s);" % cmd.src)
                self.cmd_by(cmd)
            elif isinstance(cmd, BackCmd):
                self.emit("back;")
                self.cmd_back(cmd)
            elif isinstance(cmd, UndoCmd):
                self.emit("undo;")
                self.cmd_undo(cmd)
            elif isinstance(cmd, ValCmd):
                self.cmd_val(cmd)
            else:
                raise ScriptError("unhandled command %r" % cmd)

    def run_script(self, text: str):
        self.run(parse_script(text))

    # -- expression evaluation -------------------------------------------

    def eval_expr(self, e):
        kind = e[0]
        if kind == "name":
            return self.lookup(e[1])
        if kind == "int":
            return e[1]
        if kind == "str":
            return e[1]
        if kind == "unit":
            return ()
        if kind == "list":
            return [self.eval_expr(x) for x in e[1]]
        if kind == "app":
            f = self.eval_expr(e[1])
            if f is _RESULT_MARKER:
                return self.result()
            x = self.eval_expr(e[2])
            if not callable(f):
                raise ScriptError("cannot apply non-function in tactic expression")
            return f(x)
        if kind == "op":
            op = e[1]
            lhs = self.eval_expr(e[2])
            rhs = self.eval_expr(e[3])
            return _apply_builder(op, lhs, rhs)
        raise ScriptError("bad expression %r" % (e,))


def _echo_goal(cmd: GoalCmd) -> str:
    defs = " [%s]" % ",".join(cmd.defs) if cmd.defs else ""
    word = "goalw" if cmd.defs else "goal"
    prefix = ""
    if cmd.prem_names is not None:
        prefix = "val [%s] = " % ",".join(cmd.prem_names)
    return '%s%s %s.thy%s "%s";' % (prefix, word, cmd.thy_name, defs, cmd.text)


_RESULT_MARKER = object()


def _apply_builder(op, lhs, rhs):
    from . import simplifier as S
    if op == "addSIs":
        return lhs.add_safe_intros(rhs)
    if op == "addSEs":
        return lhs.add_safe_elims(rhs)
    if op == "addIs":
        return lhs.add_unsafe_intros(rhs)
    if op == "addEs":
        return lhs.add_unsafe_elims(rhs)
    if op == "addSDs":
        return lhs.add_safe_dests(rhs)
    if op == "addDs":
        return lhs.add_unsafe_dests(rhs)
    if op == "addsimps":
        return lhs.add_simps(rhs)
    if op == "delsimps":
        return lhs.del_simps(rhs)
    if op == "addcongs":
        return lhs.add_congs(rhs)
    if op == "setsolver":
        return lhs.set_solver(rhs)
    if op == "setnotelim":
        return lhs.set_not_elim(rhs)
    if op == "setmp":
        return lhs.set_mp(rhs)
    if op == "setswap":
        return lhs.set_swap(rhs)
    if op == "sethypsubst":
        return lhs.set_hyp_subst(rhs)
    if op == "THEN":
        return T.then_(lhs, rhs)
    if op == "ORELSE":
        return T.orelse(lhs, rhs)
    if op == "APPEND":
        return T.append_(lhs, rhs)
    if op == "RS":
        return K.rs(lhs, rhs)
    raise ScriptError("unknown operator %r" % op)


def _mk_builtins():
    from . import simplifier as S

    def resolve_tac(rules):
        return lambda i: T.resolve_tac(rules, i)

    def eresolve_tac(rules):
        return lambda i: T.eresolve_tac(rules, i)

    def dresolve_tac(rules):
        return lambda i: T.dresolve_tac(rules, i)

    def fast_tac(cs):
        return lambda i: C.fast_tac(cs, i)

    def best_tac(cs):
        return lambda i: C.best_tac(cs, i)

    def simp_tac(ss):
        return lambda i: S.simp_tac(ss, i)

    def asm_simp_tac(ss):
        return lambda i: S.asm_simp_tac(ss, i)

    def rewtac(d):
        def tac(state):
            yield K.unfold_goals(state, [d])
        return tac

    def fold_tac(d):
        def tac(state):
            yield K.fold_defs(state, [d])
        return tac

    def REPEAT(t):
        return T.repeat(t)

    def REPEAT1(t):
        return T.repeat1(t)

    def DETERM(t):
        def tac(state):
            first = next(iter(t(state)), None)
            if first is not None:
                yield first
        return tac

    def TRY(t):
        return T.try_(t)

    def ALLGOALS(tf):
        # tf: int -> tactic; apply to every subgoal, last first
        def tac(state):
            n = state.nprems()
            cur = T.all_tac
            for i in range(n, 0, -1):
                cur = T.then_(cur, tf(i))
            yield from cur(state)
        return tac

    def make_elim(r):
        return K.make_elim(r)

    return {
        "resolve_tac": resolve_tac,
        "eresolve_tac": eresolve_tac,
        "dresolve_tac": dresolve_tac,
        "assume_tac": T.assume_tac,
        "eq_assume_tac": T.eq_assume_tac,
        "safe_tac": C.safe_tac,
        "safe_step_tac": lambda cs: lambda i: C.safe_step_tac(cs, i),
        "fast_tac": fast_tac,
        "best_tac": best_tac,
        "simp_tac": simp_tac,
        "asm_simp_tac": asm_simp_tac,
        "rewtac": rewtac,
        "fold_tac": fold_tac,
        "REPEAT": REPEAT,
        "REPEAT1": REPEAT1,
        "DETERM": DETERM,
        "TRY": TRY,
        "ALLGOALS": ALLGOALS,
        "make_elim": make_elim,
        "res_inst_tac": T.res_inst_tac,
        "eres_inst_tac": T.eres_inst_tac,
        "dres_inst_tac": T.dres_inst_tac,
        "empty_cs": C.empty_cs,
        "result": _RESULT_MARKER,
        "all_tac": lambda: T.all_tac,
    }


_BUILTINS = _mk_builtins()
