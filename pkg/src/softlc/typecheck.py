"""Syntax-directed type checker for marker-annotated terms.

The sequent rules are read bottom-up with a usage-tracked context instead
of explicit splitting: a variable consumed while checking the function of
an application is no longer available to the argument.  Quantifier and
fix-point steps are supplied by the gen/@/fold/unfold markers; there is no
inference.

The two readings of `let u be !x in v` are told apart by where x occurs in
v.  All occurrences at depth 0 (any number): multiplexing, x enters the
context at the unbanged type with unlimited depth-0 uses.  All occurrences
at depth 1 with v a chain of lets ending in !t: promotion, x is armed and
becomes available (once) inside the final bang.  Anything else has no rule
and is a depth violation.  Inside a bang only armed variables are visible;
every other variable in scope is out of reach there.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import formulas as fo
from .errors import (DepthViolation, ForallEscape, LinearityViolation,
                     TypeCheckError, TypeMismatch, UnknownVariable)
from .formulas import Formula, alpha_eq_type, free_tvars, show_type, subst_type
from .parser import SourceModule, link_module
from .syntax import (Abs, App, Bang, Case, Fold, Gen, Inl, Inr, Inst,
                     LetBang, LetPair, Pair, Path, PlainLet, Term, Unfold,
                     Unit, Var)


@dataclass(frozen=True, slots=True)
class ContextEntry:
    name: str
    formula: Formula
    state: str = "unused"  # unused | used | promoted


@dataclass(frozen=True, slots=True)
class Context:
    entries: tuple[ContextEntry, ...] = ()

    @staticmethod
    def of(*pairs: tuple[str, Formula]) -> "Context":
        return Context(tuple(ContextEntry(n, f) for n, f in pairs))

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True, slots=True)
class Judgement:
    context: Context
    term: Term
    formula: Formula


class _Slot:
    __slots__ = ("name", "formula", "kind", "uses", "promoted", "origin")

    def __init__(self, name: str, formula: Formula, kind: str,
                 origin: "_Slot | None" = None):
        self.name = name
        self.formula = formula
        self.kind = kind  # linear | mplex | armed
        self.uses = 0
        self.promoted = False
        self.origin = origin


class _Env:
    __slots__ = ("slots", "parent")

    def __init__(self, slots: list[_Slot], parent: "_Env | None"):
        self.slots = slots
        self.parent = parent

    def find(self, name: str) -> _Slot | None:
        for slot in reversed(self.slots):
            if slot.name == name:
                return slot
        return None

    def find_outward(self, name: str) -> bool:
        env = self.parent
        while env is not None:
            if env.find(name) is not None:
                return True
            env = env.parent
        return False


def _occ_depths(t: Term, x: str, d: int = 0) -> list[int]:
    """Bang-depths of the free occurrences of x in t."""
    match t:
        case Var(name):
            return [d] if name == x else []
        case Abs(param=p, body=b):
            return [] if p == x else _occ_depths(b, x, d)
        case App(fun=f, arg=a):
            return _occ_depths(f, x, d) + _occ_depths(a, x, d)
        case Bang(body=b):
            return _occ_depths(b, x, d + 1)
        case LetBang(subject=s, binder=p, body=b) | \
                PlainLet(subject=s, binder=p, body=b):
            out = _occ_depths(s, x, d)
            if p != x:
                out += _occ_depths(b, x, d)
            return out
        case Pair(left=l, right=r):
            return _occ_depths(l, x, d) + _occ_depths(r, x, d)
        case LetPair(subject=s, left_name=l, right_name=r, body=b):
            out = _occ_depths(s, x, d)
            if x not in (l, r):
                out += _occ_depths(b, x, d)
            return out
        case Inl(body=b) | Inr(body=b):
            return _occ_depths(b, x, d)
        case Case(subject=s, left_name=l, left_branch=b1,
                  right_name=r, right_branch=b2):
            out = _occ_depths(s, x, d)
            if l != x:
                out += _occ_depths(b1, x, d)
            if r != x:
                out += _occ_depths(b2, x, d)
            return out
        case Unit():
            return []
        case Gen(body=b) | Inst(body=b) | Fold(body=b) | Unfold(body=b):
            return _occ_depths(b, x, d)
    raise AssertionError(f"unhandled node {type(t).__name__}")


def _promotion_tail(v: Term) -> bool:
    while isinstance(v, LetBang):
        v = v.body
    return isinstance(v, Bang)


class _Checker:
    def __init__(self):
        pass

    # -- context plumbing ------------------------------------------------

    def _use(self, env: _Env, name: str, path: Path) -> Formula:
        slot = env.find(name)
        if slot is None:
            if env.find_outward(name):
                raise DepthViolation(
                    path, f"variable {name} is out of reach under !")
            raise UnknownVariable(path, f"unbound variable {name}")
        if slot.kind == "armed":
            raise DepthViolation(
                path, f"promoted variable {name} may only appear under !")
        if slot.kind == "linear" and slot.uses >= 1:
            raise LinearityViolation(
                path, f"variable {name} used more than once")
        slot.uses += 1
        return slot.formula

    @staticmethod
    def _snapshot(env: _Env) -> list[tuple[int, bool]]:
        return [(s.uses, s.promoted) for s in env.slots]

    @staticmethod
    def _restore(env: _Env, snap: list[tuple[int, bool]]) -> None:
        for slot, (uses, promoted) in zip(env.slots, snap):
            slot.uses = uses
            slot.promoted = promoted

    @staticmethod
    def _merge(env: _Env, snap_a: list[tuple[int, bool]]) -> None:
        # current state is branch B; snap_a is branch A's final state
        for slot, (uses, promoted) in zip(env.slots, snap_a):
            slot.uses = max(slot.uses, uses)
            slot.promoted = slot.promoted or promoted

    # -- banged scopes ---------------------------------------------------

    def _enter_bang(self, env: _Env) -> _Env:
        copies = [_Slot(s.name, s.formula, "linear", origin=s)
                  for s in env.slots if s.kind == "armed"]
        return _Env(copies, parent=env)

    @staticmethod
    def _exit_bang(child: _Env, path: Path) -> None:
        for copy in child.slots:
            if copy.uses:
                if copy.origin.uses:
                    raise LinearityViolation(
                        path, f"promoted variable {copy.name} consumed by "
                              f"two different ! scopes")
                copy.origin.uses += 1

    # -- synthesis -------------------------------------------------------

    def synth(self, t: Term, env: _Env, path: Path) -> Formula:
        match t:
            case Var(name):
                return self._use(env, name, path)
            case Unit():
                return fo.ONE
            case Abs(param=x, body=b, ann=ann):
                if ann is None:
                    raise TypeCheckError(
                        path, f"binder {x} needs a type annotation here")
                env.slots.append(_Slot(x, ann, "linear"))
                result = self.synth(b, env, path + (0,))
                env.slots.pop()
                return fo.Lolli(ann, result)
            case App(fun=f, arg=a):
                fun_ty = self.synth(f, env, path + (0,))
                if not isinstance(fun_ty, fo.Lolli):
                    raise TypeMismatch(path + (0,), "a function type (_ -o _)",
                                       fun_ty)
                self.check(a, fun_ty.left, env, path + (1,))
                return fun_ty.right
            case Pair(left=l, right=r):
                return fo.Tensor(self.synth(l, env, path + (0,)),
                                 self.synth(r, env, path + (1,)))
            case Inl() | Inr():
                raise TypeCheckError(
                    path, "sum injection needs an expected type "
                          "(use it in a checked position or under fold)")
            case LetPair(subject=s, left_name=x, right_name=y, body=b):
                subj = self.synth(s, env, path + (0,))
                if not isinstance(subj, fo.Tensor):
                    raise TypeMismatch(path + (0,), "a pair type (_ * _)",
                                       subj)
                env.slots.append(_Slot(x, subj.left, "linear"))
                env.slots.append(_Slot(y, subj.right, "linear"))
                result = self.synth(b, env, path + (1,))
                env.slots.pop()
                env.slots.pop()
                return result
            case Case():
                return self._case(t, env, path, None)
            case LetBang():
                return self._let_bang(t, env, path, None)
            case PlainLet(subject=s, binder=x, body=b):
                subj = self.synth(s, env, path + (0,))
                env.slots.append(_Slot(x, subj, "linear"))
                result = self.synth(b, env, path + (1,))
                env.slots.pop()
                return result
            case Bang(body=b):
                child = self._enter_bang(env)
                inner = self.synth(b, child, path + (0,))
                self._exit_bang(child, path)
                return fo.Bang(inner)
            case Gen():
                return self._gen(t, env, path, None)
            case Inst(body=b, formula=arg):
                inner = self.synth(b, env, path + (0,))
                if not isinstance(inner, fo.Forall):
                    raise TypeMismatch(
                        path + (0,), "a quantified type (forall _. _)", inner)
                return subst_type(inner.body, inner.var, arg)
            case Fold(formula=mu, body=b):
                if not isinstance(mu, fo.Mu):
                    raise TypeCheckError(
                        path, f"fold needs a mu-type, got {show_type(mu)}")
                self.check(b, subst_type(mu.body, mu.var, mu), env,
                           path + (0,))
                return mu
            case Unfold(body=b):
                inner = self.synth(b, env, path + (0,))
                if not isinstance(inner, fo.Mu):
                    raise TypeMismatch(path + (0,),
                                       "a fix-point type (mu _. _)", inner)
                return subst_type(inner.body, inner.var, inner)
        raise AssertionError(f"unhandled node {type(t).__name__}")

    # -- checking against an expected formula ------------------------------

    def check(self, t: Term, expected: Formula, env: _Env,
              path: Path) -> None:
        match (t, expected):
            case (Inl(body=u), fo.Plus(left=a)):
                self.check(u, a, env, path + (0,))
                return
            case (Inr(body=u), fo.Plus(right=b)):
                self.check(u, b, env, path + (0,))
                return
            case (Inl() | Inr(), _):
                raise TypeMismatch(path, expected, "a sum introduction")
            case (Abs(param=x, body=b, ann=ann), fo.Lolli(left=a, right=r)):
                if ann is not None and not alpha_eq_type(ann, a):
                    raise TypeMismatch(path, a, ann)
                env.slots.append(_Slot(x, ann if ann is not None else a,
                                       "linear"))
                self.check(b, r, env, path + (0,))
                env.slots.pop()
                return
            case (Pair(left=l, right=r), fo.Tensor(left=a, right=b)):
                self.check(l, a, env, path + (0,))
                self.check(r, b, env, path + (1,))
                return
            case (Bang(body=b), fo.Bang(body=inner)):
                child = self._enter_bang(env)
                self.check(b, inner, child, path + (0,))
                self._exit_bang(child, path)
                return
            case (Gen(tvar=a), fo.Forall(var=v, body=inner)):
                self._gen(t, env, path, subst_type(inner, v, fo.TVar(a)))
                return
            case (Case(), _):
                self._case(t, env, path, expected)
                return
            case (LetBang(), _):
                self._let_bang(t, env, path, expected)
                return
            case (PlainLet(subject=s, binder=x, body=b), _):
                subj = self.synth(s, env, path + (0,))
                env.slots.append(_Slot(x, subj, "linear"))
                self.check(b, expected, env, path + (1,))
                env.slots.pop()
                return
            case (LetPair(subject=s, left_name=x, right_name=y, body=b), _):
                subj = self.synth(s, env, path + (0,))
                if not isinstance(subj, fo.Tensor):
                    raise TypeMismatch(path + (0,), "a pair type (_ * _)",
                                       subj)
                env.slots.append(_Slot(x, subj.left, "linear"))
                env.slots.append(_Slot(y, subj.right, "linear"))
                self.check(b, expected, env, path + (1,))
                env.slots.pop()
                env.slots.pop()
                return
        found = self.synth(t, env, path)
        if not alpha_eq_type(found, expected):
            raise TypeMismatch(path, expected, found)

    # -- composite rules ---------------------------------------------------

    def _case(self, t: Case, env: _Env, path: Path,
              expected: Formula | None) -> Formula:
        subj = self.synth(t.subject, env, path + (0,))
        if not isinstance(subj, fo.Plus):
            raise TypeMismatch(path + (0,), "a sum type (_ + _)", subj)
        snap = self._snapshot(env)

        env.slots.append(_Slot(t.left_name, subj.left, "linear"))
        if expected is None:
            expected = self.synth(t.left_branch, env, path + (1,))
        else:
            self.check(t.left_branch, expected, env, path + (1,))
        env.slots.pop()
        after_left = self._snapshot(env)

        self._restore(env, snap)
        env.slots.append(_Slot(t.right_name, subj.right, "linear"))
        self.check(t.right_branch, expected, env, path + (2,))
        env.slots.pop()
        self._merge(env, after_left)
        return expected

    def _let_bang(self, t: LetBang, env: _Env, path: Path,
                  expected: Formula | None) -> Formula:
        subj = self.synth(t.subject, env, path + (0,))
        if not isinstance(subj, fo.Bang):
            raise TypeMismatch(path + (0,), "a banged type (!_)", subj)
        depths = _occ_depths(t.body, t.binder)
        if not depths or all(d == 0 for d in depths):
            kind = "mplex"
        elif all(d == 1 for d in depths) and _promotion_tail(t.body):
            kind = "armed"
            if isinstance(t.subject, Var):
                slot = env.find(t.subject.name)
                if slot is not None:
                    slot.promoted = True
        elif len(set(depths)) > 1:
            raise DepthViolation(
                path, f"occurrences of {t.binder} sit at unequal depths "
                      f"{sorted(set(depths))}")
        elif all(d == 1 for d in depths):
            raise DepthViolation(
                path, f"{t.binder} is used under ! but the let body is not "
                      f"a promotion chain ending in !")
        else:
            raise DepthViolation(
                path, f"{t.binder} occurs at depth {max(depths)}; "
                      f"promotion reaches only depth 1")
        env.slots.append(_Slot(t.binder, subj.body, kind))
        if expected is None:
            result = self.synth(t.body, env, path + (1,))
        else:
            self.check(t.body, expected, env, path + (1,))
            result = expected
        env.slots.pop()
        return result

    def _gen(self, t: Gen, env: _Env, path: Path,
             body_expected: Formula | None) -> Formula:
        snap = self._snapshot(env)
        if body_expected is None:
            inner = self.synth(t.body, env, path + (0,))
        else:
            self.check(t.body, body_expected, env, path + (0,))
            inner = body_expected
        for slot, (uses, _) in zip(env.slots, snap):
            if slot.uses > uses and t.tvar in free_tvars(slot.formula):
                raise ForallEscape(
                    path, f"type variable {t.tvar} is free in the type of "
                          f"{slot.name}")
        return fo.Forall(t.tvar, inner)


def _env_of(ctx: Context) -> _Env:
    names = [e.name for e in ctx.entries]
    if len(set(names)) != len(names):
        raise ValueError("context variable names must be distinct")
    return _Env([_Slot(e.name, e.formula, "linear") for e in ctx.entries],
                None)


def _final_context(env: _Env) -> Context:
    out = []
    for slot in env.slots:
        state = "unused"
        if slot.promoted:
            state = "promoted"
        elif slot.uses:
            state = "used"
        out.append(ContextEntry(slot.name, slot.formula, state))
    return Context(tuple(out))


def check(ctx: Context, t: Term, expected: Formula) -> Judgement:
    """Check t against expected under ctx; affine, so entries may end
    unused.  Raises a TypeCheckError subclass with the offending path."""
    env = _env_of(ctx)
    _Checker().check(t, expected, env, ())
    return Judgement(_final_context(env), t, expected)


def infer(ctx: Context, t: Term) -> Judgement:
    """Synthesize a type for t (requires annotated lambda binders)."""
    env = _env_of(ctx)
    formula = _Checker().synth(t, env, ())
    return Judgement(_final_context(env), t, formula)


@dataclass(frozen=True, slots=True)
class DefReport:
    name: str
    status: str  # ok | error | skipped
    formula: Formula | None = None
    message: str | None = None
    path: Path | None = None

    def to_json(self) -> dict:
        doc: dict = {"name": self.name, "status": self.status}
        if self.formula is not None:
            doc["type"] = show_type(self.formula)
        if self.message is not None:
            doc["error"] = self.message
        if self.path is not None:
            doc["path"] = list(self.path)
        return doc


@dataclass(frozen=True, slots=True)
class ModuleReport:
    entries: tuple[DefReport, ...]

    @property
    def ok(self) -> bool:
        return all(e.status != "error" for e in self.entries)

    def to_json(self) -> dict:
        return {"ok": self.ok, "definitions": [e.to_json() for e in
                                               self.entries]}


def check_module(m: SourceModule, base: dict[str, Term] | None = None
                 ) -> ModuleReport:
    """Check every ascribed definition (with earlier names inlined).

    Definitions without an ascription are reported as skipped; they still
    get inlined into later bodies.
    """
    linked = link_module(m, base)
    reports = []
    for d in m.definitions:
        if d.ascription is None:
            reports.append(DefReport(d.name, "skipped"))
            continue
        try:
            check(Context(), linked[d.name], d.ascription)
        except TypeCheckError as err:
            reports.append(DefReport(d.name, "error", message=err.message,
                                     path=err.path))
        else:
            reports.append(DefReport(d.name, "ok", formula=d.ascription))
    return ModuleReport(tuple(reports))
