"""Structural analysis: termhood verdicts with witnesses, occurrence
counting, rank, depth of a subterm occurrence, capture-avoiding
substitution, and alpha-equivalence."""

from __future__ import annotations

from dataclasses import dataclass

from . import formulas as fo
from .errors import InvalidPath, MarkerPresent, NotDesugared
from .syntax import (Abs, App, Bang, Case, Fold, Gen, Inl, Inr, Inst,
                     LetBang, LetPair, Pair, Path, PlainLet, Term, Unfold,
                     Unit, Var, children, subterm_at, with_children)


def occurrences(t: Term, x: str) -> int:
    """Occurrences of x free in t; case branches count additively, i.e.
    the two branches contribute the maximum, not the sum."""
    if x not in t.fv:
        return 0
    match t:
        case Var():
            return 1
        case Abs(param=y, body=b) | LetBang(binder=y, body=b) | \
                PlainLet(binder=y, body=b):
            inner = 0 if y == x else occurrences(b, x)
            if isinstance(t, Abs):
                return inner
            return occurrences(t.subject, x) + inner
        case LetPair(subject=s, left_name=y1, right_name=y2, body=b):
            inner = 0 if x in (y1, y2) else occurrences(b, x)
            return occurrences(s, x) + inner
        case Case(subject=s, left_name=y1, left_branch=b1,
                  right_name=y2, right_branch=b2):
            n1 = 0 if y1 == x else occurrences(b1, x)
            n2 = 0 if y2 == x else occurrences(b2, x)
            return occurrences(s, x) + max(n1, n2)
        case _:
            return sum(occurrences(k, x) for k in children(t))


def rank(t: Term) -> int:
    match t:
        case LetBang(subject=s, binder=x, body=b):
            r = max(rank(s), rank(b))
            if x not in b.tv:
                r = max(r, occurrences(b, x))
            return r
        case LetPair(subject=s, left_name=x, right_name=y, body=b):
            return max(rank(s), rank(b), occurrences(b, x), occurrences(b, y))
        case _:
            kids = children(t)
            return max((rank(k) for k in kids), default=0)


@dataclass(frozen=True, slots=True)
class TermInfo:
    free_vars: frozenset[str]
    temp_vars: frozenset[str]
    occ: dict[str, int]
    size: int
    depth: int
    rank: int
    is_term: bool
    is_well_formed: bool
    failure_witness: tuple[Path, str] | None

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "depth": self.depth,
            "rank": self.rank,
            "free_vars": sorted(self.free_vars),
            "temp_vars": sorted(self.temp_vars),
            "is_term": self.is_term,
            "is_well_formed": self.is_well_formed,
        }


def _violated_clause(t: Term) -> str:
    """Why this node (whose children are all terms) is not a term."""
    match t:
        case Abs(param=x, body=b):
            if x in b.tv:
                return "abstraction over temporary variable"
            return "abstraction binder occurs more than once"
        case App(fun=f, arg=a):
            return (f"application shares temporary variable "
                    f"{sorted((f.tv & a.fv) | (f.fv & a.tv))}")
        case Pair(left=f, right=a):
            return (f"pair shares temporary variable "
                    f"{sorted((f.tv & a.fv) | (f.fv & a.tv))}")
        case Bang(body=b):
            if b.tv:
                return f"bang body has temporary variables {sorted(b.tv)}"
            return (f"bang body free variables occur more than once: "
                    f"{sorted(b.dup)}")
        case LetBang(subject=s, binder=x, body=b):
            shared = (s.tv & (b.fv - {x})) | (s.fv & (b.tv - {x}))
            return f"let shares temporary variable {sorted(shared)}"
        case LetPair(subject=s, left_name=x, right_name=y, body=b):
            if x == y:
                return "pair binders must be distinct"
            for name in (x, y):
                if name in b.tv:
                    return f"pair binder {name} is temporary"
                if name in b.dup:
                    return f"pair binder {name} occurs more than once"
            return "let shares temporary variable"
        case Case(left_name=x1, left_branch=b1, right_name=x2,
                  right_branch=b2):
            for name, br in ((x1, b1), (x2, b2)):
                if name in br.tv:
                    return f"case binder {name} is temporary"
                if name in br.dup:
                    return f"case binder {name} occurs more than once"
            tv1 = b1.tv - {x1}
            tv2 = b2.tv - {x2}
            if (tv1 & ((b2.fv - {x2}) - tv2)) or (tv2 & ((b1.fv - {x1}) - tv1)):
                return "case branches use a variable at different depths"
            return "case shares temporary variable"
        case PlainLet():
            return "plain let not expanded"
    return "marker present"


def _witness(t: Term, path: Path = ()) -> tuple[Path, str]:
    for i, k in enumerate(children(t)):
        if not k.is_term:
            return _witness(k, path + (i,))
    return path, _violated_clause(t)


def analyze(t: Term) -> TermInfo:
    if t.has_marker:
        raise MarkerPresent("term contains type markers; erase them first")
    if t.has_plain_let:
        raise NotDesugared("term contains a plain let; expand it first")
    return TermInfo(
        free_vars=t.fv,
        temp_vars=t.tv,
        occ={v: occurrences(t, v) for v in t.fv},
        size=t.size,
        depth=t.depth,
        rank=rank(t),
        is_term=t.is_term,
        is_well_formed=t.is_term and not t.tv and not t.dup,
        failure_witness=None if t.is_term else _witness(t),
    )


def depth_of(t: Term, path: Path) -> int:
    """Number of Bang nodes strictly enclosing the addressed occurrence."""
    here = t
    bangs = 0
    for i in path:
        if isinstance(here, Bang):
            bangs += 1
        kids = children(here)
        if not 0 <= i < len(kids):
            raise InvalidPath(f"no child {i} at {type(here).__name__}")
        here = kids[i]
    return bangs


def fresh_name(base: str, avoid: frozenset[str] | set[str]) -> str:
    k = 1
    while f"{base}${k}" in avoid:
        k += 1
    return f"{base}${k}"


def substitute(t: Term, x: str, u: Term) -> Term:
    return substitute_many(t, {x: u})


def substitute_many(t: Term, repl: dict[str, Term]) -> Term:
    """Simultaneous capture-avoiding substitution.

    Simultaneity matters for the pair reduction rule u[t1/x1, t2/x2]:
    sequential substitution would rewrite names inside the already
    substituted t1.  Binders are renamed deterministically (`x$k`, smallest
    free k) when they would capture a free variable of a payload.
    """
    live = {v: val for v, val in repl.items() if v in t.fv}
    if not live:
        return t
    if isinstance(t, Var):
        return live[t.name]
    if isinstance(t, Case):
        # each branch binder scopes over its own branch only
        subject = substitute_many(t.subject, live)
        ln, lb = _subst_branch(t.left_name, t.left_branch, live)
        rn, rb = _subst_branch(t.right_name, t.right_branch, live)
        return Case(subject, ln, lb, rn, rb)

    binders = _binder_names(t)
    if binders:
        inner = {v: val for v, val in live.items() if v not in binders}
        body_positions = _body_indexes(t)
        kids = list(children(t))
        if inner:
            clashing = [b for b in binders
                        if any(b in val.fv for v, val in inner.items()
                               if any(v in kids[i].fv for i in body_positions))]
            if clashing:
                t = _rename_binders(t, clashing, inner)
                kids = list(children(t))
        new_kids = []
        for i, k in enumerate(kids):
            scope = inner if i in body_positions else live
            new_kids.append(substitute_many(k, scope))
        return with_children(t, tuple(new_kids))

    return with_children(t, tuple(substitute_many(k, live)
                                  for k in children(t)))


def _subst_branch(binder: str, body: Term,
                  repl: dict[str, Term]) -> tuple[str, Term]:
    scope = {v: val for v, val in repl.items()
             if v != binder and v in body.fv}
    if not scope:
        return binder, body
    if any(binder in val.fv for val in scope.values()):
        avoid = set(body.fv) | set(scope.keys())
        for val in scope.values():
            avoid |= val.fv
        renamed = fresh_name(binder, avoid)
        body = substitute(body, binder, Var(renamed))
        binder = renamed
    return binder, substitute_many(body, scope)


def _binder_names(t: Term) -> tuple[str, ...]:
    match t:
        case Abs(param=x) | LetBang(binder=x) | PlainLet(binder=x):
            return (x,)
        case LetPair(left_name=x, right_name=y):
            return (x, y)
        case _:
            return ()


def _body_indexes(t: Term) -> tuple[int, ...]:
    """Child positions that sit under this node's binders."""
    match t:
        case Abs():
            return (0,)
        case LetBang() | PlainLet() | LetPair():
            return (1,)
        case _:
            return ()


def _rename_binders(t: Term, names: list[str], repl: dict[str, Term]) -> Term:
    avoid = set(t.fv)
    for val in repl.values():
        avoid |= val.fv
    avoid |= set(repl.keys())
    match t:
        case Abs(param=x, body=b, ann=ann):
            x2 = fresh_name(x, avoid)
            return Abs(x2, substitute(b, x, Var(x2)), ann)
        case LetBang(subject=s, binder=x, body=b):
            x2 = fresh_name(x, avoid)
            return LetBang(s, x2, substitute(b, x, Var(x2)))
        case PlainLet(subject=s, binder=x, body=b):
            x2 = fresh_name(x, avoid)
            return PlainLet(s, x2, substitute(b, x, Var(x2)))
        case LetPair(subject=s, left_name=x, right_name=y, body=b):
            sub: dict[str, Term] = {}
            x2, y2 = x, y
            if x in names:
                x2 = fresh_name(x, avoid)
                avoid.add(x2)
                sub[x] = Var(x2)
            if y in names:
                y2 = fresh_name(y, avoid)
                sub[y] = Var(y2)
            return LetPair(s, x2, y2, substitute_many(b, sub))
    raise TypeError(f"no binders at {t!r}")


TyEnv = tuple[tuple[str, str], ...]


def alpha_eq(t1: Term, t2: Term,
             env: tuple[tuple[str, str], ...] = (),
             tyenv: TyEnv = ()) -> bool:
    """Equality up to consistent renaming of bound term and type variables.

    Bound formulas (annotations, marker payloads) are compared up to the
    type-variable correspondence accumulated from gen markers.
    """
    match (t1, t2):
        case (Var(a), Var(b)):
            for x, y in reversed(env):
                if a == x or b == y:
                    return a == x and b == y
            return a == b
        case (Unit(), Unit()):
            return True
        case (Abs(param=x1, body=b1, ann=a1), Abs(param=x2, body=b2, ann=a2)):
            if not _ann_eq(a1, a2, tyenv):
                return False
            return alpha_eq(b1, b2, env + ((x1, x2),), tyenv)
        case (App(fun=f1, arg=a1), App(fun=f2, arg=a2)) | \
                (Pair(left=f1, right=a1), Pair(left=f2, right=a2)):
            return alpha_eq(f1, f2, env, tyenv) and alpha_eq(a1, a2, env, tyenv)
        case (Bang(body=b1), Bang(body=b2)) | \
                (Inl(body=b1), Inl(body=b2)) | \
                (Inr(body=b1), Inr(body=b2)) | \
                (Unfold(body=b1), Unfold(body=b2)):
            return alpha_eq(b1, b2, env, tyenv)
        case (LetBang(subject=s1, binder=x1, body=b1),
              LetBang(subject=s2, binder=x2, body=b2)) | \
             (PlainLet(subject=s1, binder=x1, body=b1),
              PlainLet(subject=s2, binder=x2, body=b2)):
            return (alpha_eq(s1, s2, env, tyenv)
                    and alpha_eq(b1, b2, env + ((x1, x2),), tyenv))
        case (LetPair(subject=s1, left_name=x1, right_name=y1, body=b1),
              LetPair(subject=s2, left_name=x2, right_name=y2, body=b2)):
            return (alpha_eq(s1, s2, env, tyenv)
                    and alpha_eq(b1, b2, env + ((x1, x2), (y1, y2)), tyenv))
        case (Case(subject=s1, left_name=x1, left_branch=l1,
                   right_name=y1, right_branch=r1),
              Case(subject=s2, left_name=x2, left_branch=l2,
                   right_name=y2, right_branch=r2)):
            return (alpha_eq(s1, s2, env, tyenv)
                    and alpha_eq(l1, l2, env + ((x1, x2),), tyenv)
                    and alpha_eq(r1, r2, env + ((y1, y2),), tyenv))
        case (Gen(tvar=a1, body=b1), Gen(tvar=a2, body=b2)):
            return alpha_eq(b1, b2, env, tyenv + ((a1, a2),))
        case (Inst(body=b1, formula=f1), Inst(body=b2, formula=f2)) | \
                (Fold(formula=f1, body=b1), Fold(formula=f2, body=b2)):
            return (fo.alpha_eq_type(f1, f2, tyenv)
                    and alpha_eq(b1, b2, env, tyenv))
    return False


def _ann_eq(a1: fo.Formula | None, a2: fo.Formula | None, tyenv: TyEnv) -> bool:
    if a1 is None or a2 is None:
        return a1 is None and a2 is None
    return fo.alpha_eq_type(a1, a2, tyenv)
