"""Pseudo-term syntax.

Nodes cache the structural facts every later pass needs (free and temporary
variables, duplicated free variables, size, depth, termhood, redex presence)
so that reduction can find a redex by descending only into subtrees that
still contain one.  All nodes are immutable and safely shared between terms.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidPath
from .formulas import Formula, show_type

_EMPTY: frozenset[str] = frozenset()


class Term:
    """Base class; subclasses are the grammar constructors.

    Cached facts, set once at construction:
      fv            free variable names
      tv            temporary variables (free under exactly one !)
      dup           free variables with two or more occurrences, counting
                    case branches additively (max over branches)
      split         free variables that occur in both branches of some case;
                    substituting for such a variable duplicates the payload
      size          node count per the size table (App adds nothing)
      depth         maximum number of nested ! around any subterm
      is_term       the inductive termhood predicate; False whenever a
                    marker or plain let is present
      has_redex     some subterm is a redex root
      has_marker    a type marker node occurs somewhere
      has_plain_let an unexpanded plain let occurs somewhere
    """

    __slots__ = ("fv", "tv", "dup", "split", "size", "depth", "is_term",
                 "has_redex", "has_marker", "has_plain_let")

    fv: frozenset[str]
    tv: frozenset[str]
    dup: frozenset[str]
    split: frozenset[str]
    size: int
    depth: int
    is_term: bool
    has_redex: bool
    has_marker: bool
    has_plain_let: bool

    def __post_init__(self) -> None:
        _fill_caches(self)

    def __str__(self) -> str:
        return show_term(self)


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Abs(Term):
    param: str
    body: Term
    ann: Formula | None = None


@dataclass(frozen=True, slots=True)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class Bang(Term):
    body: Term


@dataclass(frozen=True, slots=True)
class LetBang(Term):
    subject: Term
    binder: str
    body: Term


@dataclass(frozen=True, slots=True)
class PlainLet(Term):
    """`let u be x in t`, sugar for ((\\x. t) u); kept for the typechecker."""

    subject: Term
    binder: str
    body: Term


@dataclass(frozen=True, slots=True)
class Pair(Term):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class LetPair(Term):
    subject: Term
    left_name: str
    right_name: str
    body: Term


@dataclass(frozen=True, slots=True)
class Inl(Term):
    body: Term


@dataclass(frozen=True, slots=True)
class Inr(Term):
    body: Term


@dataclass(frozen=True, slots=True)
class Case(Term):
    subject: Term
    left_name: str
    left_branch: Term
    right_name: str
    right_branch: Term


@dataclass(frozen=True, slots=True)
class Unit(Term):
    pass


# Type markers.  They carry no computational content; erase_markers removes
# them and the typechecker consumes them for forall/mu steps.

@dataclass(frozen=True, slots=True)
class Gen(Term):
    tvar: str
    body: Term


@dataclass(frozen=True, slots=True)
class Inst(Term):
    body: Term
    formula: Formula


@dataclass(frozen=True, slots=True)
class Fold(Term):
    formula: Formula
    body: Term


@dataclass(frozen=True, slots=True)
class Unfold(Term):
    body: Term


MARKER_TYPES = (Gen, Inst, Fold, Unfold)


def redex_rule(t: Term) -> str | None:
    """The unique rule applicable at this node, if any.

    Labels: beta, bang, com1, com2 from the core calculus; pair, case-l,
    case-r for the derived constructs; com-pair, com-case the added
    application commutations.

    A rule that would copy a payload carrying temporary variables into both
    branches of a case is suppressed, because the copies would share a
    temporary across branches, which the case coherence conditions forbid.
    Concretely: beta, pair, case-l and case-r fire only when the payload has
    no temporaries or the target binder is not branch-split below, and
    com-case (which always duplicates its argument) only when the argument
    has no temporaries.  A suppressed node is simply not a redex; reduction
    elsewhere (usually inside the payload) can unblock it.  The bang rule
    needs no guard: a well-formed !u has no temporaries inside u.
    """
    match t:
        case App(fun=Abs(param=x, body=b), arg=u) if (
                not u.tv or x not in b.split):
            return "beta"
        case App(fun=LetBang()):
            return "com2"
        case App(fun=LetPair()):
            return "com-pair"
        case App(fun=Case(), arg=a) if not a.tv:
            return "com-case"
        case LetBang(subject=Bang()):
            return "bang"
        case LetBang(subject=LetBang()):
            return "com1"
        case LetPair(subject=Pair(left=l, right=r),
                     left_name=x, right_name=y, body=b) if (
                (not l.tv or x not in b.split)
                and (not r.tv or y not in b.split)):
            return "pair"
        case Case(subject=Inl(body=u), left_name=x1, left_branch=b1) if (
                not u.tv or x1 not in b1.split):
            return "case-l"
        case Case(subject=Inr(body=u), right_name=x2, right_branch=b2) if (
                not u.tv or x2 not in b2.split):
            return "case-r"
    return None


def _union(a: frozenset, b: frozenset) -> frozenset:
    if not a:
        return b
    if not b:
        return a
    return a | b


def _inter(a: frozenset, b: frozenset) -> frozenset:
    if a and b:
        return a & b
    return _EMPTY


def _minus(s: frozenset, x: str) -> frozenset:
    if x in s:
        return s.difference((x,))
    return s


def _fill(t: Term, fv: frozenset, tv: frozenset, dup: frozenset,
          split: frozenset, size: int, depth: int, is_term: bool,
          has_redex: bool, has_marker: bool, has_plain_let: bool) -> None:
    sa = object.__setattr__
    sa(t, "fv", fv)
    sa(t, "tv", tv)
    sa(t, "dup", dup)
    sa(t, "split", split)
    sa(t, "size", size)
    sa(t, "depth", depth)
    sa(t, "is_term", is_term)
    sa(t, "has_redex", has_redex)
    sa(t, "has_marker", has_marker)
    sa(t, "has_plain_let", has_plain_let)


_VAR_FV: dict[str, frozenset] = {}


def _fill_caches(t: Term) -> None:
    # Every node construction lands here, so the arms reuse a child's set
    # whenever the answer is unchanged instead of allocating, and only the
    # four shapes that can head a redex consult redex_rule.
    match t:
        case Var(name=name):
            fv = _VAR_FV.get(name)
            if fv is None:
                fv = _VAR_FV[name] = frozenset((name,))
            _fill(t, fv, _EMPTY, _EMPTY, _EMPTY, 1, 0, True,
                  False, False, False)
        case App(fun=f, arg=a):
            ffv, afv = f.fv, a.fv
            ftv, atv = f.tv, a.tv
            _fill(t, _union(ffv, afv), _union(ftv, atv),
                  _union(_union(f.dup, a.dup), _inter(ffv, afv)),
                  _union(f.split, a.split),
                  f.size + a.size,
                  f.depth if f.depth >= a.depth else a.depth,
                  (f.is_term and a.is_term
                   and not (ftv and ftv & afv) and not (atv and atv & ffv)),
                  redex_rule(t) is not None or f.has_redex or a.has_redex,
                  f.has_marker or a.has_marker,
                  f.has_plain_let or a.has_plain_let)
        case Abs(param=x, body=b):
            _fill(t, _minus(b.fv, x), _minus(b.tv, x), _minus(b.dup, x),
                  _minus(b.split, x), b.size + 1, b.depth,
                  b.is_term and x not in b.tv and x not in b.dup,
                  b.has_redex, b.has_marker, b.has_plain_let)
        case Pair(left=f, right=a):
            ffv, afv = f.fv, a.fv
            ftv, atv = f.tv, a.tv
            _fill(t, _union(ffv, afv), _union(ftv, atv),
                  _union(_union(f.dup, a.dup), _inter(ffv, afv)),
                  _union(f.split, a.split),
                  f.size + a.size + 1,
                  f.depth if f.depth >= a.depth else a.depth,
                  (f.is_term and a.is_term
                   and not (ftv and ftv & afv) and not (atv and atv & ffv)),
                  f.has_redex or a.has_redex,
                  f.has_marker or a.has_marker,
                  f.has_plain_let or a.has_plain_let)
        case Bang(body=b):
            _fill(t, b.fv, b.fv, b.dup, b.split, b.size + 1, b.depth + 1,
                  b.is_term and not b.tv and not b.dup,
                  b.has_redex, b.has_marker, b.has_plain_let)
        case LetBang(subject=s, binder=x, body=b):
            bfv = _minus(b.fv, x)
            btv = _minus(b.tv, x)
            stv, sfv = s.tv, s.fv
            _fill(t, _union(sfv, bfv), _union(stv, btv),
                  _union(_union(s.dup, _minus(b.dup, x)), _inter(sfv, bfv)),
                  _union(s.split, _minus(b.split, x)),
                  s.size + b.size + 1,
                  s.depth if s.depth >= b.depth else b.depth,
                  (s.is_term and b.is_term
                   and not (stv and stv & bfv) and not (btv and sfv & btv)),
                  redex_rule(t) is not None or s.has_redex or b.has_redex,
                  s.has_marker or b.has_marker,
                  s.has_plain_let or b.has_plain_let)
        case PlainLet(subject=s, binder=x, body=b):
            bfv = _minus(b.fv, x)
            _fill(t, _union(s.fv, bfv), _union(s.tv, _minus(b.tv, x)),
                  _union(_union(s.dup, _minus(b.dup, x)), _inter(s.fv, bfv)),
                  _union(s.split, _minus(b.split, x)),
                  s.size + b.size + 1,
                  s.depth if s.depth >= b.depth else b.depth,
                  False,
                  s.has_redex or b.has_redex,
                  s.has_marker or b.has_marker,
                  True)
        case LetPair(subject=s, left_name=x, right_name=y, body=b):
            bfv = _minus(_minus(b.fv, x), y)
            btv = _minus(_minus(b.tv, x), y)
            stv, sfv = s.tv, s.fv
            _fill(t, _union(sfv, bfv), _union(stv, btv),
                  _union(_union(s.dup, _minus(_minus(b.dup, x), y)),
                         _inter(sfv, bfv)),
                  _union(s.split, _minus(_minus(b.split, x), y)),
                  s.size + b.size + 1,
                  s.depth if s.depth >= b.depth else b.depth,
                  (s.is_term and b.is_term and x != y
                   and x not in b.tv and y not in b.tv
                   and x not in b.dup and y not in b.dup
                   and not (stv and stv & bfv) and not (btv and sfv & btv)),
                  redex_rule(t) is not None or s.has_redex or b.has_redex,
                  s.has_marker or b.has_marker,
                  s.has_plain_let or b.has_plain_let)
        case Inl(body=b) | Inr(body=b):
            _fill(t, b.fv, b.tv, b.dup, b.split, b.size + 1, b.depth,
                  b.is_term, b.has_redex, b.has_marker, b.has_plain_let)
        case Case(subject=s, left_name=x1, left_branch=b1,
                  right_name=x2, right_branch=b2):
            fv1 = _minus(b1.fv, x1)
            fv2 = _minus(b2.fv, x2)
            tv1 = _minus(b1.tv, x1)
            tv2 = _minus(b2.tv, x2)
            fvb = _union(fv1, fv2)
            tvb = _union(tv1, tv2)
            stv, sfv = s.tv, s.fv
            # A variable shared between branches must be non-temporary in
            # both: a bang step inside one branch can demote a temporary
            # variable to depth 0 there, and any depth split across the
            # branches leaves a tree that is no longer a term.  The redex
            # guards keep reduction from manufacturing such sharing.
            coherent = (not (tv1 and tv1 & fv2)) and (not (tv2 and tv2 & fv1))
            _fill(t, _union(sfv, fvb), _union(stv, tvb),
                  _union(_union(s.dup, _minus(b1.dup, x1)),
                         _union(_minus(b2.dup, x2), _inter(sfv, fvb))),
                  _union(_union(s.split, _minus(b1.split, x1)),
                         _union(_minus(b2.split, x2), _inter(fv1, fv2))),
                  s.size + b1.size + b2.size + 1,
                  max(s.depth, b1.depth, b2.depth),
                  (s.is_term and b1.is_term and b2.is_term
                   and x1 not in b1.tv and x1 not in b1.dup
                   and x2 not in b2.tv and x2 not in b2.dup
                   and not (stv and stv & fvb) and not (tvb and sfv & tvb)
                   and coherent),
                  redex_rule(t) is not None or s.has_redex
                  or b1.has_redex or b2.has_redex,
                  s.has_marker or b1.has_marker or b2.has_marker,
                  s.has_plain_let or b1.has_plain_let or b2.has_plain_let)
        case Unit():
            _fill(t, _EMPTY, _EMPTY, _EMPTY, _EMPTY, 1, 0, True,
                  False, False, False)
        case Gen(body=b) | Inst(body=b) | Fold(body=b) | Unfold(body=b):
            _fill(t, b.fv, b.tv, b.dup, b.split, b.size, b.depth, False,
                  b.has_redex, True, b.has_plain_let)
        case _:
            raise TypeError(f"not a pseudo-term: {t!r}")


def children(t: Term) -> tuple[Term, ...]:
    """Children in path-index order."""
    match t:
        case Var() | Unit():
            return ()
        case Abs(body=b) | Bang(body=b) | Inl(body=b) | Inr(body=b) | \
                Gen(body=b) | Inst(body=b) | Fold(body=b) | Unfold(body=b):
            return (b,)
        case App(fun=f, arg=a):
            return (f, a)
        case Pair(left=f, right=a):
            return (f, a)
        case LetBang(subject=s, body=b) | PlainLet(subject=s, body=b) | \
                LetPair(subject=s, body=b):
            return (s, b)
        case Case(subject=s, left_branch=b1, right_branch=b2):
            return (s, b1, b2)
    raise TypeError(f"not a pseudo-term: {t!r}")


def with_children(t: Term, kids: tuple[Term, ...]) -> Term:
    """Rebuild a node of the same shape around new children."""
    match t:
        case Var() | Unit():
            return t
        case Abs(param=x, ann=ann):
            return Abs(x, kids[0], ann)
        case App():
            return App(kids[0], kids[1])
        case Bang():
            return Bang(kids[0])
        case LetBang(binder=x):
            return LetBang(kids[0], x, kids[1])
        case PlainLet(binder=x):
            return PlainLet(kids[0], x, kids[1])
        case Pair():
            return Pair(kids[0], kids[1])
        case LetPair(left_name=x, right_name=y):
            return LetPair(kids[0], x, y, kids[1])
        case Inl():
            return Inl(kids[0])
        case Inr():
            return Inr(kids[0])
        case Case(left_name=x1, right_name=x2):
            return Case(kids[0], x1, kids[1], x2, kids[2])
        case Gen(tvar=a):
            return Gen(a, kids[0])
        case Inst(formula=f):
            return Inst(kids[0], f)
        case Fold(formula=f):
            return Fold(f, kids[0])
        case Unfold():
            return Unfold(kids[0])
    raise TypeError(f"not a pseudo-term: {t!r}")


Path = tuple[int, ...]


def subterm_at(t: Term, path: Path) -> Term:
    here = t
    for i in path:
        kids = children(here)
        if not 0 <= i < len(kids):
            raise InvalidPath(f"no child {i} at {type(here).__name__}")
        here = kids[i]
    return here


def replace_at(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    i = path[0]
    rest = path[1:]
    match t:
        case App(fun=f, arg=a):
            if i == 0:
                return App(replace_at(f, rest, new), a)
            if i == 1:
                return App(f, replace_at(a, rest, new))
        case Abs(param=x, body=b, ann=ann):
            if i == 0:
                return Abs(x, replace_at(b, rest, new), ann)
        case Pair(left=l, right=r):
            if i == 0:
                return Pair(replace_at(l, rest, new), r)
            if i == 1:
                return Pair(l, replace_at(r, rest, new))
        case Bang(body=b):
            if i == 0:
                return Bang(replace_at(b, rest, new))
        case LetBang(subject=s, binder=x, body=b):
            if i == 0:
                return LetBang(replace_at(s, rest, new), x, b)
            if i == 1:
                return LetBang(s, x, replace_at(b, rest, new))
        case LetPair(subject=s, left_name=x, right_name=y, body=b):
            if i == 0:
                return LetPair(replace_at(s, rest, new), x, y, b)
            if i == 1:
                return LetPair(s, x, y, replace_at(b, rest, new))
        case Inl(body=b):
            if i == 0:
                return Inl(replace_at(b, rest, new))
        case Inr(body=b):
            if i == 0:
                return Inr(replace_at(b, rest, new))
        case Case(subject=s, left_name=x1, left_branch=b1,
                  right_name=x2, right_branch=b2):
            if i == 0:
                return Case(replace_at(s, rest, new), x1, b1, x2, b2)
            if i == 1:
                return Case(s, x1, replace_at(b1, rest, new), x2, b2)
            if i == 2:
                return Case(s, x1, b1, x2, replace_at(b2, rest, new))
        case PlainLet(subject=s, binder=x, body=b):
            if i == 0:
                return PlainLet(replace_at(s, rest, new), x, b)
            if i == 1:
                return PlainLet(s, x, replace_at(b, rest, new))
        case Gen(tvar=a, body=b):
            if i == 0:
                return Gen(a, replace_at(b, rest, new))
        case Inst(body=b, formula=fm):
            if i == 0:
                return Inst(replace_at(b, rest, new), fm)
        case Fold(formula=fm, body=b):
            if i == 0:
                return Fold(fm, replace_at(b, rest, new))
        case Unfold(body=b):
            if i == 0:
                return Unfold(replace_at(b, rest, new))
    raise InvalidPath(f"no child {i} at {type(t).__name__}")


def erase_markers(t: Term) -> Term:
    """Strip marker nodes and binder annotations; idempotent."""
    match t:
        case Gen(body=b) | Inst(body=b) | Fold(body=b) | Unfold(body=b):
            return erase_markers(b)
        case Abs(param=x, body=b, ann=ann):
            b2 = erase_markers(b)
            return t if b2 is b and ann is None else Abs(x, b2)
        case _:
            if not t.has_marker:
                return _strip_annotations(t)
            kids = children(t)
            new = tuple(erase_markers(k) for k in kids)
            return with_children(t, new)


def _strip_annotations(t: Term) -> Term:
    match t:
        case Abs(param=x, body=b, ann=ann):
            b2 = _strip_annotations(b)
            return t if b2 is b and ann is None else Abs(x, b2)
        case Var() | Unit():
            return t
        case _:
            kids = children(t)
            new = tuple(_strip_annotations(k) for k in kids)
            if all(a is b for a, b in zip(new, kids)):
                return t
            return with_children(t, new)


def expand_plain_let(t: Term) -> Term:
    """Rewrite every `let u be x in t` into ((\\x. t) u)."""
    if not t.has_plain_let:
        return t
    if isinstance(t, PlainLet):
        return App(Abs(t.binder, expand_plain_let(t.body)),
                   expand_plain_let(t.subject))
    kids = children(t)
    return with_children(t, tuple(expand_plain_let(k) for k in kids))


# Printing.  Application is always parenthesized, matching how the source
# programs are written; binder forms extend to the right and get wrapped
# only when they appear inside an application or under !.

def _operand(t: Term) -> str:
    match t:
        case Var() | Unit() | App() | Pair() | Inl() | Inr():
            return _show(t)
        case Bang():
            return _show(t)
        case _:
            return f"({_show(t)})"


def _show(t: Term) -> str:
    match t:
        case Var(name):
            return name
        case Unit():
            return "()"
        case Abs(param=x, body=b, ann=a):
            head = f"\\{x}: {show_type(a)}." if a is not None else f"\\{x}."
            return f"{head} {_show(b)}"
        case App(fun=f, arg=a):
            return f"({_operand(f)} {_operand(a)})"
        case Bang(body=b):
            return f"!{_operand(b)}"
        case LetBang(subject=s, binder=x, body=b):
            return f"let {_show(s)} be !{x} in {_show(b)}"
        case PlainLet(subject=s, binder=x, body=b):
            return f"let {_show(s)} be {x} in {_show(b)}"
        case Pair(left=l, right=r):
            return f"<{_show(l)}, {_show(r)}>"
        case LetPair(subject=s, left_name=x, right_name=y, body=b):
            return f"let {_show(s)} be <{x}, {y}> in {_show(b)}"
        case Inl(body=b):
            return f"inl({_show(b)})"
        case Inr(body=b):
            return f"inr({_show(b)})"
        case Case(subject=s, left_name=x1, left_branch=b1,
                  right_name=x2, right_branch=b2):
            return (f"case {_show(s)} of inl({x1}) => {_show(b1)}"
                    f" | inr({x2}) => {_show(b2)}")
        case Gen(tvar=a, body=b):
            return f"gen[{a}] {_show(b)}"
        case Inst(body=b, formula=f):
            # A bare !-operand would rebind the @ suffix to the inner atom
            # on reparse, so bangs get wrapped here.
            inner = f"({_show(b)})" if isinstance(b, Bang) else _operand(b)
            return f"{inner} @[{show_type(f)}]"
        case Fold(formula=f, body=b):
            return f"fold[{show_type(f)}] {_show(b)}"
        case Unfold(body=b):
            return f"unfold {_show(b)}"
    raise TypeError(f"not a pseudo-term: {t!r}")


def show_term(t: Term) -> str:
    return _show(t)
