"""The complexity machinery: weight, nlet, measure, polynomial
certificates, and the per-step decrease checks used by reduction monitors.

Weight table (n is the multiplexing parameter, n >= rank for the decrease
properties): W(x)=1, W(\\x.t)=W(t)+1, W(!u)=n*W(u)+1, W(t u)=W(t)+W(u),
W(let u be !x in t)=W(u)+W(t).  Derived constructs: pairs and let-pair add
their children plus one, inl/inr add one, () weighs one.  Case adds its
subject plus the MAX of the branch weights plus one: only one branch ever
runs, and max-folding is what keeps substitution into both branches of a
case (a payload copied once per branch) single-counted, so every proper
rule strictly decreases the weight of the redex it contracts.  The price
is that a step inside the lighter branch leaves enclosing weights
unchanged, so the decrease checks compare the redex against its
contractum, not whole terms.  nlet folds case branches by max for the
same reason; the measure keeps counting every let occurrence.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import occurrences, rank, substitute
from .errors import NotATerm, RankTooSmall, SideConditionUnmet
from .syntax import (Abs, App, Bang, Case, Inl, Inr, LetBang, LetPair, Pair,
                     Term, Unit, Var, children)

PROPER_RULES = frozenset(("beta", "bang", "pair", "case-l", "case-r"))
COMMUTATION_RULES = frozenset(("com1", "com2", "com-pair", "com-case"))


def _require_term(t: Term) -> None:
    # The tables are total on marker-free desugared pseudo-terms; the
    # decrease properties need termhood, but they are checked per step on
    # reduction traces, which only ever visit terms.
    if t.has_marker or t.has_plain_let:
        raise NotATerm(f"metrics are undefined on {t}")


def _weight(t: Term, n: int) -> int:
    match t:
        case Var() | Unit():
            return 1
        case Abs(body=b) | Inl(body=b) | Inr(body=b):
            return _weight(b, n) + 1
        case App(fun=f, arg=a):
            return _weight(f, n) + _weight(a, n)
        case Bang(body=b):
            return n * _weight(b, n) + 1
        case LetBang(subject=s, body=b):
            return _weight(s, n) + _weight(b, n)
        case Pair(left=l, right=r):
            return _weight(l, n) + _weight(r, n) + 1
        case LetPair(subject=s, body=b):
            return _weight(s, n) + _weight(b, n) + 1
        case Case(subject=s, left_branch=b1, right_branch=b2):
            return _weight(s, n) + max(_weight(b1, n), _weight(b2, n)) + 1
    raise NotATerm(f"metrics are defined on terms only: {t}")


def weight(t: Term, n: int) -> int:
    _require_term(t)
    if n < 1:
        raise ValueError("the weight parameter must be positive")
    return _weight(t, n)


def nlet(t: Term) -> int:
    """Let-subterm count (let-! and let-pair), case branches max-folded
    so that nlet(t) <= W(t,n) - 1 survives the max in the case weight."""
    _require_term(t)
    return _nlet(t)


def _nlet(t: Term) -> int:
    if isinstance(t, Case):
        return _nlet(t.subject) + max(_nlet(t.left_branch),
                                      _nlet(t.right_branch))
    own = 1 if isinstance(t, (LetBang, LetPair)) else 0
    return own + sum(_nlet(k) for k in children(t))


def _measure_parts(t: Term, n: int) -> tuple[int, int, int]:
    """(weight, let count, sum of standalone body weights over lets)."""
    match t:
        case Var() | Unit():
            return 1, 0, 0
        case Abs(body=b) | Inl(body=b) | Inr(body=b):
            w, c, s = _measure_parts(b, n)
            return w + 1, c, s
        case App(fun=f, arg=a):
            wf, cf, sf = _measure_parts(f, n)
            wa, ca, sa = _measure_parts(a, n)
            return wf + wa, cf + ca, sf + sa
        case Bang(body=b):
            w, c, s = _measure_parts(b, n)
            return n * w + 1, c, s
        case LetBang(subject=sub, body=b):
            ws, cs, ss = _measure_parts(sub, n)
            wb, cb, sb = _measure_parts(b, n)
            return ws + wb, cs + cb + 1, ss + sb + wb
        case LetPair(subject=sub, body=b):
            ws, cs, ss = _measure_parts(sub, n)
            wb, cb, sb = _measure_parts(b, n)
            return ws + wb + 1, cs + cb + 1, ss + sb + wb
        case Pair(left=l, right=r):
            wl, cl, sl = _measure_parts(l, n)
            wr, cr, sr = _measure_parts(r, n)
            return wl + wr + 1, cl + cr, sl + sr
        case Case(subject=sub, left_branch=b1, right_branch=b2):
            ws, cs, ss = _measure_parts(sub, n)
            w1, c1, s1 = _measure_parts(b1, n)
            w2, c2, s2 = _measure_parts(b2, n)
            return ws + max(w1, w2) + 1, cs + c1 + c2, ss + s1 + s2
    raise NotATerm(f"metrics are defined on terms only: {t}")


def measure(t: Term, n: int) -> int:
    """Sum over every let occurrence of W(t,n) minus the weight of that
    let's body; strictly decreased by com1/com2 steps."""
    _require_term(t)
    r = rank(t)
    if n < r:
        raise RankTooSmall(f"measure needs n >= rank, got n={n} < rank={r}")
    w, count, bodies = _measure_parts(t, n)
    return count * w - bodies


@dataclass(frozen=True, slots=True)
class MetricSnapshot:
    n: int
    weight: int
    nlet: int
    measure: int
    rank: int
    size: int
    depth: int

    def to_json(self) -> dict:
        return {"n": self.n, "weight": self.weight, "nlet": self.nlet,
                "measure": self.measure, "rank": self.rank,
                "size": self.size, "depth": self.depth}


def snapshot(t: Term, n: int | None = None) -> MetricSnapshot:
    _require_term(t)
    r = rank(t)
    if n is None:
        n = max(1, r)
    if n < r:
        raise RankTooSmall(f"snapshot needs n >= rank, got n={n} < rank={r}")
    w, count, bodies = _measure_parts(t, n)
    return MetricSnapshot(n=n, weight=w, nlet=_nlet(t),
                          measure=count * w - bodies, rank=r,
                          size=t.size, depth=t.depth)


@dataclass(frozen=True, slots=True)
class Certificate:
    """Concrete integer bound on the length of any reduction sequence."""

    size: int
    depth: int
    degree: int
    bound: int
    weight_at_size: int

    def to_json(self) -> dict:
        return {"size": self.size, "depth": self.depth, "degree": self.degree,
                "bound": self.bound, "weight_at_size": self.weight_at_size}


def certificate(t: Term) -> Certificate:
    _require_term(t)
    degree = 3 * (t.depth + 1)
    return Certificate(size=t.size, depth=t.depth, degree=degree,
                       bound=t.size ** degree,
                       weight_at_size=_weight(t, t.size) ** 3)


@dataclass(frozen=True, slots=True)
class Verdict:
    ok: bool
    clause: str | None = None

    def __bool__(self) -> bool:
        return self.ok


OK = Verdict(True)


def check_step(before: MetricSnapshot, after: MetricSnapshot,
               rule: str) -> Verdict:
    """Proper rules must strictly decrease the weight; commutations must
    keep it constant and strictly decrease the measure."""
    if before.n != after.n:
        raise ValueError("snapshots taken at different n")
    if rule in PROPER_RULES:
        if after.weight < before.weight:
            return OK
        return Verdict(False, f"{rule} step must decrease weight: "
                              f"{before.weight} -> {after.weight}")
    if rule in COMMUTATION_RULES:
        if after.weight != before.weight:
            return Verdict(False, f"{rule} step must keep weight: "
                                  f"{before.weight} -> {after.weight}")
        if after.measure < before.measure:
            return OK
        return Verdict(False, f"{rule} step must decrease measure: "
                              f"{before.measure} -> {after.measure}")
    raise ValueError(f"unknown rule {rule!r}")


def key_lemma_check(t: Term, x: str, u: Term, n: int) -> Verdict:
    """Substitution weight bound: with k occurrences of a non-temporary x,
    W(t[u/x],n) <= W(t,n) + k*W(u,n); for temporary x the factor is n."""
    if not (t.is_term and u.is_term):
        raise SideConditionUnmet("both sides must be terms")
    if n < max(1, rank(t)):
        raise SideConditionUnmet(f"need n >= rank(t) = {rank(t)}")
    sub = substitute(t, x, u)
    if not sub.is_term:
        raise SideConditionUnmet("substitution did not produce a term")
    factor = n if x in t.tv else occurrences(t, x)
    allowed = _weight(t, n) + factor * _weight(u, n)
    got = _weight(sub, n)
    if got <= allowed:
        return OK
    return Verdict(False, f"W(t[u/x],n)={got} exceeds {allowed}")
