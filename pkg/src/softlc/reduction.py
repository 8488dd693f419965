"""One-step reduction, strategies, normalization traces, and exhaustive
exploration of every reduction sequence.

Rules: beta, bang, com1 (let over let), com2 (let under application) from
the core calculus; pair, case-l, case-r for the derived constructs; and the
two added application commutations com-pair and com-case.  Commutations
rename a binder when the subterm moved into its scope mentions the same
name.

The random strategy draws from the redex list with xorshift64*: the state
update is x ^= x>>12; x ^= x<<25; x ^= x>>27 (64-bit), and the output is
state * 2685821657736338717 mod 2^64.  Seed 0 is replaced by
0x9E3779B97F4A7C15 so the generator never starts dead.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import fresh_name, substitute, substitute_many
from .errors import (CapExceeded, MarkerPresent, MonitorViolation, NotARedex,
                     NotATerm, NotDesugared, StepCapExceeded)
from .metrics import MetricSnapshot, certificate, check_step, snapshot
from .syntax import (Abs, App, Bang, Case, Inl, Inr, LetBang, LetPair, Pair,
                     Path, Term, Var, children, redex_rule, replace_at,
                     show_term, subterm_at)

_MASK = (1 << 64) - 1


class Xorshift64Star:
    def __init__(self, seed: int):
        self.state = (seed & _MASK) or 0x9E3779B97F4A7C15

    def next(self) -> int:
        x = self.state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK
        x ^= x >> 27
        self.state = x
        return (x * 2685821657736338717) & _MASK

    def below(self, bound: int) -> int:
        return self.next() % bound


def _reject_unreducible(t: Term) -> None:
    if t.has_marker:
        raise MarkerPresent("reduction operates on marker-free terms")
    if t.has_plain_let:
        raise NotDesugared("expand plain lets before reducing")


def redexes(t: Term) -> list[tuple[Path, str]]:
    """All redexes in leftmost-outermost (prefix) order."""
    _reject_unreducible(t)
    out: list[tuple[Path, str]] = []

    def walk(node: Term, path: Path) -> None:
        if not node.has_redex:
            return
        rule = redex_rule(node)
        if rule:
            out.append((path, rule))
        for i, k in enumerate(children(node)):
            walk(k, path + (i,))

    walk(t, ())
    return out


def _avoid_capture(binder: str, body: Term, moved: Term) -> tuple[str, Term]:
    if binder not in moved.fv:
        return binder, body
    b2 = fresh_name(binder, body.fv | moved.fv)
    return b2, substitute(body, binder, Var(b2))


def contract(node: Term, rule: str) -> Term:
    """Apply `rule` at the root of `node`."""
    match (rule, node):
        case ("beta", App(fun=Abs(param=x, body=b), arg=u)):
            return substitute(b, x, u)
        case ("bang", LetBang(subject=Bang(body=u), binder=x, body=b)):
            return substitute(b, x, u)
        case ("com1", LetBang(subject=LetBang(subject=t1, binder=y, body=t2),
                              binder=x, body=t3)):
            y2, t2 = _avoid_capture(y, t2, t3)
            return LetBang(t1, y2, LetBang(t2, x, t3))
        case ("com2", App(fun=LetBang(subject=t1, binder=x, body=t2), arg=t3)):
            x2, t2 = _avoid_capture(x, t2, t3)
            return LetBang(t1, x2, App(t2, t3))
        case ("pair", LetPair(subject=Pair(left=a, right=b),
                              left_name=x, right_name=y, body=u)):
            return substitute_many(u, {x: a, y: b})
        case ("case-l", Case(subject=Inl(body=u), left_name=x,
                             left_branch=b1)):
            return substitute(b1, x, u)
        case ("case-r", Case(subject=Inr(body=u), right_name=y,
                             right_branch=b2)):
            return substitute(b2, y, u)
        case ("com-pair", App(fun=LetPair(subject=s, left_name=x,
                                          right_name=y, body=b), arg=v)):
            x2, b = _avoid_capture(x, b, v)
            y2, b = _avoid_capture(y, b, v)
            return LetPair(s, x2, y2, App(b, v))
        case ("com-case", App(fun=Case(subject=s, left_name=x1,
                                       left_branch=b1, right_name=x2,
                                       right_branch=b2), arg=v)):
            x1b, b1 = _avoid_capture(x1, b1, v)
            x2b, b2 = _avoid_capture(x2, b2, v)
            return Case(s, x1b, App(b1, v), x2b, App(b2, v))
    raise NotARedex(f"rule {rule} does not apply at {show_term(node)}")


def step(t: Term, at: Path, rule: str) -> Term:
    _reject_unreducible(t)
    if not t.is_term:
        raise NotATerm(f"reduction is defined on terms: {show_term(t)}")
    node = subterm_at(t, at)
    if redex_rule(node) != rule:
        raise NotARedex(f"no {rule} redex at path {list(at)}")
    return replace_at(t, at, contract(node, rule))


def _first_redex(t: Term) -> tuple[Path, str]:
    path: list[int] = []
    node = t
    while True:
        rule = redex_rule(node)
        if rule:
            return tuple(path), rule
        for i, k in enumerate(children(node)):
            if k.has_redex:
                path.append(i)
                node = k
                break
        else:
            raise NotARedex("no redex present")


def _last_redex(t: Term) -> tuple[Path, str]:
    path: list[int] = []
    node = t
    while True:
        last = None
        for i, k in enumerate(children(node)):
            if k.has_redex:
                last = i
        if last is None:
            rule = redex_rule(node)
            if rule is None:
                raise NotARedex("no redex present")
            return tuple(path), rule
        path.append(last)
        node = children(node)[last]


@dataclass(frozen=True, slots=True)
class Step:
    path: Path
    rule: str
    result: Term
    metrics: MetricSnapshot | None = None

    def to_json(self) -> dict:
        doc: dict = {"path": list(self.path), "rule": self.rule,
                     "size_after": self.result.size}
        if self.metrics is not None:
            doc["weight_after"] = self.metrics.weight
            doc["measure_after"] = self.metrics.measure
        return doc


@dataclass(frozen=True, slots=True)
class Finding:
    """A monitored step that failed its decrease check but is a known,
    reported anomaly (com-case duplicates its argument) rather than a
    counterexample worth aborting on."""

    index: int
    path: Path
    rule: str
    clause: str

    def to_json(self) -> dict:
        return {"index": self.index, "path": list(self.path),
                "rule": self.rule, "clause": self.clause}


@dataclass(frozen=True, slots=True)
class Trace:
    initial: Term
    steps: tuple[Step, ...]
    final: Term
    strategy: str
    findings: tuple[Finding, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def to_json(self) -> dict:
        return {
            "initial": show_term(self.initial),
            "final": show_term(self.final),
            "strategy": self.strategy,
            "length": len(self.steps),
            "steps": [s.to_json() for s in self.steps],
            "findings": [f.to_json() for f in self.findings],
        }


_STRATEGY_NAMES = {
    "lo": "lo", "leftmost-outermost": "lo",
    "ri": "ri", "rightmost-innermost": "ri",
    "random": "random",
}


def normalize(t: Term, strategy: str = "lo", seed: int = 0,
              monitor: bool = False, step_cap: int = 0,
              n: int | None = None) -> Trace:
    """Reduce to normal form.

    step_cap 0 means the certificate bound size^(3(depth+1)); exceeding the
    cap raises, it never truncates silently.  With monitor=True every step
    is checked for the weight/measure decrease appropriate to its rule,
    comparing the redex with its contractum (a step in the lighter branch
    of a case leaves enclosing weights unchanged, so whole-term weights
    cannot witness the decrease); violations abort except for com-case,
    whose failures are recorded as findings on the trace.
    """
    _reject_unreducible(t)
    if not t.is_term:
        raise NotATerm(f"reduction is defined on terms: {show_term(t)}")
    kind = _STRATEGY_NAMES.get(strategy)
    if kind is None:
        raise ValueError(f"unknown strategy {strategy!r}")
    cap = step_cap if step_cap > 0 else certificate(t).bound

    rng = Xorshift64Star(seed) if kind == "random" else None
    label = f"random(seed={seed})" if kind == "random" else kind

    mon_n = snapshot(t, n).n if monitor else 0
    steps: list[Step] = []
    findings: list[Finding] = []
    cur = t
    while cur.has_redex:
        if len(steps) >= cap:
            raise StepCapExceeded(
                f"no normal form within {cap} steps (size {t.size}, "
                f"depth {t.depth})")
        if kind == "lo":
            path, rule = _first_redex(cur)
        elif kind == "ri":
            path, rule = _last_redex(cur)
        else:
            options = redexes(cur)
            path, rule = options[rng.below(len(options))]
        local = snapshot(subterm_at(cur, path), mon_n) if monitor else None
        cur = step(cur, path, rule)
        after = None
        if monitor:
            verdict = check_step(local, snapshot(subterm_at(cur, path),
                                                 mon_n), rule)
            if not verdict:
                if rule == "com-case":
                    findings.append(Finding(len(steps), path, rule,
                                            verdict.clause))
                else:
                    raise MonitorViolation(
                        f"step {len(steps)} ({rule} at {list(path)}): "
                        f"{verdict.clause}")
            after = snapshot(cur, mon_n)
        steps.append(Step(path, rule, cur, after))
    return Trace(initial=t, steps=tuple(steps), final=cur, strategy=label,
                 findings=tuple(findings))


def _canonical(t: Term, env: dict[str, str], fresh: list[int]) -> str:
    def bind(name: str) -> tuple[str, dict[str, str]]:
        fresh[0] += 1
        label = f"#{fresh[0]}"
        e2 = dict(env)
        e2[name] = label
        return label, e2

    match t:
        case Var(name):
            return env.get(name, name)
        case Abs(param=x, body=b):
            label, e2 = bind(x)
            return f"(\\{label}.{_canonical(b, e2, fresh)})"
        case LetBang(subject=s, binder=x, body=b):
            subj = _canonical(s, env, fresh)
            label, e2 = bind(x)
            return f"(let {subj} !{label} {_canonical(b, e2, fresh)})"
        case LetPair(subject=s, left_name=x, right_name=y, body=b):
            subj = _canonical(s, env, fresh)
            lx, e2 = bind(x)
            fresh[0] += 1
            ly = f"#{fresh[0]}"
            e2[y] = ly
            return f"(let {subj} <{lx},{ly}> {_canonical(b, e2, fresh)})"
        case Case(subject=s, left_name=x1, left_branch=b1,
                  right_name=x2, right_branch=b2):
            subj = _canonical(s, env, fresh)
            l1, e1 = bind(x1)
            c1 = _canonical(b1, e1, fresh)
            l2, e2 = bind(x2)
            c2 = _canonical(b2, e2, fresh)
            return f"(case {subj} {l1}:{c1} {l2}:{c2})"
        case _:
            kids = ",".join(_canonical(k, env, fresh) for k in children(t))
            return f"({type(t).__name__} {kids})"


def canonical_key(t: Term) -> str:
    """A string equal for alpha-equivalent marker-free terms."""
    return _canonical(t, {}, [0])


def all_sequences(t: Term, node_cap: int = 100000) -> tuple[Trace, ...]:
    """Every maximal reduction sequence from t, as replayable traces.

    Distinct terms reached (up to alpha) are capped by node_cap.  Sequence
    suffixes are shared between alpha-equivalent intermediate terms, which
    keeps the exploration linear in the size of the reduction graph even
    though the number of sequences can be much larger.
    """
    _reject_unreducible(t)
    if not t.is_term:
        raise NotATerm(f"reduction is defined on terms: {show_term(t)}")

    memo: dict[str, tuple[tuple[tuple[Path, str], ...], ...]] = {}

    def seqs(u: Term) -> tuple[tuple[tuple[Path, str], ...], ...]:
        key = canonical_key(u)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if len(memo) >= node_cap:
            raise CapExceeded(f"more than {node_cap} distinct terms reached")
        options = redexes(u)
        if not options:
            result: tuple = ((),)
        else:
            acc = []
            for path, rule in options:
                nxt = step(u, path, rule)
                for suffix in seqs(nxt):
                    acc.append(((path, rule),) + suffix)
            result = tuple(acc)
        memo[key] = result
        return result

    traces = []
    for seq in seqs(t):
        cur = t
        steps = []
        for path, rule in seq:
            cur = step(cur, path, rule)
            steps.append(Step(path, rule, cur))
        traces.append(Trace(initial=t, steps=tuple(steps), final=cur,
                            strategy="exhaustive"))
    return tuple(traces)
