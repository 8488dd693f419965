"""Term corpora for property tests and the exhaustive bound checker.

Two producers:

* enumerate_terms builds every well-formed term of the core grammar
  (variable, abstraction, application, bang, let-bang) up to a size bound,
  one representative per renaming class.  Free variables are canonically
  labeled v0, v1, ... in order of first occurrence, so "all terms" is
  finite.
* random_term grows a well-formed term bottom-up from a seeded xorshift
  stream: leaves are combined under every constructor with rejection on
  the termhood conditions, and leftover temporary or duplicated free
  variables are discharged by wrapping let-bangs, which is exactly the
  role let plays in the calculus.
"""

from __future__ import annotations

from collections.abc import Iterator

from .analysis import substitute_many
from .reduction import Xorshift64Star, canonical_key
from .syntax import (Abs, App, Bang, Case, Inl, Inr, LetBang, LetPair, Pair,
                     Term, Unit, Var)

# -- canonical relabeling ---------------------------------------------------


def _free_order(t: Term, bound: frozenset[str], out: list[str]) -> None:
    match t:
        case Var(name):
            if name not in bound and name not in out:
                out.append(name)
        case Abs(param=p, body=b):
            _free_order(b, bound | {p}, out)
        case App(fun=f, arg=a):
            _free_order(f, bound, out)
            _free_order(a, bound, out)
        case Bang(body=b) | Inl(body=b) | Inr(body=b):
            _free_order(b, bound, out)
        case LetBang(subject=s, binder=p, body=b):
            _free_order(s, bound, out)
            _free_order(b, bound | {p}, out)
        case Pair(left=l, right=r):
            _free_order(l, bound, out)
            _free_order(r, bound, out)
        case LetPair(subject=s, left_name=x, right_name=y, body=b):
            _free_order(s, bound, out)
            _free_order(b, bound | {x, y}, out)
        case Case(subject=s, left_name=x, left_branch=b1,
                  right_name=y, right_branch=b2):
            _free_order(s, bound, out)
            _free_order(b1, bound | {x}, out)
            _free_order(b2, bound | {y}, out)
        case Unit():
            pass
        case _:
            raise AssertionError(f"unexpected node {type(t).__name__}")


def canonicalize_free(t: Term) -> Term:
    """Rename free variables to v0, v1, ... by first occurrence."""
    order: list[str] = []
    _free_order(t, frozenset(), order)
    mapping = {name: Var(f"v{i}") for i, name in enumerate(order)
               if name != f"v{i}"}
    return substitute_many(t, mapping) if mapping else t


# -- exhaustive enumeration -------------------------------------------------


def _merge_maps(avail: list[str], others: list[str]):
    """All injective partial maps others -> avail, as dicts."""
    results: list[dict[str, str]] = [{}]
    for name in others:
        grown = []
        for m in results:
            taken = set(m.values())
            grown.append(m)
            for target in avail:
                if target not in taken:
                    m2 = dict(m)
                    m2[name] = target
                    grown.append(m2)
        results = grown
    return results


def _shift_names(t: Term, offset: int) -> Term:
    order: list[str] = []
    _free_order(t, frozenset(), order)
    mapping = {name: Var(f"u{i + offset}") for i, name in enumerate(order)}
    return substitute_many(t, mapping) if mapping else t


def _mergeable(t: Term) -> list[str]:
    # temporary variables can never be shared across siblings
    return [v for v in sorted(t.fv) if v not in t.tv]


def enumerate_terms(max_size: int) -> dict[int, tuple[Term, ...]]:
    """Well-formed core terms by size, one per renaming class.

    Intermediate tables also hold terms with temporary or duplicated free
    variables (they occur inside larger well-formed terms); the returned
    tables are filtered down to the well-formed ones.
    """
    pool: dict[int, list[Term]] = {0: []}
    seen: set[str] = set()

    def admit(candidate: Term, size: int) -> None:
        if not candidate.is_term:
            return
        canon = canonicalize_free(candidate)
        key = canonical_key(canon)
        if key not in seen:
            seen.add(key)
            pool[size].append(canon)

    for size in range(1, max_size + 1):
        pool[size] = []
        if size == 1:
            admit(Var("v0"), 1)
            continue
        for t in pool[size - 1]:
            admit(Bang(t), size)
            admit(Abs("b", t), size)  # vacuous binder
            for v in sorted(t.fv):
                admit(Abs(v, t), size)
        for left_size in range(1, size - 1):
            right_size = size - 1 - left_size
            for t1 in pool[left_size]:
                avail = _mergeable(t1)
                for t2 in pool[right_size]:
                    shifted = _shift_names(t2, 0)
                    others = _mergeable(shifted)
                    for m in _merge_maps(avail, others):
                        merged = substitute_many(
                            shifted, {k: Var(v) for k, v in m.items()}) \
                            if m else shifted
                        admit(App(t1, merged), size)
                        for binder in sorted(merged.fv) + ["b"]:
                            admit(LetBang(t1, binder, merged), size)
    return {size: tuple(t for t in terms
                        if not t.tv and not t.dup)
            for size, terms in pool.items() if size >= 1}


# -- random generation ------------------------------------------------------

_CORE_OPS = (("leaf", 10), ("abs", 14), ("app", 20), ("bang", 9),
             ("letbang", 18))
_SUGAR_OPS = (("pair", 8), ("letpair", 8), ("case", 6), ("inl", 4),
              ("inr", 4), ("unit", 2))


def _pick(rng: Xorshift64Star, pool: list[Term]) -> Term:
    return pool.pop(rng.below(len(pool)))


def _binder_choice(rng: Xorshift64Star, t: Term, fresh: str) -> str:
    names = sorted(t.fv)
    i = rng.below(len(names) + 1)
    return fresh if i == len(names) else names[i]


def discharge(t: Term, salt: int = 0) -> Term:
    """Wrap let-bangs until no free variable is temporary or duplicated."""
    k = salt
    while t.tv or t.dup:
        v = min(t.tv | t.dup)
        t = LetBang(Var(f"d{k}"), v, t)
        k += 1
    return t


def random_term(seed: int | Xorshift64Star, target_size: int = 24,
                sugar: bool = True, discharge_free: bool = True) -> Term:
    """A well-formed term of size roughly target_size (never much above)."""
    rng = seed if isinstance(seed, Xorshift64Star) else Xorshift64Star(seed)
    ops = _CORE_OPS + _SUGAR_OPS if sugar else _CORE_OPS
    total = sum(w for _, w in ops)
    palette = max(3, target_size // 6)
    fresh = [0]

    def leaf() -> Term:
        if sugar and rng.below(12) == 0:
            return Unit()
        return Var(f"x{rng.below(palette)}")

    def fresh_name() -> str:
        fresh[0] += 1
        return f"f{fresh[0]}"

    cap = target_size + 4
    pool: list[Term] = [leaf() for _ in range(4)]
    best = pool[0]
    for _ in range(10 * target_size):
        if best.size >= target_size:
            break
        roll = rng.below(total)
        op = ""
        for name, w in ops:
            if roll < w:
                op = name
                break
            roll -= w
        if len(pool) < 2:
            pool.append(leaf())
        built: Term | None = None
        if op == "leaf":
            built = leaf()
        elif op == "unit":
            built = Unit()
        elif op == "abs":
            t = _pick(rng, pool)
            cand = Abs(_binder_choice(rng, t, fresh_name()), t)
            built = cand if cand.is_term else t
        elif op == "bang":
            t = _pick(rng, pool)
            cand = Bang(t)
            built = cand if cand.is_term else t
        elif op in ("inl", "inr"):
            t = _pick(rng, pool)
            built = Inl(t) if op == "inl" else Inr(t)
        elif op in ("app", "pair"):
            t1, t2 = _pick(rng, pool), _pick(rng, pool)
            cand = App(t1, t2) if op == "app" else Pair(t1, t2)
            if cand.is_term and cand.size <= cap:
                built = cand
            else:
                pool.append(t2)
                built = t1
        elif op == "letbang":
            t1, t2 = _pick(rng, pool), _pick(rng, pool)
            cand = LetBang(t1, _binder_choice(rng, t2, fresh_name()), t2)
            if cand.is_term and cand.size <= cap:
                built = cand
            else:
                pool.append(t2)
                built = t1
        elif op == "letpair":
            t1, t2 = _pick(rng, pool), _pick(rng, pool)
            x = _binder_choice(rng, t2, fresh_name())
            y = _binder_choice(rng, t2, fresh_name())
            if x == y:
                y = fresh_name()
            cand = LetPair(t1, x, y, t2)
            if cand.is_term and cand.size <= cap:
                built = cand
            else:
                pool.append(t2)
                built = t1
        elif op == "case":
            if len(pool) < 3:
                pool.append(leaf())
            s, b1, b2 = _pick(rng, pool), _pick(rng, pool), _pick(rng, pool)
            cand = Case(s, _binder_choice(rng, b1, fresh_name()), b1,
                        _binder_choice(rng, b2, fresh_name()), b2)
            if cand.is_term and cand.size <= cap:
                built = cand
            else:
                pool.append(b1)
                pool.append(b2)
                built = s
        if built is None:
            built = leaf()
        pool.append(built)
        if built.size > best.size:
            best = built
    for t in pool:
        if t.size > best.size:
            best = t
    return discharge(best) if discharge_free else best


def random_corpus(count: int, seed: int = 1, target_size: int = 24,
                  sugar: bool = True) -> Iterator[Term]:
    """A deterministic stream of well-formed terms sharing one generator."""
    rng = Xorshift64Star(seed)
    for _ in range(count):
        yield random_term(rng, target_size, sugar)
