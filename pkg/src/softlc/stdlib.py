"""Encoded data and the demo programs over a three-letter alphabet.

The definitions themselves live in the bundled source files: `stdlib.slc`
holds the bare terms the reduction engine runs, `stdlib.typed.slc` the
annotated twins the checker accepts.  This module loads them, bridges
host values to their term images (letters, lists, counted values,
numerals), and drives the two end-to-end demos: sorting and mapping.

Counted values follow the shape `\\s. \\x. <a, let s be !s' in (s' ... (s'
x))>`: a payload paired with a unary counter that pays for each step of
an iteration.  A counted list carries its own length allowance, which is
why the demos take an explicit slack argument.
"""

from __future__ import annotations

import functools
import os
from collections.abc import Iterable, Mapping
from importlib import resources
from types import MappingProxyType

from . import formulas as fo
from .analysis import alpha_eq
from .errors import CapExceeded, NotACountedValue, NotAListValue
from .metrics import certificate
from .parser import SourceModule, link_module, parse
from .reduction import normalize
from .syntax import (Abs, App, Bang, Case, Gen, Inl, Inr, LetBang, Pair, Term,
                     Unit, Var, erase_markers, expand_plain_let)

#: Closed normal images of the three letters, indexed by host digit.
LETTERS: tuple[Term, ...] = (Inl(Unit()),
                             Inr(Inl(Unit())),
                             Inr(Inr(Unit())))


def numeral(n: int, annotated: bool = False) -> Term:
    """The unary numeral: s applied n times under one multiplexed let."""
    if n < 0:
        raise ValueError("numerals encode nonnegative integers")
    chain: Term = Var("x")
    for _ in range(n):
        chain = App(Var("s'"), chain)
    body = LetBang(Var("s"), "s'", chain)
    if not annotated:
        return Abs("s", Abs("x", body))
    a = fo.TVar("a")
    return Gen("a", Abs("s", Abs("x", body, a), fo.Bang(fo.Lolli(a, a))))


def encode_letter(k: int) -> Term:
    if k not in (0, 1, 2):
        raise ValueError(f"no letter {k}: the alphabet is 0, 1, 2")
    return LETTERS[k]


def decode_letter(t: Term) -> int:
    for k, image in enumerate(LETTERS):
        if alpha_eq(t, image):
            return k
    raise NotAListValue("not a letter of the three-letter alphabet")


def encode_list(xs: Iterable[int]) -> Term:
    """List of host digits as a raw sum-of-pairs value."""
    image: Term = Inl(Unit())
    for k in reversed([encode_letter(x) for x in xs]):
        image = Inr(Pair(k, image))
    return image


def decode_list(t: Term) -> list[int]:
    """Read back a normal-form list of letters.

    Recognizes exactly the shapes `inl(())` and `inr(<a, rest>)`; anything
    else, including a non-letter element, raises.
    """
    out: list[int] = []
    while True:
        match t:
            case Inl(body=Unit()):
                return out
            case Inr(body=Pair(left=a, right=rest)):
                out.append(decode_letter(a))
                t = rest
            case _:
                raise NotAListValue("normal form is not a list of letters")


def encode_counted(n: int, payload: Term) -> Term:
    """The canonical counted value: payload paired with an n-step counter."""
    if n < 0:
        raise ValueError("the counter is a nonnegative integer")
    chain: Term = Var("x")
    for _ in range(n):
        chain = App(Var("s'"), chain)
    return Abs("s", Abs("x", Pair(payload, LetBang(Var("s"), "s'", chain))))


def decode_counted(t: Term,
                   probe: tuple[str, str] = ("c", "z")) -> tuple[int, Term]:
    """Run a counted value against fresh probe variables and read it back.

    Applies t to `!c` and `z`, normalizes, and matches the result against
    `<payload, c (c ... (c z))>`, returning (count, payload).  The probe
    names are primed until they avoid the free variables of t.
    """
    c, z = probe
    while c in t.fv or z in t.fv or c == z:
        c, z = c + "'", z + "'"
    r = normalize(App(App(t, Bang(Var(c))), Var(z)), strategy="ri").final
    if not isinstance(r, Pair):
        raise NotACountedValue("probed value did not produce a pair")
    n, cur = 0, r.right
    while isinstance(cur, App) and cur.fun == Var(c):
        n, cur = n + 1, cur.arg
    if cur != Var(z):
        raise NotACountedValue("counter component is not a probe chain")
    return n, r.left


@functools.cache
def _load(path: str | None, typed: bool) -> SourceModule:
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            return parse(fh.read())
    name = "stdlib.typed.slc" if typed else "stdlib.slc"
    text = resources.files(__package__).joinpath("data").joinpath(name) \
                    .read_text(encoding="utf-8")
    return parse(text)


def stdlib_env(typed: bool = False) -> SourceModule:
    """The bundled library, parsed once and shared.

    The SLC_STDLIB environment variable overrides the bundled bare file;
    the annotated twin is always the bundled one.
    """
    path = None if typed else os.environ.get("SLC_STDLIB")
    return _load(path, typed)


@functools.cache
def _terms_for(path: str | None) -> Mapping[str, Term]:
    linked = link_module(_load(path, typed=False))
    return MappingProxyType({name: expand_plain_let(erase_markers(t))
                             for name, t in linked.items()})


def stdlib_terms() -> Mapping[str, Term]:
    """Library definitions linked, desugared, and ready for the engine."""
    return _terms_for(os.environ.get("SLC_STDLIB"))


def demo_function(name: str) -> Term:
    """The two letter-to-letter functions the mapping demo accepts."""
    if name == "id":
        return Abs("y", Var("y"))
    if name == "succ":
        return Abs("y", Case(Var("y"), "u", Inr(Inl(Unit())),
                             "v", Case(Var("v"), "w", Inr(Inr(Unit())),
                                       "w", Inl(Unit()))))
    raise ValueError(f"unknown demo function {name!r}: expected id or succ")


def _run_demo(term: Term, strategy: str, monitor: bool):
    # The bound is a theorem about every reduction sequence, so the demo
    # checks it rather than assuming it.
    cert = certificate(term)
    trace = normalize(term, strategy=strategy, monitor=monitor)
    if len(trace.steps) > cert.bound:
        raise CapExceeded(f"demo took {len(trace.steps)} steps against a "
                          f"certificate bound of {cert.bound}")
    count, payload = decode_counted(trace.final)
    del count  # leftover slack, spent counter steps excluded
    return decode_list(payload), trace, cert


def sort_demo(xs: Iterable[int], slack: int, strategy: str = "ri",
              monitor: bool = False):
    """run_sort plus its trace and certificate, for reporting."""
    digits = list(xs)
    if slack < len(digits):
        raise ValueError("slack must be at least the length of the list")
    lib = stdlib_terms()
    image = encode_counted(slack, encode_list(digits))
    return _run_demo(App(lib["sort"], Bang(image)), strategy, monitor)


def map_demo(fn: str, xs: Iterable[int], slack: int, strategy: str = "ri",
             monitor: bool = False):
    """run_map plus its trace and certificate, for reporting."""
    digits = list(xs)
    if slack < len(digits):
        raise ValueError("slack must be at least the length of the list")
    lib = stdlib_terms()
    image = encode_counted(slack, encode_list(digits))
    term = App(App(lib["map"], Bang(demo_function(fn))), image)
    return _run_demo(term, strategy, monitor)


def run_sort(xs: Iterable[int], slack: int, strategy: str = "ri",
             monitor: bool = False) -> list[int]:
    """Sort a list of host digits by normalizing the encoded sort program.

    The slack pays for the iteration and must be at least the length of
    the input; any larger value also works.
    """
    return sort_demo(xs, slack, strategy, monitor)[0]


def run_map(fn: str, xs: Iterable[int], slack: int, strategy: str = "ri",
            monitor: bool = False) -> list[int]:
    """Map a letter function over a list of host digits.

    The encoded map builds its output list back to front, so the result
    is the host-level map in reverse order.
    """
    return map_demo(fn, xs, slack, strategy, monitor)[0]
