"""Concrete syntax.

One definition per `def name [: Type] = term`; comments run from `--` to end
of line.  Application is juxtaposition and associates left; `!` binds tighter
than application; `\\x. t`, `let u be !x in t` (and the `<x,y>` / plain-
variable forms), `case u of inl(x) => t1 | inr(y) => t2`, pairs `<t, u>`,
`inl(t)`, `inr(t)`, unit `()`.  Type markers: `gen[a] t`, `t @[A]`,
`fold[A] t`, `unfold t`.  Types: `a`, `A -o B`, `!A`, `A * B`, `A + B`, `1`,
`forall a. A`, `mu X. A`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import formulas as fo
from .errors import DuplicateDefinition, ParseError
from .syntax import (Abs, App, Bang, Case, Fold, Gen, Inl, Inr, Inst,
                     LetBang, LetPair, Pair, PlainLet, Term, Unfold, Unit,
                     Var)

KEYWORDS = frozenset((
    "def", "let", "be", "in", "case", "of", "inl", "inr",
    "gen", "fold", "unfold", "forall", "mu",
))

_SYMBOLS = ("=>", "-o", "\\", ".", "(", ")", "<", ">", ",", "!", "|",
            "=", ":", "@", "[", "]", "*", "+")


@dataclass(frozen=True, slots=True)
class Token:
    kind: str   # "ident", "kw", "num", "eof", or the symbol itself
    text: str
    line: int
    col: int


def _is_ident_start(c: str) -> bool:
    return c.isalpha()


def _is_ident_char(c: str) -> bool:
    # `$` appears only in machine-freshened names, but printed terms that
    # contain them must still reparse.
    return c.isalnum() or c in "_'$"


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if _is_ident_start(c):
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            toks.append(Token("kw" if word in KEYWORDS else "ident",
                              word, line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("num", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token(sym, sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


_ATOM_STARTERS = frozenset(("ident", "(", "<", "!"))
_EXTENDERS = frozenset(("\\",))  # plus keyword extenders below
_KW_ATOMS = frozenset(("inl", "inr"))
_KW_EXTENDERS = frozenset(("let", "case", "gen", "fold", "unfold"))


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def fail(self, message: str) -> ParseError:
        t = self.peek()
        what = "end of input" if t.kind == "eof" else repr(t.text)
        return ParseError(f"{message}, found {what}", t.line, t.col)

    def expect(self, kind: str, what: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise self.fail(f"expected {what or kind!r}")
        return self.next()

    def expect_kw(self, word: str) -> Token:
        t = self.peek()
        if t.kind != "kw" or t.text != word:
            raise self.fail(f"expected {word!r}")
        return self.next()

    def ident(self, what: str = "an identifier") -> str:
        return self.expect("ident", what).text

    # Terms -----------------------------------------------------------

    def _starts_atom(self, t: Token) -> bool:
        return (t.kind in _ATOM_STARTERS
                or (t.kind == "kw" and t.text in _KW_ATOMS))

    def _starts_extender(self, t: Token) -> bool:
        return (t.kind in _EXTENDERS
                or (t.kind == "kw" and t.text in _KW_EXTENDERS))

    def term(self) -> Term:
        items: list[Term] = []
        while True:
            t = self.peek()
            if self._starts_atom(t):
                items.append(self.atom())
            elif self._starts_extender(t):
                items.append(self.extender())
                break
            else:
                break
        if not items:
            raise self.fail("expected a term")
        out = items[0]
        for arg in items[1:]:
            out = App(out, arg)
        return out

    def atom(self) -> Term:
        out = self.primary()
        while self.peek().kind == "@":
            self.next()
            self.expect("[")
            ty = self.type_()
            self.expect("]")
            out = Inst(out, ty)
        return out

    def primary(self) -> Term:
        t = self.peek()
        if t.kind == "ident":
            return Var(self.next().text)
        if t.kind == "(":
            self.next()
            if self.peek().kind == ")":
                self.next()
                return Unit()
            inner = self.term()
            self.expect(")")
            return inner
        if t.kind == "<":
            self.next()
            left = self.term()
            self.expect(",")
            right = self.term()
            self.expect(">")
            return Pair(left, right)
        if t.kind == "!":
            self.next()
            return Bang(self.atom())
        if t.kind == "kw" and t.text in ("inl", "inr"):
            self.next()
            self.expect("(")
            body = self.term()
            self.expect(")")
            return Inl(body) if t.text == "inl" else Inr(body)
        raise self.fail("expected a term")

    def extender(self) -> Term:
        t = self.peek()
        if t.kind == "\\":
            self.next()
            param = self.ident("a parameter name")
            ann = None
            if self.peek().kind == ":":
                self.next()
                ann = self.type_()
            self.expect(".")
            return Abs(param, self.term(), ann)
        if t.kind != "kw":
            raise self.fail("expected a term")
        if t.text == "let":
            self.next()
            subject = self.term()
            self.expect_kw("be")
            p = self.peek()
            if p.kind == "!":
                self.next()
                binder = self.ident("a binder name")
                self.expect_kw("in")
                return LetBang(subject, binder, self.term())
            if p.kind == "<":
                self.next()
                x = self.ident("a binder name")
                self.expect(",")
                y = self.ident("a binder name")
                self.expect(">")
                self.expect_kw("in")
                return LetPair(subject, x, y, self.term())
            binder = self.ident("a binder pattern")
            self.expect_kw("in")
            return PlainLet(subject, binder, self.term())
        if t.text == "case":
            self.next()
            subject = self.term()
            self.expect_kw("of")
            self.expect_kw("inl")
            self.expect("(")
            x1 = self.ident()
            self.expect(")")
            self.expect("=>")
            b1 = self.term()
            self.expect("|")
            self.expect_kw("inr")
            self.expect("(")
            x2 = self.ident()
            self.expect(")")
            self.expect("=>")
            b2 = self.term()
            return Case(subject, x1, b1, x2, b2)
        if t.text == "gen":
            self.next()
            self.expect("[")
            tv = self.ident("a type variable")
            self.expect("]")
            return Gen(tv, self.term())
        if t.text == "fold":
            self.next()
            self.expect("[")
            ty = self.type_()
            self.expect("]")
            return Fold(ty, self.term())
        if t.text == "unfold":
            self.next()
            return Unfold(self.term())
        raise self.fail("expected a term")

    # Types -----------------------------------------------------------

    def type_(self) -> fo.Formula:
        t = self.peek()
        if t.kind == "kw" and t.text in ("forall", "mu"):
            self.next()
            var = self.ident("a type variable")
            self.expect(".")
            body = self.type_()
            return fo.Forall(var, body) if t.text == "forall" else fo.Mu(var, body)
        return self._lolli()

    def _lolli(self) -> fo.Formula:
        left = self._plus()
        if self.peek().kind == "-o":
            self.next()
            return fo.Lolli(left, self.type_())
        return left

    def _plus(self) -> fo.Formula:
        left = self._tensor()
        if self.peek().kind == "+":
            self.next()
            return fo.Plus(left, self._plus())
        return left

    def _tensor(self) -> fo.Formula:
        left = self._type_atom()
        if self.peek().kind == "*":
            self.next()
            return fo.Tensor(left, self._tensor())
        return left

    def _type_atom(self) -> fo.Formula:
        t = self.peek()
        if t.kind == "!":
            self.next()
            return fo.Bang(self._type_atom())
        if t.kind == "ident":
            return fo.TVar(self.next().text)
        if t.kind == "num" and t.text == "1":
            self.next()
            return fo.ONE
        if t.kind == "(":
            self.next()
            inner = self.type_()
            self.expect(")")
            return inner
        raise self.fail("expected a type")


@dataclass(frozen=True, slots=True)
class Definition:
    name: str
    ascription: fo.Formula | None
    body: Term
    line: int
    col: int


@dataclass(frozen=True, slots=True)
class SourceModule:
    definitions: tuple[Definition, ...]
    by_name: dict[str, Definition] = field(compare=False, hash=False)

    def __getitem__(self, name: str) -> Definition:
        return self.by_name[name]

    def __contains__(self, name: str) -> bool:
        return name in self.by_name


def parse(text: str) -> SourceModule:
    p = _Parser(tokenize(text))
    defs: list[Definition] = []
    seen: dict[str, Definition] = {}
    while p.peek().kind != "eof":
        head = p.expect_kw("def")
        name = p.ident("a definition name")
        if name in seen:
            raise DuplicateDefinition(name)
        ascription = None
        if p.peek().kind == ":":
            p.next()
            ascription = p.type_()
        p.expect("=")
        body = p.term()
        d = Definition(name, ascription, body, head.line, head.col)
        defs.append(d)
        seen[name] = d
    return SourceModule(tuple(defs), seen)


def parse_term(text: str) -> Term:
    """A single term, for tests and the command line."""
    p = _Parser(tokenize(text))
    t = p.term()
    p.expect("eof", "end of input")
    return t


def parse_type(text: str) -> fo.Formula:
    p = _Parser(tokenize(text))
    ty = p.type_()
    p.expect("eof", "end of input")
    return ty


def link_module(m: SourceModule,
                base: dict[str, Term] | None = None) -> dict[str, Term]:
    """Inline references to earlier definitions (and to `base`, typically
    the standard library) into each body.  Later definitions shadow base
    entries; inlined bodies keep their markers and annotations."""
    from .analysis import substitute

    env: dict[str, Term] = dict(base) if base else {}
    for d in m.definitions:
        t = d.body
        for v in sorted(t.fv & env.keys()):
            t = substitute(t, v, env[v])
        env[d.name] = t
    return env
