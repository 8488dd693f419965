"""Type syntax: variables, linear implication, !, second-order and recursive
quantifiers, plus 1/tensor/sum kept as primitive constructors.

Concrete syntax (see parser): `a`, `A -o B` (right-associative), `!A`,
`forall a. A`, `mu X. A`, `A * B`, `A + B`, `1`, with precedence
! > * > + > -o and both * and + right-associative.
"""

from __future__ import annotations

from dataclasses import dataclass


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True, slots=True)
class TVar(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Lolli(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Bang(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class Mu(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class One(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Tensor(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Plus(Formula):
    left: Formula
    right: Formula


ONE = One()


def free_tvars(f: Formula) -> frozenset[str]:
    match f:
        case TVar(name):
            return frozenset((name,))
        case Lolli(a, b) | Tensor(a, b) | Plus(a, b):
            return free_tvars(a) | free_tvars(b)
        case Forall(v, body) | Mu(v, body):
            return free_tvars(body) - {v}
        case Bang(body):
            return free_tvars(body)
        case One():
            return frozenset()
    raise TypeError(f"not a formula: {f!r}")


def _fresh_tvar(base: str, avoid: frozenset[str]) -> str:
    k = 1
    while f"{base}${k}" in avoid:
        k += 1
    return f"{base}${k}"


def subst_type(f: Formula, name: str, g: Formula) -> Formula:
    """Capture-avoiding substitution of g for the free type variable name."""
    match f:
        case TVar(n):
            return g if n == name else f
        case Lolli(a, b):
            return Lolli(subst_type(a, name, g), subst_type(b, name, g))
        case Tensor(a, b):
            return Tensor(subst_type(a, name, g), subst_type(b, name, g))
        case Plus(a, b):
            return Plus(subst_type(a, name, g), subst_type(b, name, g))
        case Bang(body):
            return Bang(subst_type(body, name, g))
        case One():
            return f
        case Forall(v, body) | Mu(v, body):
            cls = type(f)
            if v == name or name not in free_tvars(body):
                return f
            if v in free_tvars(g):
                v2 = _fresh_tvar(v, free_tvars(body) | free_tvars(g) | {name})
                body = subst_type(body, v, TVar(v2))
                v = v2
            return cls(v, subst_type(body, name, g))
    raise TypeError(f"not a formula: {f!r}")


def alpha_eq_type(f1: Formula, f2: Formula, env: tuple[tuple[str, str], ...] = ()) -> bool:
    """Equality up to consistent renaming of bound type variables.

    env carries corresponding bound-variable pairs from enclosing binders.
    Free variables must match by name (after checking they are not bound).
    """
    match (f1, f2):
        case (TVar(a), TVar(b)):
            for x, y in reversed(env):
                if a == x or b == y:
                    return a == x and b == y
            return a == b
        case (Lolli(a1, b1), Lolli(a2, b2)) | (Tensor(a1, b1), Tensor(a2, b2)) | (Plus(a1, b1), Plus(a2, b2)):
            return alpha_eq_type(a1, a2, env) and alpha_eq_type(b1, b2, env)
        case (Bang(a), Bang(b)):
            return alpha_eq_type(a, b, env)
        case (One(), One()):
            return True
        case (Forall(v1, b1), Forall(v2, b2)) | (Mu(v1, b1), Mu(v2, b2)):
            return alpha_eq_type(b1, b2, env + ((v1, v2),))
    return False


# Printing. Precedence levels, loosest first: quantifier bodies and -o (0),
# + (1), * (2), ! and atoms (3).

def _show(f: Formula, level: int) -> str:
    match f:
        case TVar(name):
            return name
        case One():
            return "1"
        case Forall(v, body):
            s = f"forall {v}. {_show(body, 0)}"
            return f"({s})" if level > 0 else s
        case Mu(v, body):
            s = f"mu {v}. {_show(body, 0)}"
            return f"({s})" if level > 0 else s
        case Lolli(a, b):
            s = f"{_show(a, 1)} -o {_show(b, 0)}"
            return f"({s})" if level > 0 else s
        case Plus(a, b):
            s = f"{_show(a, 2)} + {_show(b, 1)}"
            return f"({s})" if level > 1 else s
        case Tensor(a, b):
            s = f"{_show(a, 3)} * {_show(b, 2)}"
            return f"({s})" if level > 2 else s
        case Bang(body):
            return f"!{_show(body, 3)}"
    raise TypeError(f"not a formula: {f!r}")


def show_type(f: Formula) -> str:
    return _show(f, 0)
