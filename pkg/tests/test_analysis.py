"""Termhood analysis, substitution, and the structural lemmas."""

import pytest

from conftest import term

from softlc.analysis import alpha_eq, analyze, depth_of, rank, substitute
from softlc.errors import InvalidPath, MarkerPresent, NotDesugared
from softlc.syntax import (
    Abs,
    App,
    Bang,
    Case,
    Inl,
    Inr,
    LetBang,
    LetPair,
    Pair,
    Unit,
    Var,
)


TWO_SRC = "\\s.\\x. let s be !s' in (s' (s' x))"
BUMP_SRC = "!(\\f.\\x. let f be !f' in !(f' x))"


def test_analyze_integer_two():
    info = analyze(term(TWO_SRC))
    assert info.is_term and info.is_well_formed
    assert (info.size, info.depth, info.rank) == (7, 0, 2)
    assert info.temp_vars == frozenset()
    assert info.free_vars == frozenset()


def test_analyze_variable():
    info = analyze(Var("x"))
    assert info.is_term and info.is_well_formed
    assert (info.size, info.depth, info.rank) == (1, 0, 0)
    assert info.occ == {"x": 1}


def test_abstraction_over_temporary_variable():
    info = analyze(term("\\x. !x"))
    assert not info.is_term
    path, clause = info.failure_witness
    assert path == ()
    assert clause == "abstraction over temporary variable"


def test_bang_over_duplicated_free_variable():
    info = analyze(term("!(x x)"))
    assert not info.is_term
    path, clause = info.failure_witness
    assert path == ()
    assert clause.startswith("bang body free variables occur more than once")


def test_duplicate_free_variable_is_a_term_but_not_well_formed():
    info = analyze(term("(x x)"))
    assert info.is_term and not info.is_well_formed
    assert info.failure_witness is None
    assert info.occ == {"x": 2}


def test_analyze_rejects_markers_and_plain_lets():
    with pytest.raises(MarkerPresent):
        analyze(term("gen[a] \\x. x"))
    with pytest.raises(NotDesugared):
        analyze(term("let t be x in x"))


def test_temp_vars_subset_of_free_vars(corpus):
    for t in corpus:
        for sub in _subterms(t):
            info = analyze(sub)
            assert info.temp_vars <= info.free_vars


def test_to_json_keys():
    doc = analyze(term(TWO_SRC)).to_json()
    assert set(doc) == {
        "size", "depth", "rank", "free_vars", "temp_vars",
        "is_term", "is_well_formed",
    }


def test_depth_of():
    bump = term(BUMP_SRC)
    assert depth_of(bump, (0, 0, 0, 1, 0)) == 2
    assert depth_of(bump, ()) == 0
    assert depth_of(bump, (0, 0, 0, 0)) == 1
    with pytest.raises(InvalidPath):
        depth_of(bump, (1,))


def test_substitute_examples():
    assert substitute(Var("x"), "x", term("\\y.y")) == term("\\y.y")
    assert substitute(term("\\y.(x y)"), "x", Var("y")) == Abs(
        "y$1", App(Var("y"), Var("y$1"))
    )
    assert substitute(term("(x x)"), "x", Var("g")) == App(Var("g"), Var("g"))


def test_substitute_no_occurrence_is_identity():
    t = term(TWO_SRC)
    assert substitute(t, "zz", Var("w")) == t


def test_alpha_eq_examples():
    assert alpha_eq(term("\\x.x"), term("\\y.y"))
    assert not alpha_eq(term("\\x.\\y.x"), term("\\x.\\y.y"))
    renamed = term("\\s.\\x. let s be !w in (w (w x))")
    assert alpha_eq(term(TWO_SRC), renamed)
    assert not alpha_eq(Var("x"), Var("y"))


def test_alpha_eq_respects_free_variables(corpus):
    for t in corpus[:50]:
        assert alpha_eq(t, t)


# Occurrence bookkeeping used by the lemma suites below.

def _subterms(t):
    yield t
    for child in _children(t):
        yield from _subterms(child)


def _children(t):
    match t:
        case Var() | Unit():
            return ()
        case Abs(body=b) | Bang(body=b) | Inl(body=b) | Inr(body=b):
            return (b,)
        case App(fun=f, arg=a) | Pair(left=f, right=a):
            return (f, a)
        case LetBang(subject=s, body=b) | LetPair(subject=s, body=b):
            return (s, b)
        case Case(subject=s, left_branch=l, right_branch=r):
            return (s, l, r)
    raise AssertionError(t)


def _free_occurrence_paths(t, bound=frozenset(), path=()):
    """Paths of every free-variable occurrence, branch-complete for Case."""
    match t:
        case Var(name=x):
            return {} if x in bound else {x: [path]}
        case Unit():
            return {}
        case Abs(param=x, body=b):
            return _free_occurrence_paths(b, bound | {x}, path + (0,))
        case App(fun=f, arg=a) | Pair(left=f, right=a):
            out = _free_occurrence_paths(f, bound, path + (0,))
            _merge(out, _free_occurrence_paths(a, bound, path + (1,)))
            return out
        case Bang(body=b) | Inl(body=b) | Inr(body=b):
            return _free_occurrence_paths(b, bound, path + (0,))
        case LetBang(subject=s, binder=x, body=b):
            out = _free_occurrence_paths(s, bound, path + (0,))
            _merge(out, _free_occurrence_paths(b, bound | {x}, path + (1,)))
            return out
        case LetPair(subject=s, left_name=x, right_name=y, body=b):
            out = _free_occurrence_paths(s, bound, path + (0,))
            _merge(out, _free_occurrence_paths(b, bound | {x, y}, path + (1,)))
            return out
        case Case(subject=s, left_name=x, left_branch=l, right_name=y, right_branch=r):
            out = _free_occurrence_paths(s, bound, path + (0,))
            _merge(out, _free_occurrence_paths(l, bound | {x}, path + (1,)))
            _merge(out, _free_occurrence_paths(r, bound | {y}, path + (2,)))
            return out
    raise AssertionError(t)


def _merge(into, other):
    for name, paths in other.items():
        into.setdefault(name, []).extend(paths)


def test_temporary_variables_are_linear(corpus):
    # Every temporary variable of every subterm occurs exactly once.
    checked = 0
    for t in corpus:
        for sub in _subterms(t):
            info = analyze(sub)
            assert info.is_term
            for x in info.temp_vars:
                assert info.occ[x] == 1
                checked += 1
    assert checked > 100


def test_free_occurrences_have_uniform_depth(corpus):
    # Free occurrences sit at depth 0 or 1, all occurrences of one
    # variable share a depth, and depth 1 marks exactly the temporaries.
    for t in corpus:
        for sub in list(_subterms(t))[:40]:
            info = analyze(sub)
            for x, paths in _free_occurrence_paths(sub).items():
                depths = {depth_of(sub, p) for p in paths}
                assert len(depths) == 1
                d = depths.pop()
                assert d <= 1
                assert (d == 1) == (x in info.temp_vars)


def test_bang_bodies_are_well_formed(corpus):
    checked = 0
    for t in corpus:
        for sub in _subterms(t):
            if isinstance(sub, Bang):
                assert analyze(sub.body).is_well_formed
                checked += 1
    assert checked > 50


def _lemma_pool(corpus):
    pool = []
    for t in corpus[:60]:
        pool.extend(_subterms(t))
    return pool[:600]


def test_substitution_preserves_termhood(corpus):
    # TV(u) empty, x not temporary in t, FV(u) disjoint from TV(t):
    # substitution keeps termhood and leaves TV unchanged.
    pool = _lemma_pool(corpus)
    checked = 0
    for t, u in zip(pool, reversed(pool)):
        ti, ui = analyze(t), analyze(u)
        for x in ti.free_vars:
            if ui.temp_vars or x in ti.temp_vars:
                continue
            if ui.free_vars & ti.temp_vars:
                continue
            out = analyze(substitute(t, x, u))
            assert out.is_term
            assert out.temp_vars == ti.temp_vars
            checked += 1
    assert checked > 100


def test_substitution_of_single_occurrence_merges_temporaries(corpus):
    # x not temporary, occurring once, FV/TV overlaps excluded:
    # the temporaries of the result are the union of both sides.
    pool = _lemma_pool(corpus)
    checked = 0
    for t, u in zip(pool, reversed(pool)):
        ti, ui = analyze(t), analyze(u)
        for x in ti.free_vars:
            if x in ti.temp_vars or ti.occ[x] != 1:
                continue
            if ui.free_vars & ti.temp_vars or ui.temp_vars & ti.free_vars:
                continue
            out = analyze(substitute(t, x, u))
            assert out.is_term
            assert out.temp_vars == ti.temp_vars | ui.temp_vars
            checked += 1
    assert checked > 100


def test_substitution_for_temporary_variable(corpus):
    # x temporary in t, u well-formed, free variables disjoint:
    # x leaves the temporaries and FV(u) joins them.
    pool = _lemma_pool(corpus)
    targets = [(t, analyze(t)) for t in pool if analyze(t).temp_vars]
    sources = [(u, analyze(u)) for u in pool if analyze(u).is_well_formed]
    checked = 0
    for t, ti in targets:
        for u, ui in sources[:8]:
            if ti.free_vars & ui.free_vars:
                continue
            for x in ti.temp_vars:
                out = analyze(substitute(t, x, u))
                assert out.is_term
                assert out.temp_vars == (ti.temp_vars - {x}) | ui.free_vars
                checked += 1
    assert checked > 100


def _rename_binders(t, suffix):
    match t:
        case Var() | Unit():
            return t
        case Abs(param=x, body=b, ann=a):
            return Abs(x + suffix, _rename_binders(_swap(b, x, x + suffix), suffix), a)
        case App(fun=f, arg=a):
            return App(_rename_binders(f, suffix), _rename_binders(a, suffix))
        case Bang(body=b):
            return Bang(_rename_binders(b, suffix))
        case Inl(body=b):
            return Inl(_rename_binders(b, suffix))
        case Inr(body=b):
            return Inr(_rename_binders(b, suffix))
        case Pair(left=l, right=r):
            return Pair(_rename_binders(l, suffix), _rename_binders(r, suffix))
        case LetBang(subject=s, binder=x, body=b):
            return LetBang(
                _rename_binders(s, suffix),
                x + suffix,
                _rename_binders(_swap(b, x, x + suffix), suffix),
            )
        case LetPair(subject=s, left_name=x, right_name=y, body=b):
            renamed = _swap(_swap(b, x, x + suffix), y, y + suffix)
            return LetPair(
                _rename_binders(s, suffix),
                x + suffix,
                y + suffix,
                _rename_binders(renamed, suffix),
            )
        case Case(subject=s, left_name=x, left_branch=l, right_name=y, right_branch=r):
            return Case(
                _rename_binders(s, suffix),
                x + suffix,
                _rename_binders(_swap(l, x, x + suffix), suffix),
                y + suffix,
                _rename_binders(_swap(r, y, y + suffix), suffix),
            )
    raise AssertionError(t)


def _swap(t, old, new):
    return substitute(t, old, Var(new))


def test_analyze_invariant_under_renaming(corpus):
    for t in corpus[:80]:
        assert not any(name.endswith("_rn") for name in t.fv)
        renamed = _rename_binders(t, "_rn")
        assert alpha_eq(t, renamed)
        a, b = analyze(t), analyze(renamed)
        assert (a.size, a.depth, a.rank) == (b.size, b.depth, b.rank)
        assert a.free_vars == b.free_vars
        assert a.temp_vars == b.temp_vars
        assert a.is_well_formed and b.is_well_formed


def test_rank_examples():
    assert rank(term(TWO_SRC)) == 2
    assert rank(Var("x")) == 0
    assert rank(term("\\s.\\x. let s be !s' in x")) == 0
    assert rank(term("\\s.\\x. let s be !s' in (s' x)")) == 1
