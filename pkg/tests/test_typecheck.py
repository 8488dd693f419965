"""The bidirectional checker, formulas, and the module report."""

import pytest

from conftest import term

from softlc.analysis import analyze
from softlc.errors import (
    DepthViolation,
    ForallEscape,
    LinearityViolation,
    TypeCheckError,
    TypeMismatch,
    UnknownVariable,
)
from softlc import formulas as fo
from softlc.parser import parse, parse_type
from softlc.syntax import Var, erase_markers
from softlc.typecheck import Context, check, check_module, infer


N_SRC = "forall a. !(a -o a) -o a -o a"
LA_SRC = "mu X. (1 + (a * X))"
TWO_ANN = "\\s : !(a -o a). \\x : a. let s be !s' in (s' (s' x))"


def test_formula_parse_print_round_trip():
    for src in (N_SRC, LA_SRC, "1", "(a * b) + 1", "!a -o forall b. (b * a)"):
        f = parse_type(src)
        assert parse_type(fo.show_type(f)) == f


def test_formula_shapes():
    assert parse_type("1") == fo.One()
    assert parse_type("a -o b -o c") == fo.Lolli(
        fo.TVar("a"), fo.Lolli(fo.TVar("b"), fo.TVar("c"))
    )
    assert parse_type("!a -o b") == fo.Lolli(fo.Bang(fo.TVar("a")), fo.TVar("b"))


def test_alpha_eq_type():
    assert fo.alpha_eq_type(parse_type(N_SRC), parse_type("forall c. !(c -o c) -o c -o c"))
    assert not fo.alpha_eq_type(parse_type("forall a. a"), parse_type("forall a. 1"))
    assert not fo.alpha_eq_type(parse_type("a"), parse_type("b"))


def test_subst_type_examples():
    n = parse_type(N_SRC)
    assert fo.subst_type(parse_type("a -o a"), "a", n) == fo.Lolli(n, n)
    la = parse_type(LA_SRC)
    unfolded = fo.subst_type(parse_type("1 + (a * X)"), "X", la)
    assert unfolded == parse_type("1 + (a * (mu X. (1 + (a * X))))")
    shadowed = parse_type("forall a. (a -o b)")
    assert fo.subst_type(shadowed, "a", fo.One()) == shadowed


def test_variable_rule():
    a = fo.TVar("a")
    j = check(Context.of(("x", a)), term("x"), a)
    assert j.formula == a
    assert [(e.name, e.state) for e in j.context] == [("x", "used")]


def test_affine_weakening():
    a = fo.TVar("a")
    j = check(Context.of(("x", a), ("z", a)), term("x"), a)
    assert [(e.name, e.state) for e in j.context] == [("x", "used"), ("z", "unused")]


def test_integer_two_checks():
    j = check(Context(), term(TWO_ANN), parse_type("!(a -o a) -o a -o a"))
    assert fo.show_type(j.formula) == "!(a -o a) -o a -o a"


def test_integer_two_generalizes_to_n():
    j = infer(Context(), term("gen[a] " + TWO_ANN))
    assert fo.alpha_eq_type(j.formula, parse_type(N_SRC))


def test_empty_list_checks():
    unfolded = parse_type("1 + (a * (mu X. (1 + (a * X))))")
    assert check(Context(), term("inl(())"), unfolded).formula == unfolded
    j = check(Context(), term("fold[" + LA_SRC + "] inl(())"), parse_type(LA_SRC))
    assert j.formula == parse_type(LA_SRC)


def test_forall_escape():
    with pytest.raises(ForallEscape):
        infer(Context.of(("x", fo.TVar("a"))), term("gen[a] x"))


def test_linearity_violation():
    with pytest.raises(LinearityViolation) as exc:
        infer(Context(), term("\\x : a. <x, x>"))
    assert exc.value.path == (0, 1)


def test_depth_violation():
    with pytest.raises(DepthViolation):
        infer(Context(), term("\\x : a. !x"))


def test_unknown_variable():
    with pytest.raises(UnknownVariable):
        infer(Context(), Var("x"))


def test_type_mismatch_carries_both_sides():
    with pytest.raises(TypeMismatch) as exc:
        check(Context(), term("()"), parse_type("a -o a"))
    assert exc.value.expected == parse_type("a -o a")
    assert exc.value.found == fo.One()


def test_unannotated_binder_cannot_synthesize():
    with pytest.raises(TypeCheckError):
        infer(Context(), term("\\x. x"))


def test_promotion():
    j = check(Context(), term("\\u : !a. let u be !x in !x"), parse_type("!a -o !a"))
    assert fo.show_type(j.formula) == "!a -o !a"


def test_promotion_does_not_reach_depth_two():
    with pytest.raises(DepthViolation):
        check(Context(), term("\\u : !a. let u be !x in !!x"), parse_type("!a -o !!a"))


def test_promoted_variable_is_consumed():
    with pytest.raises(LinearityViolation):
        infer(
            Context(),
            term("\\u : !a. <let u be !x in !x, let u be !y in !y>"),
        )


def test_multiplexing_allows_any_arity():
    # k uses of the banged binder at depth 0, including k = 0.
    for body, n in (("x", 0), ("(s' x)", 1), ("(s' (s' (s' x)))", 3)):
        src = "\\s : !(a -o a). \\x : a. let s be !s' in " + body
        j = check(Context(), term(src), parse_type("!(a -o a) -o a -o a"))
        assert j.formula == parse_type("!(a -o a) -o a -o a")


def test_case_branches_share_context():
    src = "\\p : a. \\s : (1 + 1). case s of inl(u) => p | inr(v) => p"
    j = infer(Context(), term(src))
    assert j.formula == parse_type("a -o (1 + 1) -o a")


def test_fold_unfold_inverse():
    la = parse_type(LA_SRC)
    t = term("fold[" + LA_SRC + "] inl(())")
    assert check(Context(), t, la).formula == la
    wrapped = term("fold[" + LA_SRC + "] unfold (fold[" + LA_SRC + "] inl(()))")
    assert check(Context(), wrapped, la).formula == la


def test_ascription_alpha_invariant():
    t = term("gen[a] " + TWO_ANN)
    for spelled in (N_SRC, "forall c. !(c -o c) -o c -o c"):
        assert check(Context(), t, parse_type(spelled)).formula == parse_type(spelled)


def test_checker_invariant_under_term_renaming():
    renamed = "\\t : !(a -o a). \\w : a. let t be !t' in (t' (t' w))"
    expected = parse_type("!(a -o a) -o a -o a")
    assert check(Context(), term(renamed), expected).formula == expected


def test_accepted_terms_erase_to_well_formed():
    accepted = [
        term(TWO_ANN),
        term("gen[a] " + TWO_ANN),
        term("fold[" + LA_SRC + "] inl(())"),
        term("\\u : !a. let u be !x in !x"),
    ]
    for t in accepted:
        assert analyze(erase_markers(t)).is_well_formed


def test_redex_and_reduct_check_at_the_same_type():
    a = fo.TVar("a")
    pairs = [
        ("((\\x : a. x) y)", "y", a, Context.of(("y", a))),
        ("let !(\\x : a. x) be !f in (f y)", "((\\x : a. x) y)", a, Context.of(("y", a))),
        ("let <(), ()> be <x, y> in x", "()", fo.One(), Context()),
    ]
    for redex, reduct, formula, ctx in pairs:
        assert check(ctx, term(redex), formula).formula == formula
        assert check(ctx, term(reduct), formula).formula == formula


def test_check_module_isolates_failures():
    rep = check_module(
        parse(
            "def good : 1 = ()\n"
            "def bad : 1 = \\x : a. x\n"
            "def plain = x\n"
        )
    )
    by_name = {e.name: e for e in rep.entries}
    assert by_name["good"].status == "ok"
    assert by_name["bad"].status == "error"
    assert by_name["bad"].message
    assert by_name["plain"].status == "skipped"
    assert not rep.ok


def test_check_module_empty():
    rep = check_module(parse(""))
    assert rep.entries == ()
    assert rep.ok


def test_check_module_json():
    rep = check_module(parse("def good : 1 = ()"))
    doc = rep.to_json()
    assert doc["ok"] is True
    assert doc["definitions"][0]["name"] == "good"
    assert doc["definitions"][0]["status"] == "ok"
