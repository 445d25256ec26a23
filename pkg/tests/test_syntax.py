import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slc.errors import ContractViolation, ParseError
from slc.syntax import (
    App,
    Bang,
    Case,
    Force,
    Lam,
    LeftInj,
    LetPair,
    Lift,
    Lolli,
    Pair,
    Rec,
    RightInj,
    Seq,
    Star,
    Sum,
    Tensor,
    Term,
    Type,
    UNIT,
    Var,
    format_term,
    format_type,
    free_vars,
    is_nonlinear,
    is_value,
    parse_program,
    parse_term,
    parse_type,
    subst,
    subst_parallel,
    term_size,
)

I = UNIT
II = Lolli(I, I)
DIVERGE = Rec("z", Bang(I), Force(Var("z")))


# ---------------------------------------------------------------------------
# parsing


def test_parse_identity_lambda():
    assert parse_term("\\x:I. x") == Lam("x", I, Var("x"))


def test_parse_rec_loop():
    assert parse_term("rec z:!I. force z") == DIVERGE


def test_parse_discarding_application():
    t = parse_term("(\\y:(I -o I). *) (\\x:I. rec z:!I. force z)")
    assert t == App(Lam("y", II, Star()), Lam("x", I, DIVERGE))


def test_parse_type_precedence():
    assert parse_type("!I -o I + I") == Lolli(Bang(I), Sum(I, I))
    assert parse_type("I * I * I") == Tensor(I, Tensor(I, I))
    assert parse_type("!(I -o I)") == Bang(II)
    assert parse_type("I + I * I") == Sum(I, Tensor(I, I))
    assert parse_type("I -o I -o I") == Lolli(I, Lolli(I, I))


def test_parse_case_and_letpair():
    m = parse_term("case left[I,I] * of {left x -> x | right y -> y}")
    assert m == Case(LeftInj(I, I, Star()), "x", Var("x"), "y", Var("y"))
    m = parse_term("let <x, y> = <*, *> in x; y")
    assert m == LetPair("x", "y", Pair(Star(), Star()), Seq(Var("x"), Var("y")))


def test_application_is_left_associative():
    assert parse_term("f x y") == App(App(Var("f"), Var("x")), Var("y"))


def test_prefix_operators_take_one_atom():
    assert parse_term("force f x") == App(Force(Var("f")), Var("x"))
    assert parse_term("f force x") == App(Var("f"), Force(Var("x")))
    assert parse_term("lift force z") == Lift(Force(Var("z")))


def test_seq_is_right_associative():
    assert parse_term("a; b; c") == Seq(Var("a"), Seq(Var("b"), Var("c")))


def test_lambda_body_extends_right():
    assert parse_term("\\x:I. a; b") == Lam("x", I, Seq(Var("a"), Var("b")))


def test_comments_and_pragma():
    calc, m = parse_program("# a comment\ncalculus affine\n* # trailing\n")
    assert calc == "affine"
    assert m == Star()
    calc, m = parse_program("*")
    assert calc is None


def test_parse_errors_have_position():
    with pytest.raises(ParseError) as exc:
        parse_term("\\x:I")
    assert exc.value.line == 1
    assert exc.value.expected == (".",)
    with pytest.raises(ParseError):
        parse_type("I + ")
    with pytest.raises(ParseError):
        parse_term("case x of {left y -> y}")


def test_keywords_are_not_identifiers():
    with pytest.raises(ParseError):
        parse_term("lift")  # operand missing
    with pytest.raises(ParseError):
        parse_term("rec")


# ---------------------------------------------------------------------------
# nonlinearity and values


def test_is_nonlinear_spec_cases():
    assert is_nonlinear(I)
    assert not is_nonlinear(II)
    assert is_nonlinear(Bang(II))
    assert is_nonlinear(Sum(I, Bang(I)))
    assert not is_nonlinear(Tensor(I, II))


def _all_types(depth: int) -> list[Type]:
    if depth <= 1:
        return [I]
    smaller = _all_types(depth - 1)
    out = list(smaller)
    out.extend(Bang(a) for a in smaller)
    for a in smaller:
        for b in smaller:
            out.extend((Sum(a, b), Tensor(a, b), Lolli(a, b)))
    return out


def _nonlinear_grammar(depth: int) -> set[Type]:
    # generate the copyable types directly from their grammar:
    # I, sums/tensors of copyable types, and !A over arbitrary A
    if depth <= 1:
        return {I}
    ps = _nonlinear_grammar(depth - 1)
    out = set(ps)
    out.update(Bang(a) for a in _all_types(depth - 1))
    for a in ps:
        for b in ps:
            out.add(Sum(a, b))
            out.add(Tensor(a, b))
    return out


def test_is_nonlinear_matches_grammar_exhaustively():
    depth = 4
    expected = _nonlinear_grammar(depth)
    for t in _all_types(depth):
        assert is_nonlinear(t) == (t in expected), t


def test_is_value():
    assert is_value(parse_term("lift (rec z:!I. force z)"))
    assert not is_value(parse_term("force (lift *)"))
    assert is_value(parse_term("<*, left[I,I] *>"))
    assert not is_value(parse_term("<*, force x>"))
    assert not is_value(parse_term("x y"))
    assert is_value(Var("x"))


# ---------------------------------------------------------------------------
# substitution and free variables


def test_subst_base_cases():
    assert subst(Var("x"), Star(), "x") == Star()
    assert subst(Var("y"), Star(), "x") == Var("y")


def test_subst_respects_shadowing():
    m = Lam("x", I, Var("x"))
    assert subst(m, Star(), "x") == m


def test_subst_rec_unfolding():
    lifted = Lift(DIVERGE)
    assert subst(Force(Var("z")), lifted, "z") == Force(lifted)


def test_subst_avoids_capture():
    # substituting a term mentioning x under a binder named x
    m = Lam("x", I, App(Var("f"), Var("x")))
    out = subst(m, Var("x"), "f")
    assert isinstance(out, Lam)
    assert out.param != "x"
    assert out.body == App(Var("x"), Var(out.param))


def test_subst_parallel_letpair():
    m = LetPair("x", "y", Pair(Var("a"), Var("b")), Pair(Var("x"), Var("y")))
    out = subst_parallel(m, {"a": Star(), "b": Star()})
    assert out == LetPair("x", "y", Pair(Star(), Star()), Pair(Var("x"), Var("y")))


def test_subst_rejects_non_value():
    with pytest.raises(ContractViolation):
        subst(Var("x"), Force(Lift(Star())), "x")


def test_free_vars():
    assert free_vars(Var("x")) == {"x"}
    assert free_vars(Lam("x", I, Var("x"))) == frozenset()
    assert free_vars(App(Var("f"), Var("x"))) == {"f", "x"}
    assert free_vars(Case(Var("s"), "x", Var("x"), "y", Var("z"))) == {"s", "z"}


# ---------------------------------------------------------------------------
# round trips

_names = st.sampled_from(["x", "y", "z", "f", "g", "u'"])

_types = st.recursive(
    st.just(I),
    lambda inner: st.one_of(
        st.builds(Sum, inner, inner),
        st.builds(Tensor, inner, inner),
        st.builds(Lolli, inner, inner),
        st.builds(Bang, inner),
    ),
    max_leaves=8,
)


def _terms() -> st.SearchStrategy[Term]:
    base = st.one_of(st.just(Star()), st.builds(Var, _names))
    return st.recursive(
        base,
        lambda inner: st.one_of(
            st.builds(Seq, inner, inner),
            st.builds(LeftInj, _types, _types, inner),
            st.builds(RightInj, _types, _types, inner),
            st.builds(Case, inner, _names, inner, _names, inner),
            st.builds(Pair, inner, inner),
            st.builds(LetPair, _names, _names, inner, inner),
            st.builds(Lam, _names, _types, inner),
            st.builds(App, inner, inner),
            st.builds(Lift, inner),
            st.builds(Force, inner),
            st.builds(lambda z, t, b: Rec(z, Bang(t), b), _names, _types, inner),
        ),
        max_leaves=20,
    )


@given(_types)
@settings(max_examples=300)
def test_type_round_trip(t):
    assert parse_type(format_type(t)) == t


@given(_terms())
@settings(max_examples=500)
def test_term_round_trip(m):
    assert parse_term(format_term(m)) == m


@given(_terms(), st.one_of(st.just(Star()), st.builds(Var, _names)), _names)
@settings(max_examples=300)
def test_subst_free_var_bound(m, v, x):
    out = subst(m, v, x)
    assert free_vars(out) <= (free_vars(m) - {x}) | free_vars(v)


@given(_terms())
@settings(max_examples=200)
def test_term_size_positive(m):
    assert term_size(m) >= 1
