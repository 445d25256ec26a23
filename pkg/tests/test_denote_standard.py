import pytest

from slc.denote_standard import (
    Denotation,
    denote,
    denote_value,
    denote_value_shared,
    fix_denote,
)
from slc.domains import (
    NOT_YET,
    Ret,
    SFun,
    SPair,
    SThunk,
    SUnit,
    Differ,
    comp_monotone,
    sem_equal,
)
from slc.errors import ContractViolation
from slc.evaluator import Converged, evaluate
from slc.syntax import Bang, Context, EMPTY_CONTEXT, UNIT, Var, parse_term, parse_type
from slc.typecheck import Calculus

from test_typecheck import T_SOURCE

I = UNIT
LINEAR = Calculus.LINEAR
AFFINE = Calculus.AFFINE
DIVERGE = parse_term("rec z:!I. force z")


def test_star_denotes_unit():
    d = denote(AFFINE, EMPTY_CONTEXT, parse_term("*"), I)
    assert isinstance(d.fun({}).run(1), SUnit)


def test_diverging_loop_denotes_bottom():
    d = denote(AFFINE, EMPTY_CONTEXT, DIVERGE, I)
    comp = d.fun({})
    for fuel in (0, 1, 10, 10**4):
        assert comp.run(fuel) is NOT_YET
    assert comp_monotone(comp, 10, 10**4)


def test_discarding_application_denotes_unit():
    d = denote(AFFINE, EMPTY_CONTEXT, parse_term(T_SOURCE), I)
    assert isinstance(d.fun({}).run(10**4), SUnit)


def test_identity_lambda_applies():
    d = denote(LINEAR, EMPTY_CONTEXT, parse_term("\\x:I. x"), parse_type("I -o I"))
    fn = d.fun({}).run(10)
    assert isinstance(fn, SFun)
    # oracle: the evaluator agrees on the applied form
    assert evaluate(parse_term("(\\x:I. x) *"), 100) == Converged(parse_term("*"))
    assert isinstance(fn.apply(SUnit()).run(10), SUnit)


def test_denotation_is_ctx_indexed():
    ctx = Context.of(("x", parse_type("!I")))
    d = denote(LINEAR, ctx, parse_term("<force x, force x>"), parse_type("I * I"))
    out = d.fun({"x": SThunk(Ret(SUnit()))}).run(10)
    assert isinstance(out, SPair)
    assert isinstance(out.fst, SUnit)


def test_case_dispatch():
    m = parse_term("case right[I, I -o I] (\\w:I. w) of {left a -> a; * | right b -> b *}")
    d = denote(AFFINE, EMPTY_CONTEXT, m, I)
    assert isinstance(d.fun({}).run(100), SUnit)


def test_lift_is_a_value_even_when_body_diverges():
    v = denote_value(AFFINE, EMPTY_CONTEXT, parse_term("lift (rec z:!I. force z)"), Bang(I))
    thunk = v.fun({})
    assert isinstance(thunk, SThunk)
    assert thunk.comp.run(10**4) is NOT_YET


def test_lambda_with_diverging_body_is_a_value():
    v = denote_value(
        AFFINE, EMPTY_CONTEXT, parse_term("\\x:I. rec z:!I. force z"), parse_type("I -o I")
    )
    fn = v.fun({})
    assert isinstance(fn, SFun)
    assert fn.apply(SUnit()).run(1000) is NOT_YET


def test_denote_value_pairs():
    v = denote_value(LINEAR, EMPTY_CONTEXT, parse_term("<*, *>"), parse_type("I * I"))
    out = v.fun({})
    assert isinstance(out, SPair) and isinstance(out.fst, SUnit)


def test_denote_value_shared_cases():
    v = denote_value_shared(LINEAR, EMPTY_CONTEXT, parse_term("*"), I)
    assert isinstance(v.fun({}), SUnit)
    v = denote_value_shared(
        LINEAR, EMPTY_CONTEXT, parse_term("<*, lift *>"), parse_type("I * !I")
    )
    out = v.fun({})
    assert isinstance(out.snd, SThunk)
    assert isinstance(out.snd.comp.run(1), SUnit)
    v = denote_value_shared(LINEAR, EMPTY_CONTEXT, parse_term("lift *"), Bang(I))
    assert isinstance(v.fun({}), SThunk)


def test_denote_value_shared_rejects_linear_types():
    with pytest.raises(ContractViolation):
        denote_value_shared(AFFINE, EMPTY_CONTEXT, parse_term("\\x:I. x"), parse_type("I -o I"))


def test_denote_rejects_ill_typed():
    with pytest.raises(ContractViolation):
        denote(LINEAR, EMPTY_CONTEXT, parse_term("\\x:(I -o I). *"))
    with pytest.raises(ContractViolation):
        denote(AFFINE, EMPTY_CONTEXT, parse_term("*"), parse_type("!I"))
    with pytest.raises(ContractViolation):
        denote_value(AFFINE, EMPTY_CONTEXT, parse_term("force (lift *)"))


# ---------------------------------------------------------------------------
# fixed points


def test_fix_bottom_body():
    body = denote(
        AFFINE, Context.of(("z", Bang(I))), parse_term("force z"), I
    )
    d = fix_denote(EMPTY_CONTEXT, "z", I, body)
    assert d.fun({}).run(10**4) is NOT_YET


def test_fix_constant_body_converges_fast():
    body = denote(AFFINE, Context.of(("z", Bang(I))), parse_term("*"), I)
    d = fix_denote(EMPTY_CONTEXT, "z", I, body)
    assert isinstance(d.fun({}).run(2), SUnit)


def test_fix_converges_at_second_approximant():
    # applying the fixed point forces one recursive call through a sum
    src = (
        "(rec f:!((I + I) -o (I + I)). \\x:(I + I). "
        "case x of {left a -> force f right[I,I] a | right b -> right[I,I] b}) "
        "(left[I,I] *)"
    )
    m = parse_term(src)
    ty = parse_type("I + I")
    op = evaluate(m, 1000)
    assert op == Converged(parse_term("right[I,I] *"))
    d = denote(LINEAR, EMPTY_CONTEXT, m, ty)
    comp = d.fun({})
    assert comp.run(1) is NOT_YET  # needs more than one unfolding
    out = comp.run(50)
    dv = denote(LINEAR, EMPTY_CONTEXT, op.value, ty)
    verdict = sem_equal(ty, comp, dv.fun({}), 100, 4)
    assert not isinstance(verdict, Differ)
    assert out is not NOT_YET


def test_fix_rejects_linear_context():
    body = denote(AFFINE, Context.of(("z", Bang(I))), parse_term("force z"), I)
    with pytest.raises(ContractViolation):
        fix_denote(Context.of(("w", parse_type("I -o I"))), "z", I, body)


# ---------------------------------------------------------------------------
# agreement between the term- and value-level interpretations


def test_value_denotations_agree_with_term_denotations():
    cases = [
        (AFFINE, "*", "I"),
        (AFFINE, "<*, left[I,I] *>", "I * (I + I)"),
        (LINEAR, "lift (rec z:!I. force z)", "!I"),
        (AFFINE, "\\x:I. rec z:!I. force z", "I -o I"),
        (LINEAR, "\\x:!I. <force x, force x>", "!I -o I * I"),
    ]
    for calc, src, tysrc in cases:
        v = parse_term(src)
        ty = parse_type(tysrc)
        dterm = denote(calc, EMPTY_CONTEXT, v, ty)
        dval = denote_value(calc, EMPTY_CONTEXT, v, ty)
        verdict = sem_equal(ty, dterm.fun({}), Ret(dval.fun({})), 1000, 6)
        assert not isinstance(verdict, Differ), (src, verdict)
