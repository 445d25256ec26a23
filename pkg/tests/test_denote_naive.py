import pytest

from slc.denote_naive import (
    JudgedBottom,
    NotBottom,
    degeneracy_report,
    denote_naive,
    judge_bottom,
)
from slc.denote_standard import denote
from slc.domains import (
    BOTTOM,
    Bind,
    Differ,
    NOT_YET,
    Ret,
    SFun,
    SUnit,
    sem_equal,
)
from slc.errors import ContractViolation
from slc.evaluator import Converged, evaluate
from slc.syntax import EMPTY_CONTEXT, UNIT, parse_term, parse_type
from slc.typecheck import Calculus

I = UNIT
AFFINE = Calculus.AFFINE
LINEAR = Calculus.LINEAR


def test_judge_bottom():
    assert judge_bottom(BOTTOM, 100) == JudgedBottom(100)
    assert judge_bottom(Ret(SUnit()), 100) == NotBottom(0)


def test_lambda_with_divergent_body_is_bottom():
    d = denote_naive(
        AFFINE, EMPTY_CONTEXT, parse_term("\\x:I. rec z:!I. force z"),
        parse_type("I -o I"), bottom_bound=10**4,
    )
    assert d.fun({}).run(10**5) is NOT_YET


def test_lambda_with_convergent_body_is_a_value():
    d = denote_naive(AFFINE, EMPTY_CONTEXT, parse_term("\\x:I. x"), bottom_bound=100)
    fn = d.fun({}).run(100)
    assert isinstance(fn, SFun)
    assert isinstance(fn.apply(SUnit()).run(10), SUnit)


def test_lambda_forcing_thunk_argument_is_not_judged_bottom():
    # at least one generated !I probe must be a convergent thunk
    d = denote_naive(AFFINE, EMPTY_CONTEXT, parse_term("\\x:!I. force x"), bottom_bound=100)
    assert isinstance(d.fun({}).run(1000), SFun)


def test_discarding_application_is_bottom_but_evaluates():
    t = parse_term("(\\y:(I -o I). *) (\\x:I. rec z:!I. force z)")
    d = denote_naive(AFFINE, EMPTY_CONTEXT, t, I, bottom_bound=10**4)
    comp = d.fun({})
    for fuel in (10, 10**4, 10**6):
        assert comp.run(fuel) is NOT_YET
    assert evaluate(t, 10**4) == Converged(parse_term("*"))


def test_bottom_free_terms_agree_with_standard():
    for src, tysrc in [
        ("*", "I"),
        ("(\\x:I. x) *", "I"),
        ("force (lift <*, *>)", "I * I"),
        ("case left[I,I] * of {left x -> x | right y -> y}", "I"),
    ]:
        m, ty = parse_term(src), parse_type(tysrc)
        dn = denote_naive(AFFINE, EMPTY_CONTEXT, m, ty, bottom_bound=100)
        ds = denote(AFFINE, EMPTY_CONTEXT, m, ty)
        verdict = sem_equal(ty, dn.fun({}), ds.fun({}), 1000, 4)
        assert not isinstance(verdict, Differ), (src, verdict)
        assert not isinstance(dn.fun({}).run(1000), type(NOT_YET))


def test_strict_application_propagates_bottom():
    d = denote_naive(AFFINE, EMPTY_CONTEXT, parse_term("\\x:I. x"), bottom_bound=100)
    fn = d.fun({}).run(100)
    applied = Bind(BOTTOM, lambda v: fn.apply(v))
    assert applied.run(10**4) is NOT_YET


def test_judgment_depends_on_captured_environment():
    # the inner lambda's body diverges only when the captured thunk does
    src = "\\w:!I. \\x:I. force w"
    m = parse_term(src)
    d = denote_naive(AFFINE, EMPTY_CONTEXT, m, bottom_bound=200)
    outer = d.fun({}).run(1000)
    assert isinstance(outer, SFun)
    from slc.domains import SThunk

    good = outer.apply(SThunk(Ret(SUnit()))).run(1000)
    assert isinstance(good, SFun)
    bad = outer.apply(SThunk(BOTTOM)).run(1000)
    assert bad is NOT_YET


def test_recursive_lambda_stays_bounded():
    # self-application through the recursive thunk must not blow the host
    # stack during the construction-time sweep
    src = "rec z:!(I -o I). \\x:I. force z x"
    m = parse_term(src)
    d = denote_naive(LINEAR, EMPTY_CONTEXT, m, bottom_bound=10**4)
    assert d.fun({}).run(10**4) is NOT_YET


def test_naive_rejects_ill_typed():
    with pytest.raises(ContractViolation):
        denote_naive(LINEAR, EMPTY_CONTEXT, parse_term("\\x:(I -o I). *"))


def test_degeneracy_report():
    report = degeneracy_report(bottom_bound=10**4, fuel=10**4)
    assert report.affine_type == "I"
    assert report.linear_rejection == "LinearVarDiscarded"
    assert report.eval_result == "*"
    assert report.standard_value == "*"
    assert isinstance(report.naive_judgment, JudgedBottom)
    assert report.loop_eval_out_of_fuel
    assert report.loop_standard_bottom_at_bound
    assert report.soundness_violated
    assert report.expected_shape
    d = report.to_dict()
    assert d["soundness_violated"] is True
    assert d["naive_judgment"]["judged_bottom"] is True
