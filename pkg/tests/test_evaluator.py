import random

from slc.evaluator import OUT_OF_FUEL, Converged, evaluate, evaluate_traced
from slc.syntax import (
    EMPTY_CONTEXT,
    Star,
    Term,
    Var,
    is_value,
    parse_term,
    term_size,
)
from slc.typecheck import Calculus, TypeCheckError, typecheck

from test_typecheck import T_SOURCE, _random_term

DIVERGE = parse_term("rec z:!I. force z")


def test_discarding_application_converges_to_star():
    t = parse_term(T_SOURCE)
    assert evaluate(t, 10**4) == Converged(Star())


def test_rec_loop_runs_out_of_fuel():
    assert evaluate(DIVERGE, 10**6) is OUT_OF_FUEL


def test_force_lift_pair():
    m = parse_term("force (lift <*, *>)")
    assert evaluate(m, 100) == Converged(parse_term("<*, *>"))


def test_case_left():
    m = parse_term("case left[I,I] * of {left x -> x | right y -> y}")
    assert evaluate(m, 100) == Converged(Star())


def test_case_right():
    m = parse_term("case right[I,I] * of {left x -> x | right y -> force (lift y)}")
    assert evaluate(m, 100) == Converged(Star())


def test_letpair():
    m = parse_term("let <x, y> = <*, lift *> in x; force y")
    assert evaluate(m, 100) == Converged(Star())


def test_open_variable_evaluates_to_itself():
    assert evaluate(Var("x"), 5) == Converged(Var("x"))


def test_rec_unfolds_through_lift():
    m = parse_term("rec z:!I. force (lift *)")
    assert evaluate(m, 100) == Converged(Star())


def test_terminating_rec_through_dead_branch():
    src = (
        "(rec f:!((I + I) -o (I + I)). \\x:(I + I). "
        "case x of {left a -> force f right[I,I] a | right b -> right[I,I] b}) "
        "(left[I,I] *)"
    )
    m = parse_term(src)
    assert evaluate(m, 1000) == Converged(parse_term("right[I,I] *"))


def test_trace_counts():
    _, stats = evaluate_traced(Star(), 10)
    assert stats == stats.__class__(rules=1, max_depth=1)
    outcome, stats = evaluate_traced(parse_term("*; *"), 10)
    assert outcome == Converged(Star())
    assert stats.rules == 3
    assert stats.max_depth == 2


def test_trace_count_for_t_frozen():
    # regression pin: derivation size of the affine discarding application
    outcome, stats = evaluate_traced(parse_term(T_SOURCE), 10**4)
    assert outcome == Converged(Star())
    assert stats.rules == 4
    assert stats.max_depth == 2


def test_stuck_terms_never_converge():
    # ill-typed: seq of a non-unit, force of a non-thunk
    for src in ("(lift *); *", "force *", "* *", "case * of {left x -> x | right y -> y}"):
        m = parse_term(src)
        assert evaluate(m, 10**4) is OUT_OF_FUEL


# ---------------------------------------------------------------------------
# properties


def _converging_samples(count: int, seed: int) -> list[tuple[Calculus, Term, object]]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        m = _random_term(rng, rng.randrange(2, 5), ())
        for calc in (Calculus.LINEAR, Calculus.AFFINE):
            try:
                ty, _ = typecheck(calc, EMPTY_CONTEXT, m)
            except TypeCheckError:
                continue
            out.append((calc, m, ty))
            break
    return out


def test_value_fixpoint():
    rng = random.Random(3)
    values = [m for m in (_random_term(rng, 3, ()) for _ in range(3000)) if is_value(m)]
    assert len(values) > 100
    for v in values:
        assert evaluate(v, term_size(v)) == Converged(v)


def test_fuel_monotonicity_and_determinism():
    for calc, m, _ in _converging_samples(150, seed=99):
        lo = evaluate(m, 50)
        hi = evaluate(m, 500)
        if isinstance(lo, Converged):
            assert hi == lo
        assert evaluate(m, 500) == hi  # rerun is identical


def test_subject_reduction_on_random_sample():
    for calc, m, ty in _converging_samples(200, seed=17):
        outcome = evaluate(m, 2000)
        if isinstance(outcome, Converged):
            assert is_value(outcome.value)
            got, _ = typecheck(calc, EMPTY_CONTEXT, outcome.value)
            assert got == ty, f"{calc}: `{m}` evaluated to `{outcome.value}`"
