"""Strict function-space backend, degenerate on the affine calculus.

This backend interprets every connective over pointed domains with
strict maps: pairing and application run their components to
convergence before producing anything (the smash discipline), discard
at any type is strict, and the function space itself is pointed.  The
load-bearing difference from the standard backend is the lambda clause:
currying a divergent body yields the divergent element of the function
space, so a lambda whose body diverges everywhere is itself divergence,
not a value.  Divergence of a body is semi-decided by sweeping its
computation against finitely many generated arguments up to a fuel
bound.

On linearly-typed programs this backend never observably disagrees with
the standard one.  On the affine calculus it breaks soundness: a
function argument with a divergent body may be discarded by the
operational semantics yet forces the whole application to bottom here.
`degeneracy_report` packages the canonical witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .denote_standard import Denotation, _build
from .domains import (
    BOTTOM,
    Comp,
    NOT_YET,
    Ret,
    SFun,
    SemEnv,
    _mix,
    exec_comp,
    gen_sem_val,
    render_semval,
)
from .errors import ContractViolation
from .evaluator import Converged, evaluate
from .syntax import Context, EMPTY_CONTEXT, Term, Type, format_term, format_type, parse_term
from .typecheck import Calculus, TypeCheckError, check_program
from . import denote_standard

_JUDGE_PROBES = 4
_PROBE_SIZE = 2


@dataclass(frozen=True)
class JudgedBottom:
    """No convergence observed anywhere up to the bound; a semi-decision."""

    bound: int


@dataclass(frozen=True)
class NotBottom:
    """Convergence witnessed, using `fuel` units; exact."""

    fuel: int


BottomJudgment = Union[JudgedBottom, NotBottom]


@dataclass
class StrictDenotation:
    ctx: Context
    type: Type
    fun: Callable[[SemEnv], Comp]
    bottom_bound: int


def judge_bottom(comp: Comp, bound: int) -> BottomJudgment:
    """Sweep `comp` up to `bound`; monotonicity makes one run a full sweep."""
    value, remaining = exec_comp(comp, bound)
    if value is NOT_YET:
        return JudgedBottom(bound)
    return NotBottom(bound - remaining)


def _lam_strict(bound: int) -> denote_standard.LamRule:
    def rule(body_fun, binder: str, arg_type: Type, env: SemEnv) -> Comp:
        # curry of a divergent body is the divergent function-space element
        for i in range(_JUDGE_PROBES):
            arg = gen_sem_val(arg_type, _mix("strict-probe", i), _PROBE_SIZE)
            if isinstance(judge_bottom(body_fun({**env, binder: arg}), bound), NotBottom):
                return Ret(SFun(lambda a: body_fun({**env, binder: a})))
        return BOTTOM

    return rule


def denote_naive(
    calc: Calculus,
    ctx: Context,
    m: Term,
    ty: Type | None = None,
    bottom_bound: int = 10**4,
) -> StrictDenotation:
    """Interpret `m` under the strict function-space semantics."""
    checked = denote_standard._checked_type(calc, ctx, m, ty)
    _, fun = _build(calc, ctx, m, _lam_strict(bottom_bound))
    return StrictDenotation(ctx, checked, fun, bottom_bound)


# ---------------------------------------------------------------------------
# Degeneracy demonstration

LOOP_SOURCE = "rec z:!I. force z"
DISCARDING_APP_SOURCE = "(\\y:(I -o I). *) (\\x:I. rec z:!I. force z)"


@dataclass
class DegeneracyReport:
    """Executable comparison of the two backends on the canonical witness.

    `loop` is the smallest diverging program; `program` discards a
    function whose body diverges, is affine-typed at the unit type, and
    evaluates to `*`.  The standard backend agrees with evaluation; the
    strict backend judges the whole program bottom, violating soundness
    and adequacy at the unit type.
    """

    program: str
    loop: str
    affine_type: str
    linear_rejection: str
    eval_result: str
    standard_value: str
    naive_judgment: BottomJudgment
    loop_eval_out_of_fuel: bool
    loop_standard_bottom_at_bound: bool
    eval_fuel: int
    bottom_bound: int

    @property
    def soundness_violated(self) -> bool:
        """True when evaluation converges but the strict denotation is bottom."""
        return self.eval_result == "*" and isinstance(self.naive_judgment, JudgedBottom)

    @property
    def expected_shape(self) -> bool:
        return (
            self.affine_type == "I"
            and self.linear_rejection == "LinearVarDiscarded"
            and self.eval_result == "*"
            and self.standard_value == "*"
            and self.soundness_violated
            and self.loop_eval_out_of_fuel
            and self.loop_standard_bottom_at_bound
        )

    def to_dict(self) -> dict:
        return {
            "program": self.program,
            "loop": self.loop,
            "affine_type": self.affine_type,
            "linear_rejection": self.linear_rejection,
            "eval_result": self.eval_result,
            "standard_value": self.standard_value,
            "naive_judgment": {
                "judged_bottom": isinstance(self.naive_judgment, JudgedBottom),
                "bound": getattr(self.naive_judgment, "bound", None),
                "converged_at": getattr(self.naive_judgment, "fuel", None),
            },
            "loop_eval_out_of_fuel": self.loop_eval_out_of_fuel,
            "loop_standard_bottom_at_bound": self.loop_standard_bottom_at_bound,
            "eval_fuel": self.eval_fuel,
            "bottom_bound": self.bottom_bound,
            "soundness_violated": self.soundness_violated,
            "expected_shape": self.expected_shape,
        }


def degeneracy_report(bottom_bound: int = 10**6, fuel: int = 10**4) -> DegeneracyReport:
    """Run both backends on the canonical affine witness and report."""
    loop = parse_term(LOOP_SOURCE)
    program = parse_term(DISCARDING_APP_SOURCE)

    affine_type = format_type(check_program(Calculus.AFFINE, program))
    try:
        check_program(Calculus.LINEAR, program)
        linear_rejection = "accepted"
    except TypeCheckError as exc:
        linear_rejection = exc.kind.value

    outcome = evaluate(program, fuel)
    eval_result = (
        format_term(outcome.value) if isinstance(outcome, Converged) else "OUT_OF_FUEL"
    )

    standard = denote_standard.denote(Calculus.AFFINE, EMPTY_CONTEXT, program)
    standard_out = standard.fun({}).run(fuel)
    standard_value = "BOTTOM" if standard_out is NOT_YET else render_semval(standard_out)

    naive = denote_naive(Calculus.AFFINE, EMPTY_CONTEXT, program, bottom_bound=min(fuel, bottom_bound))
    naive_judgment = judge_bottom(naive.fun({}), bottom_bound)

    loop_eval = evaluate(loop, fuel)
    loop_standard = denote_standard.denote(Calculus.AFFINE, EMPTY_CONTEXT, loop)

    return DegeneracyReport(
        program=DISCARDING_APP_SOURCE,
        loop=LOOP_SOURCE,
        affine_type=affine_type,
        linear_rejection=linear_rejection,
        eval_result=eval_result,
        standard_value=standard_value,
        naive_judgment=naive_judgment,
        loop_eval_out_of_fuel=not isinstance(loop_eval, Converged),
        loop_standard_bottom_at_bound=loop_standard.fun({}).run(bottom_bound) is NOT_YET,
        eval_fuel=fuel,
        bottom_bound=bottom_bound,
    )
