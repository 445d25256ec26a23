"""Algorithmic type checking for the linear and affine calculi.

Instead of guessing how to split a context between the premises of a
rule, the checker returns alongside each type the set of linear-typed
variables the subterm consumed; multi-premise rules demand those sets
be disjoint and a binder's fate is decided where it goes out of scope.
In linear mode every linear variable must be consumed exactly once, in
affine mode at most once.  Nonlinear variables are freely shared and
never tracked.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import SlcError
from .syntax import (
    App,
    Bang,
    Case,
    Context,
    EMPTY_CONTEXT,
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
    freshen_binder,
    is_nonlinear,
)


class Calculus(enum.Enum):
    LINEAR = "linear"
    AFFINE = "affine"


class ErrorKind(enum.Enum):
    UNBOUND_VARIABLE = "UnboundVariable"
    TYPE_MISMATCH = "TypeMismatch"
    LINEAR_VAR_DUPLICATED = "LinearVarDuplicated"
    LINEAR_VAR_DISCARDED = "LinearVarDiscarded"
    LINEAR_VAR_IN_LIFT = "LinearVarInLift"
    LINEAR_VAR_IN_REC = "LinearVarInRec"
    BRANCH_USAGE_MISMATCH = "BranchUsageMismatch"
    NOT_A_FUNCTION = "NotAFunction"
    NOT_A_BANG = "NotABang"
    NOT_A_SUM = "NotASum"
    NOT_A_TENSOR = "NotATensor"


#: Set of linear-typed variables consumed by a checked subterm.
UsageReport = frozenset


class TypeCheckError(SlcError):
    """Rejection by the formation rules.

    `rule` names the violated formation rule, `subject` shows the
    offending subterm.
    """

    def __init__(self, kind: ErrorKind, rule: str, subject: Term, detail: str):
        super().__init__(f"{kind.value} at {rule}: {detail} (in `{format_term(subject)}`)")
        self.kind = kind
        self.rule = rule
        self.subject = subject
        self.detail = detail

    def to_dict(self) -> dict:
        return {
            "error": "type",
            "kind": self.kind.value,
            "rule": self.rule,
            "subject": format_term(self.subject),
            "detail": self.detail,
        }


@dataclass(frozen=True)
class _Env:
    calc: Calculus
    ctx: Context


def typecheck(calc: Calculus, ctx: Context, m: Term) -> tuple[Type, UsageReport]:
    """Check `m` under `ctx`, returning its type and consumed linear variables.

    In linear mode, every linear variable of `ctx` must appear in the
    returned usage; a leftover raises LinearVarDiscarded.
    """
    ty, used = _check(_Env(calc, ctx), m)
    if calc is Calculus.LINEAR:
        leftover = ctx.linear_names() - used
        if leftover:
            raise TypeCheckError(
                ErrorKind.LINEAR_VAR_DISCARDED,
                "context",
                m,
                f"linear variables never used: {sorted(leftover)}",
            )
    return ty, used


def check_program(calc: Calculus, m: Term) -> Type:
    """Check a closed program; unbound variables are reported as such."""
    fv = free_vars(m)
    if fv:
        raise TypeCheckError(
            ErrorKind.UNBOUND_VARIABLE,
            "var",
            m,
            f"program is not closed: {sorted(fv)}",
        )
    ty, _ = typecheck(calc, EMPTY_CONTEXT, m)
    return ty


def _mismatch(rule: str, subject: Term, expected: str, actual: Type) -> TypeCheckError:
    return TypeCheckError(
        ErrorKind.TYPE_MISMATCH,
        rule,
        subject,
        f"expected {expected}, found {format_type(actual)}",
    )


def _disjoint(rule: str, subject: Term, *usages: frozenset) -> frozenset:
    combined: frozenset = frozenset()
    for used in usages:
        overlap = combined & used
        if overlap:
            raise TypeCheckError(
                ErrorKind.LINEAR_VAR_DUPLICATED,
                rule,
                subject,
                f"linear variables used more than once: {sorted(overlap)}",
            )
        combined |= used
    return combined


def _bind(env: _Env, name: str, ty: Type, body: Term) -> tuple[_Env, str, Term]:
    # binders shadow; rename on collision so context names stay distinct
    name, body = freshen_binder(name, body, env.ctx.names())
    return _Env(env.calc, env.ctx.extend(name, ty)), name, body


def _release(
    env: _Env, rule: str, subject: Term, name: str, ty: Type, used: frozenset
) -> frozenset:
    """Discharge a binder going out of scope; returns the outer usage."""
    if is_nonlinear(ty):
        return used
    if name not in used and env.calc is Calculus.LINEAR:
        raise TypeCheckError(
            ErrorKind.LINEAR_VAR_DISCARDED,
            rule,
            subject,
            f"linear variable {name} is never used",
        )
    return used - {name}


def _check(env: _Env, m: Term) -> tuple[Type, frozenset]:
    match m:
        case Var(x):
            ty = env.ctx.lookup(x)
            if ty is None:
                raise TypeCheckError(
                    ErrorKind.UNBOUND_VARIABLE, "var", m, f"unbound variable {x}"
                )
            used = frozenset() if is_nonlinear(ty) else frozenset((x,))
            return ty, used

        case Star():
            return UNIT, frozenset()

        case Seq(a, b):
            ta, ua = _check(env, a)
            if ta != UNIT:
                raise _mismatch("seq", m, "I on the left of `;`", ta)
            tb, ub = _check(env, b)
            return tb, _disjoint("seq", m, ua, ub)

        case LeftInj(ta, tb, body):
            tbody, used = _check(env, body)
            if tbody != ta:
                raise _mismatch("left", m, format_type(ta), tbody)
            return Sum(ta, tb), used

        case RightInj(ta, tb, body):
            tbody, used = _check(env, body)
            if tbody != tb:
                raise _mismatch("right", m, format_type(tb), tbody)
            return Sum(ta, tb), used

        case Case(scrutinee, x, n, y, p):
            ts, us = _check(env, scrutinee)
            if not isinstance(ts, Sum):
                raise TypeCheckError(
                    ErrorKind.NOT_A_SUM,
                    "case",
                    m,
                    f"scrutinee has type {format_type(ts)}",
                )
            env_n, x2, n2 = _bind(env, x, ts.left, n)
            tn, un = _check(env_n, n2)
            un = _release(env, "case", m, x2, ts.left, un)
            env_p, y2, p2 = _bind(env, y, ts.right, p)
            tp, up = _check(env_p, p2)
            up = _release(env, "case", m, y2, ts.right, up)
            if tn != tp:
                raise _mismatch("case", m, format_type(tn), tp)
            if env.calc is Calculus.LINEAR and un != up:
                raise TypeCheckError(
                    ErrorKind.BRANCH_USAGE_MISMATCH,
                    "case",
                    m,
                    f"branches consume different linear variables: "
                    f"{sorted(un)} vs {sorted(up)}",
                )
            ub = un | up
            return tn, _disjoint("case", m, us, ub)

        case Pair(a, b):
            ta, ua = _check(env, a)
            tb, ub = _check(env, b)
            return Tensor(ta, tb), _disjoint("pair", m, ua, ub)

        case LetPair(x, y, pair, body):
            tp, up = _check(env, pair)
            if not isinstance(tp, Tensor):
                raise TypeCheckError(
                    ErrorKind.NOT_A_TENSOR,
                    "let-pair",
                    m,
                    f"bound term has type {format_type(tp)}",
                )
            # second binder shadows the first when the names collide
            y2, body = freshen_binder(y, body, env.ctx.names() | {x})
            env_y = _Env(env.calc, env.ctx.extend(y2, tp.right))
            env_xy, x2, body = _bind(env_y, x, tp.left, body)
            tb, ub = _check(env_xy, body)
            ub = _release(env, "let-pair", m, y2, tp.right, ub)
            ub = _release(env, "let-pair", m, x2, tp.left, ub)
            return tb, _disjoint("let-pair", m, up, ub)

        case Lam(x, ta, body):
            env_x, x2, body2 = _bind(env, x, ta, body)
            tb, ub = _check(env_x, body2)
            ub = _release(env, "lambda", m, x2, ta, ub)
            return Lolli(ta, tb), ub

        case App(f, a):
            tf, uf = _check(env, f)
            if not isinstance(tf, Lolli):
                raise TypeCheckError(
                    ErrorKind.NOT_A_FUNCTION,
                    "app",
                    m,
                    f"applied term has type {format_type(tf)}",
                )
            ta, ua = _check(env, a)
            if ta != tf.arg:
                raise _mismatch("app", m, format_type(tf.arg), ta)
            return tf.result, _disjoint("app", m, uf, ua)

        case Lift(body):
            # the suspended body may only mention shareable variables
            tb, ub = _check(env, body)
            if ub:
                raise TypeCheckError(
                    ErrorKind.LINEAR_VAR_IN_LIFT,
                    "lift",
                    m,
                    f"suspended body uses linear variables: {sorted(ub)}",
                )
            return Bang(tb), frozenset()

        case Force(body):
            tb, ub = _check(env, body)
            if not isinstance(tb, Bang):
                raise TypeCheckError(
                    ErrorKind.NOT_A_BANG,
                    "force",
                    m,
                    f"forced term has type {format_type(tb)}",
                )
            return tb.body, ub

        case Rec(z, annot, body):
            if not isinstance(annot, Bang):
                raise TypeCheckError(
                    ErrorKind.NOT_A_BANG,
                    "rec",
                    m,
                    f"rec annotation must be !A, found {format_type(annot)}",
                )
            env_z, z2, body2 = _bind(env, z, annot, body)
            tb, ub = _check(env_z, body2)
            if ub:
                raise TypeCheckError(
                    ErrorKind.LINEAR_VAR_IN_REC,
                    "rec",
                    m,
                    f"recursive body uses linear variables: {sorted(ub)}",
                )
            if tb != annot.body:
                raise _mismatch("rec", m, format_type(annot.body), tb)
            return annot.body, frozenset()

    raise TypeError(f"not a term: {m!r}")
