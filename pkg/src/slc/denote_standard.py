"""Compositional denotational semantics with value-category lambdas.

A well-typed term denotes a map from environments (one semantic value
per context variable) to computations.  The interpreter is structural
over the term and never consults the operational evaluator.  Sharing of
nonlinear variables is the diagonal on environments (both subterms read
the same binding), discarding is simply not reading, and the monoidal
re-bracketing of contexts is suppressed: environments are flat maps.

Lambdas are interpreted by currying through the value level: a lambda
always converges, to a function from argument values to body
computations, regardless of whether its body diverges.  Recursion is a
guarded self-reference, i.e. a least fixed point computed by
fuel-indexed approximation: each unfolding costs one unit of fuel, so
running the denotation at fuel n observes the n-th Kleene approximant.

Values additionally denote total environment-to-value maps
(`denote_value`), and shareable values denote in the shared, cartesian
layer (`denote_value_shared`); returning these coincides with the
computation-level denotation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import ContractViolation
from .domains import Bind, Comp, Delay, Ret, SFun, SInl, SInr, SPair, SThunk, SUNIT, SemEnv
from .syntax import (
    App,
    Bang,
    Case,
    Context,
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
    freshen_binder,
    is_nonlinear,
    is_value,
)
from .typecheck import Calculus, TypeCheckError, typecheck


@dataclass
class Denotation:
    ctx: Context
    type: Type
    fun: Callable[[SemEnv], Comp]


@dataclass
class ValueDenotation:
    ctx: Context
    type: Type
    fun: Callable[[SemEnv], object]  # total: SemEnv -> SemVal, no fuel


def denote(calc: Calculus, ctx: Context, m: Term, ty: Type | None = None) -> Denotation:
    """Denotation of a well-typed term; ill-typed input is a contract error."""
    checked = _checked_type(calc, ctx, m, ty)
    _, fun = _build(calc, ctx, m, _lam_standard)
    return Denotation(ctx, checked, fun)


def denote_value(calc: Calculus, ctx: Context, v: Term, ty: Type | None = None) -> ValueDenotation:
    """Total value-level denotation; `Ret` of it agrees with `denote`."""
    if not is_value(v):
        raise ContractViolation(f"not a value: {format_term(v)}")
    checked = _checked_type(calc, ctx, v, ty)
    fun = _build_value(calc, ctx, v, _lam_standard)
    return ValueDenotation(ctx, checked, fun)


def denote_value_shared(
    calc: Calculus, ctx: Context, v: Term, ty: Type | None = None
) -> ValueDenotation:
    """Denotation of a shareable value in the cartesian layer.

    Requires a nonlinear type and a nonlinear context (the latter is
    forced by the former for values, but both are checked).  Lambdas
    never occur here: function types are not shareable.
    """
    if not is_value(v):
        raise ContractViolation(f"not a value: {format_term(v)}")
    if not ctx.is_nonlinear():
        raise ContractViolation(f"context has linear entries: {ctx}")
    checked = _checked_type(calc, ctx, v, ty)
    if not is_nonlinear(checked):
        raise ContractViolation(f"value has linear type {format_type(checked)}")
    fun = _build_shared(calc, ctx, v)
    return ValueDenotation(ctx, checked, fun)


def fix_denote(ctx: Context, z_name: str, ty: Type, body: Denotation) -> Denotation:
    """Least fixed point of a recursive body `ctx, z:!ty |- m : ty`.

    The returned denotation maps an environment to the guarded
    self-referential computation: running it at fuel n evaluates the
    body with the recursive thunk bound to the computation itself, every
    unfolding costing one unit, which computes the n-th approximant of
    the ascending chain starting at divergence.
    """
    if not ctx.is_nonlinear():
        raise ContractViolation(f"recursive definitions need a shareable context: {ctx}")

    def fun(env: SemEnv) -> Comp:
        comp_cell: list[Comp] = []

        def unfold() -> Comp:
            return body.fun({**env, z_name: SThunk(comp_cell[0])})

        comp = Delay(unfold)
        comp_cell.append(comp)
        return comp

    return Denotation(ctx, ty, fun)


def _checked_type(calc: Calculus, ctx: Context, m: Term, ty: Type | None) -> Type:
    try:
        checked, _ = typecheck(calc, ctx, m)
    except TypeCheckError as exc:
        raise ContractViolation(f"denoting ill-typed term: {exc}") from exc
    if ty is not None and checked != ty:
        raise ContractViolation(
            f"term has type {format_type(checked)}, not {format_type(ty)}"
        )
    return checked


# ---------------------------------------------------------------------------
# Shared interpreter core
#
# `lam_rule(body_fun, binder, env) -> Comp` decides what a lambda whose
# body denotes `body_fun` means in environment `env`; the standard rule
# returns the closure immediately, the strict backend may judge the
# body divergent and collapse the lambda itself.

LamRule = Callable[[Callable[[SemEnv], Comp], str, Type, SemEnv], Comp]


def _lam_standard(
    body_fun: Callable[[SemEnv], Comp], binder: str, arg_type: Type, env: SemEnv
) -> Comp:
    return Ret(SFun(lambda arg: body_fun({**env, binder: arg})))


def _build(
    calc: Calculus, ctx: Context, m: Term, lam_rule: LamRule
) -> tuple[Type, Callable[[SemEnv], Comp]]:
    """Structural interpretation; assumes `m` is well-typed under `ctx`."""
    match m:
        case Var(x):
            ty = ctx.lookup(x)
            return ty, lambda env: Ret(env[x])

        case Star():
            return UNIT, lambda env: Ret(SUNIT)

        case Seq(a, b):
            _, fa = _build(calc, ctx, a, lam_rule)
            tb, fb = _build(calc, ctx, b, lam_rule)
            return tb, lambda env: Bind(fa(env), lambda _u: fb(env))

        case LeftInj(ta, tb, body):
            _, fb = _build(calc, ctx, body, lam_rule)
            return Sum(ta, tb), lambda env: Bind(fb(env), lambda v: Ret(SInl(v)))

        case RightInj(ta, tb, body):
            _, fb = _build(calc, ctx, body, lam_rule)
            return Sum(ta, tb), lambda env: Bind(fb(env), lambda v: Ret(SInr(v)))

        case Case(scrutinee, x, n, y, p):
            ts, fs = _build(calc, ctx, scrutinee, lam_rule)
            assert isinstance(ts, Sum)
            x2, n2 = freshen_binder(x, n, ctx.names())
            y2, p2 = freshen_binder(y, p, ctx.names())
            tn, fn = _build(calc, ctx.extend(x2, ts.left), n2, lam_rule)
            _, fp = _build(calc, ctx.extend(y2, ts.right), p2, lam_rule)

            def fun(env):
                def branch(v):
                    if isinstance(v, SInl):
                        return fn({**env, x2: v.value})
                    return fp({**env, y2: v.value})

                return Bind(fs(env), branch)

            return tn, fun

        case Pair(a, b):
            ta, fa = _build(calc, ctx, a, lam_rule)
            tb, fb = _build(calc, ctx, b, lam_rule)

            def fun(env):
                return Bind(
                    fa(env), lambda v: Bind(fb(env), lambda w: Ret(SPair(v, w)))
                )

            return Tensor(ta, tb), fun

        case LetPair(x, y, pair, body):
            tp, fpair = _build(calc, ctx, pair, lam_rule)
            assert isinstance(tp, Tensor)
            y2, body = freshen_binder(y, body, ctx.names() | {x})
            x2, body = freshen_binder(x, body, ctx.names() | {y2})
            tb, fb = _build(
                calc, ctx.extend(x2, tp.left).extend(y2, tp.right), body, lam_rule
            )

            def fun(env):
                return Bind(
                    fpair(env), lambda v: fb({**env, x2: v.fst, y2: v.snd})
                )

            return tb, fun

        case Lam(x, ta, body):
            x2, body2 = freshen_binder(x, body, ctx.names())
            tb, fb = _build(calc, ctx.extend(x2, ta), body2, lam_rule)
            return Lolli(ta, tb), lambda env: lam_rule(fb, x2, ta, env)

        case App(f, a):
            tf, ff = _build(calc, ctx, f, lam_rule)
            assert isinstance(tf, Lolli)
            _, fa = _build(calc, ctx, a, lam_rule)

            def fun(env):
                return Bind(
                    ff(env), lambda fv: Bind(fa(env), lambda av: fv.apply(av))
                )

            return tf.result, fun

        case Lift(body):
            # the suspended body only sees the shareable part of the context
            inner_ctx = ctx.nonlinear_part()
            tb, fb = _build(calc, inner_ctx, body, lam_rule)
            keep = inner_ctx.names()
            return Bang(tb), lambda env: Ret(
                SThunk(fb({k: v for k, v in env.items() if k in keep}))
            )

        case Force(body):
            tb, fb = _build(calc, ctx, body, lam_rule)
            assert isinstance(tb, Bang)
            return tb.body, lambda env: Bind(fb(env), lambda tv: tv.comp)

        case Rec(z, annot, body):
            assert isinstance(annot, Bang)
            inner_ctx = ctx.nonlinear_part()
            z2, body2 = freshen_binder(z, body, inner_ctx.names())
            _, fb = _build(calc, inner_ctx.extend(z2, annot), body2, lam_rule)
            body_den = Denotation(inner_ctx.extend(z2, annot), annot.body, fb)
            fixed = fix_denote(inner_ctx, z2, annot.body, body_den)
            keep = inner_ctx.names()
            return annot.body, lambda env: fixed.fun(
                {k: v for k, v in env.items() if k in keep}
            )

    raise TypeError(f"not a term: {m!r}")


def _build_value(
    calc: Calculus, ctx: Context, v: Term, lam_rule: LamRule
) -> Callable[[SemEnv], object]:
    """Total value-level interpretation; assumes a well-typed value."""
    match v:
        case Var(x):
            return lambda env: env[x]
        case Star():
            return lambda env: SUNIT
        case LeftInj(_, _, body):
            fb = _build_value(calc, ctx, body, lam_rule)
            return lambda env: SInl(fb(env))
        case RightInj(_, _, body):
            fb = _build_value(calc, ctx, body, lam_rule)
            return lambda env: SInr(fb(env))
        case Pair(a, b):
            fa = _build_value(calc, ctx, a, lam_rule)
            fb = _build_value(calc, ctx, b, lam_rule)
            return lambda env: SPair(fa(env), fb(env))
        case Lam(x, ta, body):
            x2, body2 = freshen_binder(x, body, ctx.names())
            _, fb = _build(calc, ctx.extend(x2, ta), body2, lam_rule)
            return lambda env: SFun(lambda arg: fb({**env, x2: arg}))
        case Lift(body):
            inner_ctx = ctx.nonlinear_part()
            _, fb = _build(calc, inner_ctx, body, lam_rule)
            keep = inner_ctx.names()
            return lambda env: SThunk(fb({k: w for k, w in env.items() if k in keep}))
    raise ContractViolation(f"not a value: {format_term(v)}")


def _build_shared(calc: Calculus, ctx: Context, v: Term) -> Callable[[SemEnv], object]:
    # clause set of the cartesian layer: no lambdas (their types are linear)
    match v:
        case LeftInj(_, _, body):
            fb = _build_shared(calc, ctx, body)
            return lambda env: SInl(fb(env))
        case RightInj(_, _, body):
            fb = _build_shared(calc, ctx, body)
            return lambda env: SInr(fb(env))
        case Pair(a, b):
            fa = _build_shared(calc, ctx, a)
            fb = _build_shared(calc, ctx, b)
            return lambda env: SPair(fa(env), fb(env))
        case Var(_) | Star() | Lift(_):
            return _build_value(calc, ctx, v, _lam_standard)
    raise ContractViolation(f"not a shareable value: {format_term(v)}")
