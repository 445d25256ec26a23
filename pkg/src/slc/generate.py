"""Rule-directed random generation of well-typed closed terms.

Generation runs top-down: at each node a formation rule applicable to
the goal type is sampled, and the linear variables owned by the node are
threaded as obligations.  Multi-premise rules partition the owned set
between premises, binders add obligations to their scope, and leaves
may only fire when the obligations they hold are dischargeable: under the
linear discipline every owned variable must be consumed in the subtree
that owns it, under the affine discipline consumption is optional.
Dead ends backtrack locally a bounded number of times, then the builder
shrinks the depth budget; emitted terms typecheck by construction.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterator

from .syntax import (
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
    is_nonlinear,
    parse_type,
)
from .typecheck import Calculus

DEFAULT_PALETTE: tuple[Type, ...] = (
    UNIT,
    parse_type("I + I"),
    parse_type("I -o I"),
    parse_type("!I"),
)


@dataclass(frozen=True)
class GenConfig:
    calculus: Calculus = Calculus.AFFINE
    max_depth: int = 4
    palette: tuple[Type, ...] = DEFAULT_PALETTE
    seed: int = 0
    count: int = 1000
    fuel: int = 10**4
    probe_budget: int = 8
    rec_prob: float = 0.2


class _DeadEnd(Exception):
    pass


@dataclass
class _Gen:
    rng: random.Random
    calc: Calculus
    palette: tuple[Type, ...]
    rec_prob: float
    coverage: Counter = field(default_factory=Counter)
    fresh: int = 0

    def name(self) -> str:
        self.fresh += 1
        return f"{'xyzuwfg'[self.fresh % 7]}{self.fresh}"


def gen_typed_term(cfg: GenConfig) -> tuple[Term, Type]:
    """One closed well-typed term; deterministic in `cfg.seed`."""
    term, ty, _ = _gen_with_coverage(cfg)
    return term, ty


def gen_terms(cfg: GenConfig) -> Iterator[tuple[Term, Type]]:
    """`cfg.count` terms, case i drawn from seed `cfg.seed + i`."""
    for i in range(cfg.count):
        yield gen_typed_term(replace(cfg, seed=cfg.seed + i))


def _gen_with_coverage(cfg: GenConfig, goal: Type | None = None):
    rng = random.Random(f"term:{cfg.seed}")
    state = _Gen(rng, cfg.calculus, tuple(cfg.palette), cfg.rec_prob)
    target = goal if goal is not None else rng.choice(state.palette)
    for depth in range(cfg.max_depth, 0, -1):
        for _ in range(40):
            try:
                term = _gen(state, {}, {}, target, depth)
            except _DeadEnd:
                continue
            return term, target, state.coverage
    # depth 1 at any palette goal cannot dead-end forever; unit always works
    state.coverage["star"] += 1
    return Star(), UNIT, state.coverage


def gen_program(cfg: GenConfig, goal: Type) -> Term:
    """Closed well-typed term at a requested goal type."""
    term, _, _ = _gen_with_coverage(cfg, goal=goal)
    return term


def gen_value(cfg: GenConfig, ctx_entries: tuple[tuple[str, Type], ...], goal: Type) -> Term:
    """A value of type `goal` whose free variables come from `ctx_entries`.

    Context entries of linear type become obligations of the value under
    the linear discipline.
    """
    rng = random.Random(f"value:{cfg.seed}")
    state = _Gen(rng, cfg.calculus, tuple(cfg.palette), cfg.rec_prob)
    nonlinear = {n: t for n, t in ctx_entries if is_nonlinear(t)}
    owned = {n: t for n, t in ctx_entries if not is_nonlinear(t)}
    for depth in range(max(cfg.max_depth, 2), 0, -1):
        for _ in range(40):
            try:
                return _gen_value(state, nonlinear, owned, goal, depth)
            except _DeadEnd:
                continue
    raise _DeadEnd(f"no value of type {goal} from {ctx_entries}")


def _split(rng: random.Random, owned: dict) -> tuple[dict, dict]:
    left, right = {}, {}
    for name, ty in owned.items():
        (left if rng.random() < 0.5 else right)[name] = ty
    return left, right


def _leaf_ok(calc: Calculus, owned: dict) -> bool:
    # a leaf that consumes nothing discharges obligations only in affine mode
    return calc is Calculus.AFFINE or not owned


def _gen(state: _Gen, nonlinear: dict, owned: dict, goal: Type, depth: int) -> Term:
    rng = state.rng
    candidates: list[str] = []

    matching_nonlinear = [n for n, t in nonlinear.items() if t == goal]
    matching_owned = [n for n, t in owned.items() if t == goal]
    if matching_nonlinear and _leaf_ok(state.calc, owned):
        candidates.append("var-shared")
    if matching_owned and (state.calc is Calculus.AFFINE or len(owned) == 1):
        candidates.append("var-owned")
    if goal == UNIT and _leaf_ok(state.calc, owned):
        candidates.append("star")

    if depth > 1:
        candidates.append("seq")
        candidates.append("app")
        candidates.append("case")
        candidates.append("letpair")
        candidates.append("force")
        if isinstance(goal, Sum):
            candidates.extend(("left", "right"))
        if isinstance(goal, Tensor):
            candidates.append("pair")
        if isinstance(goal, Lolli):
            candidates.extend(("lam", "lam"))
        if isinstance(goal, Bang) and (not owned or state.calc is Calculus.AFFINE):
            candidates.append("lift")
        if (not owned or state.calc is Calculus.AFFINE) and rng.random() < state.rec_prob:
            candidates.append("rec")
        # prefer rules that can route owned obligations toward consumption
        owned_funs = [
            (n, t) for n, t in owned.items() if isinstance(t, Lolli) and t.result == goal
        ]
        if owned_funs:
            candidates.extend(("app-owned", "app-owned"))

    if not candidates:
        raise _DeadEnd

    rng.shuffle(candidates)
    for pick in candidates:
        try:
            term = _apply_rule(state, pick, nonlinear, owned, goal, depth)
        except _DeadEnd:
            continue
        state.coverage[pick.split("-")[0]] += 1
        return term
    raise _DeadEnd


def _apply_rule(
    state: _Gen, pick: str, nonlinear: dict, owned: dict, goal: Type, depth: int
) -> Term:
    rng = state.rng
    palette_type = lambda: rng.choice(state.palette)

    match pick:
        case "star":
            return Star()

        case "var-shared":
            options = [n for n, t in nonlinear.items() if t == goal]
            return Var(rng.choice(options))

        case "var-owned":
            options = [n for n, t in owned.items() if t == goal]
            return Var(rng.choice(options))

        case "seq":
            left, right = _split(rng, owned)
            a = _gen(state, nonlinear, left, UNIT, depth - 1)
            b = _gen(state, nonlinear, right, goal, depth - 1)
            return Seq(a, b)

        case "left":
            assert isinstance(goal, Sum)
            return LeftInj(goal.left, goal.right, _gen(state, nonlinear, owned, goal.left, depth - 1))

        case "right":
            assert isinstance(goal, Sum)
            return RightInj(goal.left, goal.right, _gen(state, nonlinear, owned, goal.right, depth - 1))

        case "pair":
            assert isinstance(goal, Tensor)
            left, right = _split(rng, owned)
            a = _gen(state, nonlinear, left, goal.left, depth - 1)
            b = _gen(state, nonlinear, right, goal.right, depth - 1)
            return Pair(a, b)

        case "lam":
            assert isinstance(goal, Lolli)
            binder = state.name()
            if is_nonlinear(goal.arg):
                body = _gen(state, {**nonlinear, binder: goal.arg}, owned, goal.result, depth - 1)
            else:
                body = _gen(
                    state, nonlinear, {**owned, binder: goal.arg}, goal.result, depth - 1
                )
            return Lam(binder, goal.arg, body)

        case "app":
            arg_ty = palette_type()
            left, right = _split(rng, owned)
            fn = _gen(state, nonlinear, left, Lolli(arg_ty, goal), depth - 1)
            arg = _gen(state, nonlinear, right, arg_ty, depth - 1)
            return App(fn, arg)

        case "app-owned":
            options = [
                (n, t) for n, t in owned.items() if isinstance(t, Lolli) and t.result == goal
            ]
            name, fn_ty = rng.choice(options)
            rest = {n: t for n, t in owned.items() if n != name}
            arg = _gen(state, nonlinear, rest, fn_ty.arg, depth - 1)
            return App(Var(name), arg)

        case "case":
            sum_ty = Sum(palette_type(), palette_type())
            left, right = _split(rng, owned)
            scrutinee = _gen(state, nonlinear, left, sum_ty, depth - 1)
            xb, yb = state.name(), state.name()
            lb = _gen_branch(state, nonlinear, right, xb, sum_ty.left, goal, depth)
            rb = _gen_branch(state, nonlinear, right, yb, sum_ty.right, goal, depth)
            return Case(scrutinee, xb, lb, yb, rb)

        case "letpair":
            tensor_ty = Tensor(palette_type(), palette_type())
            left, right = _split(rng, owned)
            pair = _gen(state, nonlinear, left, tensor_ty, depth - 1)
            xb, yb = state.name(), state.name()
            body_nl = dict(nonlinear)
            body_owned = dict(right)
            for binder, ty in ((xb, tensor_ty.left), (yb, tensor_ty.right)):
                (body_nl if is_nonlinear(ty) else body_owned)[binder] = ty
            body = _gen(state, body_nl, body_owned, goal, depth - 1)
            return LetPair(xb, yb, pair, body)

        case "lift":
            assert isinstance(goal, Bang)
            # the suspended body must not touch owned obligations
            body = _gen(state, nonlinear, {}, goal.body, depth - 1)
            return Lift(body)

        case "force":
            return Force(_gen(state, nonlinear, owned, Bang(goal), depth - 1))

        case "rec":
            binder = state.name()
            body = _gen(state, {**nonlinear, binder: Bang(goal)}, {}, goal, depth - 1)
            return Rec(binder, Bang(goal), body)

    raise AssertionError(pick)


def _gen_branch(
    state: _Gen,
    nonlinear: dict,
    owned: dict,
    binder: str,
    binder_ty: Type,
    goal: Type,
    depth: int,
) -> Term:
    # both branches receive the same owned share; under the linear
    # discipline each must consume exactly that share plus its binder
    if is_nonlinear(binder_ty):
        return _gen(state, {**nonlinear, binder: binder_ty}, dict(owned), goal, depth - 1)
    return _gen(state, nonlinear, {**owned, binder: binder_ty}, goal, depth - 1)


def _gen_value(state: _Gen, nonlinear: dict, owned: dict, goal: Type, depth: int) -> Term:
    rng = state.rng
    candidates: list[str] = []
    if [n for n, t in nonlinear.items() if t == goal] and _leaf_ok(state.calc, owned):
        candidates.append("var-shared")
    if [n for n, t in owned.items() if t == goal] and (
        state.calc is Calculus.AFFINE or len(owned) == 1
    ):
        candidates.append("var-owned")
    if goal == UNIT and _leaf_ok(state.calc, owned):
        candidates.append("star")
    if depth > 1:
        if isinstance(goal, Sum):
            candidates.extend(("left", "right"))
        if isinstance(goal, Tensor):
            candidates.append("pair")
    if isinstance(goal, Lolli):
        candidates.append("lam")
    if isinstance(goal, Bang) and (not owned or state.calc is Calculus.AFFINE):
        candidates.append("lift")
    if not candidates:
        raise _DeadEnd

    rng.shuffle(candidates)
    for pick in candidates:
        try:
            match pick:
                case "star":
                    return Star()
                case "var-shared":
                    return Var(rng.choice([n for n, t in nonlinear.items() if t == goal]))
                case "var-owned":
                    return Var(rng.choice([n for n, t in owned.items() if t == goal]))
                case "left":
                    return LeftInj(
                        goal.left, goal.right, _gen_value(state, nonlinear, owned, goal.left, depth - 1)
                    )
                case "right":
                    return RightInj(
                        goal.left, goal.right, _gen_value(state, nonlinear, owned, goal.right, depth - 1)
                    )
                case "pair":
                    left, right = _split(rng, owned)
                    return Pair(
                        _gen_value(state, nonlinear, left, goal.left, depth - 1),
                        _gen_value(state, nonlinear, right, goal.right, depth - 1),
                    )
                case "lam":
                    binder = state.name()
                    if is_nonlinear(goal.arg):
                        body = _gen(
                            state, {**nonlinear, binder: goal.arg}, owned, goal.result, max(depth - 1, 1)
                        )
                    else:
                        body = _gen(
                            state, nonlinear, {**owned, binder: goal.arg}, goal.result, max(depth - 1, 1)
                        )
                    return Lam(binder, goal.arg, body)
                case "lift":
                    body = _gen(state, nonlinear, {}, goal.body, max(depth - 1, 1))
                    return Lift(body)
        except _DeadEnd:
            continue
    raise _DeadEnd
