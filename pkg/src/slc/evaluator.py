"""Fuel-bounded big-step call-by-value evaluation.

Each inference-rule instance of the evaluation relation costs exactly
one unit of fuel, so the fuel bound is a bound on derivation size.  The
machine is a defunctionalised-continuation loop rather than host
recursion: deep recursive unfoldings exhaust fuel, never the Python
stack.

Open terms are allowed (a variable evaluates to itself).  Ill-typed
terms can reach states where no rule applies; since no derivation
exists at any fuel, such terms report fuel exhaustion like any other
non-converging search.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    App,
    Case,
    Force,
    Lam,
    LeftInj,
    LetPair,
    Lift,
    Pair,
    Rec,
    RightInj,
    Seq,
    Star,
    Term,
    Var,
    subst_parallel,
)


@dataclass(frozen=True)
class Converged:
    value: Term


@dataclass(frozen=True)
class OutOfFuel:
    pass


EvalOutcome = Converged | OutOfFuel
OUT_OF_FUEL = OutOfFuel()


@dataclass(frozen=True)
class TraceStats:
    rules: int
    max_depth: int


def evaluate(m: Term, fuel: int) -> EvalOutcome:
    """Evaluate `m` using at most `fuel` rule instances."""
    outcome, _ = evaluate_traced(m, fuel)
    return outcome


def evaluate_traced(m: Term, fuel: int) -> tuple[EvalOutcome, TraceStats]:
    """Like `evaluate`, also reporting derivation-size statistics."""
    frames: list[tuple] = []
    control: Term | None = m  # term to evaluate, or None when returning
    value: Term = m
    depth = 1
    rules = 0
    max_depth = 0

    while True:
        if control is not None:
            if fuel <= 0:
                return OUT_OF_FUEL, TraceStats(rules, max_depth)
            fuel -= 1
            rules += 1
            if depth > max_depth:
                max_depth = depth
            term = control
            match term:
                case Var(_) | Star() | Lam(_, _, _) | Lift(_):
                    control, value = None, term
                case Seq(a, b):
                    frames.append(("seq", b, depth))
                    control, depth = a, depth + 1
                case LeftInj(ta, tb, body):
                    frames.append(("inl", ta, tb))
                    control, depth = body, depth + 1
                case RightInj(ta, tb, body):
                    frames.append(("inr", ta, tb))
                    control, depth = body, depth + 1
                case Case(s, x, n, y, p):
                    frames.append(("case", x, n, y, p, depth))
                    control, depth = s, depth + 1
                case Pair(a, b):
                    frames.append(("pair0", b, depth))
                    control, depth = a, depth + 1
                case LetPair(x, y, pair, body):
                    frames.append(("letpair", x, y, body, depth))
                    control, depth = pair, depth + 1
                case App(f, a):
                    frames.append(("app0", a, depth))
                    control, depth = f, depth + 1
                case Force(body):
                    frames.append(("force", depth))
                    control, depth = body, depth + 1
                case Rec(z, _, body):
                    control = subst_parallel(body, {z: Lift(term)})
                    depth += 1
                case _:
                    raise TypeError(f"not a term: {term!r}")
            continue

        if not frames:
            return Converged(value), TraceStats(rules, max_depth)

        frame = frames.pop()
        match frame:
            case ("seq", b, d):
                if value != Star():
                    return OUT_OF_FUEL, TraceStats(rules, max_depth)  # stuck
                control, depth = b, d + 1
            case ("inl", ta, tb):
                value = LeftInj(ta, tb, value)
            case ("inr", ta, tb):
                value = RightInj(ta, tb, value)
            case ("case", x, n, y, p, d):
                match value:
                    case LeftInj(_, _, payload):
                        control = subst_parallel(n, {x: payload})
                    case RightInj(_, _, payload):
                        control = subst_parallel(p, {y: payload})
                    case _:
                        return OUT_OF_FUEL, TraceStats(rules, max_depth)  # stuck
                depth = d + 1
            case ("pair0", b, d):
                frames.append(("pair1", value))
                control, depth = b, d + 1
            case ("pair1", first):
                value = Pair(first, value)
            case ("letpair", x, y, body, d):
                match value:
                    case Pair(v, w):
                        control = subst_parallel(body, {x: v, y: w})
                        depth = d + 1
                    case _:
                        return OUT_OF_FUEL, TraceStats(rules, max_depth)  # stuck
            case ("app0", a, d):
                frames.append(("app1", value, d))
                control, depth = a, d + 1
            case ("app1", fn, d):
                match fn:
                    case Lam(x, _, body):
                        control = subst_parallel(body, {x: value})
                        depth = d + 1
                    case _:
                        return OUT_OF_FUEL, TraceStats(rules, max_depth)  # stuck
            case ("force", d):
                match value:
                    case Lift(inner):
                        control, depth = inner, d + 1
                    case _:
                        return OUT_OF_FUEL, TraceStats(rules, max_depth)  # stuck
            case _:
                raise AssertionError(f"bad frame {frame!r}")
