"""Exhaustive derivation search used as an independent oracle.

Implements the formation rules literally: multi-premise rules split the
context nondeterministically (shared entries must be nonlinear, linear
entries go to exactly one premise) and the search enumerates every
split.  Returns the set of derivable types, so the algorithmic checker
can be compared against it term by term.

In affine mode the context-absorbing rules (var, star, lift, rec) may
discard arbitrary leftover entries; in linear mode var/star/lift demand
a nonlinear remainder and rec demands a nonlinear context outright.
"""

from __future__ import annotations

from itertools import product

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
    freshen_binder,
    is_nonlinear,
)
from slc.typecheck import Calculus

Entry = tuple[str, Type]


def _splits2(entries: tuple[Entry, ...]):
    """All ways to route entries to two premises.

    Nonlinear entries may be shared or sent to either side; linear
    entries go to exactly one side.
    """
    choices = []
    for name, ty in entries:
        if is_nonlinear(ty):
            choices.append((("both", name, ty), ("left", name, ty), ("right", name, ty)))
        else:
            choices.append((("left", name, ty), ("right", name, ty)))
    for combo in product(*choices):
        left = tuple((n, t) for side, n, t in combo if side in ("both", "left"))
        right = tuple((n, t) for side, n, t in combo if side in ("both", "right"))
        yield left, right


def _absorb_splits(entries: tuple[Entry, ...]):
    """All ways to keep a nonlinear sub-context and discard the rest."""
    choices = []
    for name, ty in entries:
        if is_nonlinear(ty):
            choices.append((("keep", name, ty), ("drop", name, ty)))
        else:
            choices.append((("drop", name, ty),))
    for combo in product(*choices):
        yield tuple((n, t) for action, n, t in combo if action == "keep")


def derivable_types(calc: Calculus, entries: tuple[Entry, ...], m: Term) -> set[Type]:
    affine = calc is Calculus.AFFINE
    names = frozenset(n for n, _ in entries)
    all_nonlinear = all(is_nonlinear(t) for _, t in entries)

    match m:
        case Var(x):
            ty = next((t for n, t in entries if n == x), None)
            if ty is None:
                return set()
            rest_ok = affine or all(
                is_nonlinear(t) for n, t in entries if n != x
            )
            return {ty} if rest_ok else set()

        case Star():
            return {UNIT} if (affine or all_nonlinear) else set()

        case Seq(a, b):
            out: set[Type] = set()
            for left, right in _splits2(entries):
                if UNIT in derivable_types(calc, left, a):
                    out |= derivable_types(calc, right, b)
            return out

        case LeftInj(ta, tb, body):
            return {
                Sum(ta, tb)
                for t in derivable_types(calc, entries, body)
                if t == ta
            }

        case RightInj(ta, tb, body):
            return {
                Sum(ta, tb)
                for t in derivable_types(calc, entries, body)
                if t == tb
            }

        case Case(scrutinee, x, n, y, p):
            out = set()
            for left, right in _splits2(entries):
                for ts in derivable_types(calc, left, scrutinee):
                    if not isinstance(ts, Sum):
                        continue
                    x2, n2 = freshen_binder(x, n, frozenset(nm for nm, _ in right))
                    y2, p2 = freshen_binder(y, p, frozenset(nm for nm, _ in right))
                    tns = derivable_types(calc, right + ((x2, ts.left),), n2)
                    tps = derivable_types(calc, right + ((y2, ts.right),), p2)
                    out |= tns & tps
            return out

        case Pair(a, b):
            out = set()
            for left, right in _splits2(entries):
                for ta in derivable_types(calc, left, a):
                    for tb in derivable_types(calc, right, b):
                        out.add(Tensor(ta, tb))
            return out

        case LetPair(x, y, pair, body):
            out = set()
            for left, right in _splits2(entries):
                for tp in derivable_types(calc, left, pair):
                    if not isinstance(tp, Tensor):
                        continue
                    rnames = frozenset(nm for nm, _ in right)
                    y2, body2 = freshen_binder(y, body, rnames | {x})
                    x2, body2 = freshen_binder(x, body2, rnames | {y2})
                    out |= derivable_types(
                        calc, right + ((x2, tp.left), (y2, tp.right)), body2
                    )
            return out

        case Lam(x, ta, body):
            x2, body2 = freshen_binder(x, body, names)
            return {
                Lolli(ta, tb)
                for tb in derivable_types(calc, entries + ((x2, ta),), body2)
            }

        case App(f, a):
            out = set()
            for left, right in _splits2(entries):
                for tf in derivable_types(calc, left, f):
                    if not isinstance(tf, Lolli):
                        continue
                    if tf.arg in derivable_types(calc, right, a):
                        out.add(tf.result)
            return out

        case Lift(body):
            out = set()
            if affine:
                for kept in _absorb_splits(entries):
                    out |= {Bang(t) for t in derivable_types(calc, kept, body)}
            elif all_nonlinear:
                out |= {Bang(t) for t in derivable_types(calc, entries, body)}
            return out

        case Force(body):
            return {
                t.body
                for t in derivable_types(calc, entries, body)
                if isinstance(t, Bang)
            }

        case Rec(z, annot, body):
            if not isinstance(annot, Bang):
                return set()
            out = set()
            if affine:
                premises = _absorb_splits(entries)
            elif all_nonlinear:
                premises = [entries]
            else:
                premises = []
            for kept in premises:
                z2, body2 = freshen_binder(z, body, frozenset(nm for nm, _ in kept))
                if annot.body in derivable_types(calc, kept + ((z2, annot),), body2):
                    out.add(annot.body)
            return out

    raise TypeError(f"not a term: {m!r}")
