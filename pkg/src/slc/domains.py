"""Semantic values, fuel-indexed computations, and observation-bounded equality.

A `Comp` is an element of a pointed domain observed through fuel:
`run(n)` yields either a semantic value or `NOT_YET`, and is monotone in
`n` (once converged, the same value at every larger fuel).  Divergence
is represented extensionally, by a computation that never converges;
there is deliberately no inspectable bottom tag, so nothing in the
package can branch on divergence.

Semantic values mirror the type interpretations: the unit point,
injections, pairs, functions from values to computations, and thunks
(suspended computations).  Equality of computations is semi-decided by
`sem_equal`: it runs both sides, descends through first-order
structure, and probes functions and thunks extensionally.  A `Differ`
verdict always carries a replayable witness path; `Equal` is
approximate at higher order.
"""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass
from typing import Callable, Iterable, Union

from .errors import ContractViolation
from .syntax import Bang, Context, Lolli, Sum, Tensor, Type, Unit, format_type, is_nonlinear

# ---------------------------------------------------------------------------
# Computations


class NotYet:
    """Marker for a computation that has not converged within its fuel."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NotYet"


NOT_YET = NotYet()


class Comp:
    """Base class of fuel-indexed computations."""

    __slots__ = ()

    def run(self, fuel: int):
        """Observe this computation: a SemVal, or NOT_YET within `fuel`."""
        return exec_comp(self, fuel)[0]


class Ret(Comp):
    """Immediately converging computation."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __repr__(self):
        return f"Ret({self.value!r})"


class Bottom(Comp):
    """The least element: never converges at any fuel."""

    __slots__ = ()

    def __repr__(self):
        return "Bottom"


BOTTOM = Bottom()


class Delay(Comp):
    """Guarded computation: costs one unit of fuel, then proceeds.

    The thunk must be pure; its result is memoised so repeated runs do
    not rebuild the underlying structure.  A self-reference observed
    while the thunk is still being built reads as divergence (the zeroth
    approximant); interpreters that run computations during construction
    stay conservative instead of recursing forever.
    """

    __slots__ = ("fn", "_forced", "_in_flight")

    def __init__(self, fn: Callable[[], Comp]):
        self.fn = fn
        self._forced = None
        self._in_flight = False

    def force(self) -> Comp:
        if self._forced is None:
            if self._in_flight:
                return BOTTOM
            self._in_flight = True
            try:
                self._forced = self.fn()
            finally:
                self._in_flight = False
        return self._forced

    def __repr__(self):
        return "Delay(...)"


class Bind(Comp):
    """Strict sequencing: run `comp`, feed its value to `fn`."""

    __slots__ = ("comp", "fn")

    def __init__(self, comp: Comp, fn: Callable):
        self.comp = comp
        self.fn = fn

    def __repr__(self):
        return f"Bind({self.comp!r}, ...)"


def exec_comp(comp: Comp, fuel: int):
    """Run a computation, returning (value | NOT_YET, remaining fuel).

    Iterative, so arbitrarily deep chains of guards and binds cannot
    overflow the host stack.  Fuel is consumed only by `Delay` nodes;
    once a computation converges, its cost is a fixed constant, which
    makes monotonicity structural.
    """
    stack: list[Callable] = []
    cur = comp
    while True:
        t = type(cur)
        if t is Ret:
            if not stack:
                return cur.value, fuel
            cur = stack.pop()(cur.value)
        elif t is Bind:
            stack.append(cur.fn)
            cur = cur.comp
        elif t is Delay:
            if fuel <= 0:
                return NOT_YET, 0
            fuel -= 1
            cur = cur.force()
        elif t is Bottom:
            return NOT_YET, 0
        else:
            raise TypeError(f"not a computation: {cur!r}")


# ---------------------------------------------------------------------------
# Semantic values


class SemVal:
    __slots__ = ()

    def __repr__(self):
        return render_semval(self)


class SUnit(SemVal):
    __slots__ = ()


SUNIT = SUnit()


class SInl(SemVal):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class SInr(SemVal):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class SPair(SemVal):
    __slots__ = ("fst", "snd")

    def __init__(self, fst, snd):
        self.fst = fst
        self.snd = snd


class SFun(SemVal):
    """A point of a function-type interpretation: values to computations.

    `table` optionally describes generated finite-table functions so
    disagreement witnesses stay printable.
    """

    __slots__ = ("apply", "table")

    def __init__(self, apply: Callable[[SemVal], Comp], table: tuple | None = None):
        self.apply = apply
        self.table = table


class SThunk(SemVal):
    """A suspended computation; the point of a `!A` interpretation."""

    __slots__ = ("comp",)

    def __init__(self, comp: Comp):
        self.comp = comp


def render_semval(v: SemVal) -> str:
    """First-order structure rendered like the term syntax; functions
    and thunks are opaque."""
    if isinstance(v, SUnit):
        return "*"
    if isinstance(v, SInl):
        inner = render_semval(v.value)
        return f"left ({inner})" if isinstance(v.value, (SInl, SInr)) else f"left {inner}"
    if isinstance(v, SInr):
        inner = render_semval(v.value)
        return f"right ({inner})" if isinstance(v.value, (SInl, SInr)) else f"right {inner}"
    if isinstance(v, SPair):
        return f"<{render_semval(v.fst)}, {render_semval(v.snd)}>"
    if isinstance(v, SFun):
        return "<fun>"
    if isinstance(v, SThunk):
        return "<thunk>"
    return repr(v)


def well_typed_sem(t: Type, v) -> bool:
    """Structural membership of `v` in the interpretation of `t`.

    First-order shapes are checked recursively; functions and thunks
    only by tag (their contents are checked lazily, on use).
    """
    match t:
        case Unit():
            return isinstance(v, SUnit)
        case Sum(a, b):
            if isinstance(v, SInl):
                return well_typed_sem(a, v.value)
            if isinstance(v, SInr):
                return well_typed_sem(b, v.value)
            return False
        case Tensor(a, b):
            return (
                isinstance(v, SPair)
                and well_typed_sem(a, v.fst)
                and well_typed_sem(b, v.snd)
            )
        case Lolli(_, _):
            return isinstance(v, SFun)
        case Bang(_):
            return isinstance(v, SThunk)
    raise TypeError(f"not a type: {t!r}")


#: Environments are finite maps from variable names to semantic values.
SemEnv = dict


# ---------------------------------------------------------------------------
# Structural maps at shareable types


def _check_shareable(x: Union[Type, Context], affine: bool, op: str) -> None:
    if affine:
        return
    if isinstance(x, Context):
        if not x.is_nonlinear():
            raise ContractViolation(f"{op} on context with linear entries: {x}")
    elif not is_nonlinear(x):
        raise ContractViolation(f"{op} at linear type {format_type(x)}")


def discard(x: Union[Type, Context], value, affine: bool = False) -> SUnit:
    """The map into the unit object.

    At a linear type this exists only under the affine discipline, where
    the unit interpretation is terminal; pass `affine=True` there.
    """
    _check_shareable(x, affine, "discard")
    return SUNIT


def copy(x: Union[Type, Context], value) -> SPair:
    """The diagonal at a shareable type: both components share `value`,
    nothing is re-run."""
    _check_shareable(x, False, "copy")
    return SPair(value, value)


def box(x: Union[Type, Context], value) -> SThunk:
    """Promotion of a shareable value: the immediately converging thunk."""
    _check_shareable(x, False, "box")
    return SThunk(Ret(value))


# ---------------------------------------------------------------------------
# Deterministic generation of semantic values

_PROBE_SIZE = 2
_TABLE_FINGERPRINT_DEPTH = 3


def _mix(*parts) -> int:
    return zlib.crc32("|".join(str(p) for p in parts).encode())


def _fingerprint(v, depth: int = _TABLE_FINGERPRINT_DEPTH) -> str:
    if depth <= 0:
        return "#"
    if isinstance(v, SUnit):
        return "u"
    if isinstance(v, SInl):
        return "l" + _fingerprint(v.value, depth - 1)
    if isinstance(v, SInr):
        return "r" + _fingerprint(v.value, depth - 1)
    if isinstance(v, SPair):
        return "p" + _fingerprint(v.fst, depth - 1) + _fingerprint(v.snd, depth - 1)
    if isinstance(v, SFun):
        return "f"
    if isinstance(v, SThunk):
        return "t"
    return "?"


def gen_sem_val(t: Type, seed: int, size: int = _PROBE_SIZE) -> SemVal:
    """Deterministic-in-seed well-typed semantic value of type `t`.

    Functions are finite dispatch tables over argument fingerprints and
    may return divergence; thunks are divergent with positive
    probability.
    """
    rng = random.Random(_mix("semval", seed, size, format_type(t)))
    return _gen(t, rng, max(size, 1))


def _gen(t: Type, rng: random.Random, size: int) -> SemVal:
    match t:
        case Unit():
            return SUNIT
        case Sum(a, b):
            if rng.random() < 0.5:
                return SInl(_gen(a, rng, max(size - 1, 1)))
            return SInr(_gen(b, rng, max(size - 1, 1)))
        case Tensor(a, b):
            fst = _gen(a, rng, max(size - 1, 1))
            snd = _gen(b, rng, max(size - 1, 1))
            return SPair(fst, snd)
        case Bang(a):
            if rng.random() < 0.25:
                return SThunk(BOTTOM)
            return SThunk(Ret(_gen(a, rng, max(size - 1, 1))))
        case Lolli(_, b):
            entries = []
            for _ in range(1 + rng.randrange(3)):
                if rng.random() < 0.2:
                    entries.append(BOTTOM)
                else:
                    entries.append(Ret(_gen(b, rng, max(size - 1, 1))))
            table = tuple(entries)

            def apply(arg, table=table):
                return table[_mix(_fingerprint(arg)) % len(table)]

            return SFun(apply, table=tuple(map(repr, table)))
    raise TypeError(f"not a type: {t!r}")


# ---------------------------------------------------------------------------
# Observation-bounded equality


@dataclass(frozen=True)
class Equal:
    pass


@dataclass(frozen=True)
class Differ:
    path: tuple
    detail: str


@dataclass(frozen=True)
class Unknown:
    fuel: int


EqVerdict = Union[Equal, Differ, Unknown]
EQUAL = Equal()


def sem_equal(
    t: Type, d1: Comp, d2: Comp, fuel: int, probe_budget: int
) -> EqVerdict:
    """Compare two computations at type `t` by bounded observation.

    Both unconverged: Unknown.  One unconverged: Unknown (divergence
    sits below everything, so no finite observation separates them).
    Both converged: structural descent; at function and thunk positions
    the comparison applies generated probe arguments and forces,
    re-running with the same fuel.  Differ is sound: its witness path
    replays to a genuine disagreement.  Equal is approximate beyond
    first order.
    """
    return _cmp_comp(t, d1, d2, fuel, probe_budget, ())


def _cmp_comp(t, d1, d2, fuel, probes, path):
    r1 = exec_comp(d1, fuel)[0]
    r2 = exec_comp(d2, fuel)[0]
    if r1 is NOT_YET or r2 is NOT_YET:
        return Unknown(fuel)
    return _cmp_val(t, r1, r2, fuel, probes, path)


_PROBE_CACHE: dict = {}


def _probe_val(t: Type, i: int) -> SemVal:
    # probes are deterministic per (type, index); share them across calls
    key = (t, i)
    cached = _PROBE_CACHE.get(key)
    if cached is None:
        cached = gen_sem_val(t, _mix("probe", i), _PROBE_SIZE)
        _PROBE_CACHE[key] = cached
    return cached


def _cmp_val(t, v1, v2, fuel, probes, path):
    match t:
        case Unit():
            return EQUAL
        case Sum(a, b):
            tag1 = isinstance(v1, SInl)
            tag2 = isinstance(v2, SInl)
            if tag1 != tag2:
                return Differ(
                    path + (("tag",),),
                    f"{'left' if tag1 else 'right'} vs {'left' if tag2 else 'right'}",
                )
            if tag1:
                return _cmp_val(a, v1.value, v2.value, fuel, probes, path + (("left",),))
            return _cmp_val(b, v1.value, v2.value, fuel, probes, path + (("right",),))
        case Tensor(a, b):
            first = _cmp_val(a, v1.fst, v2.fst, fuel, probes, path + (("fst",),))
            if isinstance(first, Differ):
                return first
            second = _cmp_val(b, v1.snd, v2.snd, fuel, probes, path + (("snd",),))
            if isinstance(second, Differ):
                return second
            if isinstance(first, Unknown) or isinstance(second, Unknown):
                return Unknown(fuel)
            return EQUAL
        case Lolli(a, b):
            unknown = False
            for i in range(probes):
                arg = _probe_val(a, i)
                sub = _cmp_comp(
                    b, v1.apply(arg), v2.apply(arg), fuel, probes, path + (("apply", i),)
                )
                if isinstance(sub, Differ):
                    return sub
                if isinstance(sub, Unknown):
                    unknown = True
            return Unknown(fuel) if unknown else EQUAL
        case Bang(a):
            return _cmp_comp(a, v1.comp, v2.comp, fuel, probes, path + (("force",),))
    raise TypeError(f"not a type: {t!r}")


def replay_witness(t: Type, d1: Comp, d2: Comp, path: tuple, fuel: int):
    """Replay a Differ witness, returning the two observations at its end.

    The final step of a witness is always a tag comparison at a sum
    position; the returned strings differ whenever the verdict that
    produced the path was sound.
    """
    v1 = exec_comp(d1, fuel)[0]
    v2 = exec_comp(d2, fuel)[0]
    for step in path:
        if v1 is NOT_YET or v2 is NOT_YET:
            return ("not-yet", "not-yet")
        match step:
            case ("tag",):
                tag = lambda v: "left" if isinstance(v, SInl) else "right"
                return (tag(v1), tag(v2))
            case ("left",) | ("right",):
                v1, v2 = v1.value, v2.value
            case ("fst",):
                v1, v2 = v1.fst, v2.fst
            case ("snd",):
                v1, v2 = v1.snd, v2.snd
            case ("apply", i):
                assert isinstance(t, Lolli)
                arg = _probe_val(t.arg, i)
                v1 = exec_comp(v1.apply(arg), fuel)[0]
                v2 = exec_comp(v2.apply(arg), fuel)[0]
                t = t.result
                continue
            case ("force",):
                v1 = exec_comp(v1.comp, fuel)[0]
                v2 = exec_comp(v2.comp, fuel)[0]
                t = t.body
                continue
            case _:
                raise ValueError(f"bad witness step {step!r}")
        t = _step_type(t, step)
    return (render_semval(v1), render_semval(v2))


def _step_type(t: Type, step: tuple) -> Type:
    match (t, step):
        case (Sum(a, _), ("left",)):
            return a
        case (Sum(_, b), ("right",)):
            return b
        case (Tensor(a, _), ("fst",)):
            return a
        case (Tensor(_, b), ("snd",)):
            return b
    raise ValueError(f"step {step!r} does not match type {format_type(t)}")


def comp_monotone(c: Comp, lo: int, hi: int) -> bool:
    """Double-run check: convergence at `lo` persists identically at `hi`."""
    r_lo = exec_comp(c, lo)[0]
    if r_lo is NOT_YET:
        return True
    r_hi = exec_comp(c, hi)[0]
    return r_hi is r_lo


def sequence_comps(comps: Iterable[Comp]) -> Comp:
    """Strictly run computations left to right, returning the list of values."""
    comps = list(comps)

    def go(i: int, acc: tuple) -> Comp:
        if i == len(comps):
            return Ret(list(acc))
        return Bind(comps[i], lambda v, i=i, acc=acc: go(i + 1, acc + (v,)))

    return go(0, ())
