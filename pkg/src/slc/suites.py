"""Property suites: the package's theorems run as randomized test batteries.

Each suite is deterministic given its configuration, returns a
structured report whose failures are replayable from (seed, config)
alone, and exercises one semantic guarantee:

- subject-reduction: evaluation preserves types.
- soundness: evaluation and standard denotation never observably
  disagree on a converging program.
- adequacy: at the unit type, convergence of evaluation and of the
  standard denotation coincide (one direction checked on generated
  programs, both on the known-divergent corpus entries).
- comonoid-laws: copy/discard at every shareable type satisfy the
  counit, coassociativity, and cocommutativity laws.
- substructural-naturality: shareable-value denotations commute with
  discard, copy, and promotion; affine values are always discardable.
- coherence: term-level and value-level denotations of values agree.
- inclusion: linearly-typed terms are affinely typed at the same type.
- degeneracy: the strict function-space backend agrees with the
  standard one on linearly-typed programs but violates soundness on the
  canonical affine witness.
- monotonicity: evaluation outcomes persist under added fuel and
  re-runs reproduce them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable

from .corpus import corpus
from .denote_naive import JudgedBottom, degeneracy_report, denote_naive, judge_bottom
from .denote_standard import denote, denote_value, denote_value_shared
from .domains import (
    Bind,
    Differ,
    NOT_YET,
    Ret,
    SPair,
    SThunk,
    SUNIT,
    SUnit,
    Unknown,
    _mix,
    box,
    copy,
    discard,
    gen_sem_val,
    render_semval,
    sem_equal,
)
from .evaluator import Converged, evaluate
from .generate import GenConfig, gen_program, gen_typed_term, gen_value, _gen_with_coverage
from .syntax import (
    Bang,
    Context,
    EMPTY_CONTEXT,
    Lolli,
    Sum,
    Tensor,
    Type,
    UNIT,
    format_term,
    format_type,
    is_nonlinear,
    parse_type,
)
from .typecheck import Calculus, TypeCheckError, typecheck

SCHEMA_VERSION = 1
DIVERGENCE_BOUND = 10**6
COMONOID_PALETTE: tuple[Type, ...] = (
    UNIT,
    parse_type("I + I"),
    parse_type("!I"),
    parse_type("!(I -o I)"),
)

SUITE_NAMES = (
    "subject-reduction",
    "soundness",
    "adequacy",
    "comonoid-laws",
    "substructural-naturality",
    "coherence",
    "inclusion",
    "degeneracy",
    "monotonicity",
)


@dataclass
class TestReport:
    suite: str
    cases: int = 0
    failures: list = field(default_factory=list)
    unknowns: list = field(default_factory=list)
    wall_time_s: float = 0.0
    config: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, **kw) -> None:
        self.failures.append(kw)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "cases": self.cases,
            "failures": self.failures,
            "unknowns": self.unknowns,
            "ok": self.ok,
            "wall_time_s": round(self.wall_time_s, 3),
            "config": self.config,
            "extra": self.extra,
        }


def _cfg_dict(cfg: GenConfig) -> dict:
    return {
        "calculus": cfg.calculus.value,
        "max_depth": cfg.max_depth,
        "palette": [format_type(t) for t in cfg.palette],
        "seed": cfg.seed,
        "count": cfg.count,
        "fuel": cfg.fuel,
        "probe_budget": cfg.probe_budget,
    }


def run_suite(name: str, cfg: GenConfig) -> TestReport:
    try:
        runner = _SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    start = time.monotonic()
    report = runner(cfg)
    report.wall_time_s = time.monotonic() - start
    report.config = _cfg_dict(cfg)
    return report


# ---------------------------------------------------------------------------
# operational suites


def _both_calculi(cfg: GenConfig):
    for calc in (Calculus.LINEAR, Calculus.AFFINE):
        yield replace(cfg, calculus=calc)


def suite_subject_reduction(cfg: GenConfig) -> TestReport:
    report = TestReport("subject-reduction")
    converged = 0
    for sub in _both_calculi(cfg):
        for i in range(sub.count):
            case = replace(sub, seed=sub.seed + i)
            term, ty = gen_typed_term(case)
            report.cases += 1
            outcome = evaluate(term, case.fuel)
            if not isinstance(outcome, Converged):
                continue
            converged += 1
            try:
                got, _ = typecheck(sub.calculus, EMPTY_CONTEXT, outcome.value)
            except TypeCheckError as exc:
                report.fail(seed=case.seed, calculus=sub.calculus.value,
                            term=format_term(term), detail=str(exc))
                continue
            if got != ty:
                report.fail(
                    seed=case.seed,
                    calculus=sub.calculus.value,
                    term=format_term(term),
                    detail=f"type changed: {format_type(ty)} -> {format_type(got)}",
                )
    report.extra["converged"] = converged
    return report


def suite_soundness(cfg: GenConfig) -> TestReport:
    report = TestReport("soundness")
    for sub in _both_calculi(cfg):
        for i in range(sub.count):
            case = replace(sub, seed=sub.seed + i)
            term, ty = gen_typed_term(case)
            report.cases += 1
            outcome = evaluate(term, case.fuel)
            if not isinstance(outcome, Converged):
                continue
            d_term = denote(sub.calculus, EMPTY_CONTEXT, term, ty)
            d_value = denote(sub.calculus, EMPTY_CONTEXT, outcome.value, ty)
            verdict = sem_equal(
                ty, d_term.fun({}), d_value.fun({}), case.fuel, case.probe_budget
            )
            if isinstance(verdict, Differ):
                report.fail(
                    seed=case.seed,
                    calculus=sub.calculus.value,
                    term=format_term(term),
                    detail=f"denotations differ at {verdict.path}: {verdict.detail}",
                )
            elif isinstance(verdict, Unknown):
                report.unknowns.append(
                    {"seed": case.seed, "term": format_term(term), "fuel": verdict.fuel}
                )
    return report


def suite_adequacy(cfg: GenConfig) -> TestReport:
    report = TestReport("adequacy")
    skipped = 0

    def check_program_adequacy(calc, term, seed, known_divergent):
        nonlocal skipped
        report.cases += 1
        outcome = evaluate(term, cfg.fuel)
        d = denote(calc, EMPTY_CONTEXT, term, UNIT)
        if isinstance(outcome, Converged):
            sem = d.fun({}).run(DIVERGENCE_BOUND)
            if sem is NOT_YET:
                report.fail(seed=seed, calculus=calc.value, term=format_term(term),
                            detail=f"evaluates but denotation bottom up to {DIVERGENCE_BOUND}")
            elif not isinstance(sem, SUnit):
                report.fail(seed=seed, calculus=calc.value, term=format_term(term),
                            detail=f"denotation converged to {render_semval(sem)}, not *")
        elif known_divergent:
            if d.fun({}).run(DIVERGENCE_BOUND) is not NOT_YET:
                report.fail(seed=seed, calculus=calc.value, term=format_term(term),
                            detail="known-divergent program has a converging denotation")
        else:
            skipped += 1  # not converged within fuel and divergence unknown

    for e in corpus():
        if e.type != UNIT:
            continue
        for calc in e.calculi:
            check_program_adequacy(calc, e.term, e.name, e.diverges)

    for sub in _both_calculi(cfg):
        for i in range(sub.count):
            case = replace(sub, seed=sub.seed + i)
            term = gen_program(case, UNIT)
            check_program_adequacy(sub.calculus, term, case.seed, False)

    report.extra["unresolved_divergence"] = skipped
    return report


def suite_monotonicity(cfg: GenConfig) -> TestReport:
    report = TestReport("monotonicity")
    lo_fuel = cfg.fuel
    hi_fuel = 2 * cfg.fuel + 17
    for sub in _both_calculi(cfg):
        for i in range(sub.count // 2):
            case = replace(sub, seed=sub.seed + i)
            term, _ = gen_typed_term(case)
            report.cases += 1
            lo = evaluate(term, lo_fuel)
            if isinstance(lo, Converged):
                hi = evaluate(term, hi_fuel)
                if hi != lo:
                    report.fail(seed=case.seed, calculus=sub.calculus.value,
                                term=format_term(term),
                                detail=f"outcome changed between fuel {lo_fuel} and {hi_fuel}")
            if evaluate(term, lo_fuel) != lo:
                report.fail(seed=case.seed, calculus=sub.calculus.value,
                            term=format_term(term), detail="rerun differed")
    return report


# ---------------------------------------------------------------------------
# denotational suites


def _structural_types(depth: int) -> list[Type]:
    if depth <= 1:
        return [UNIT]
    smaller = _structural_types(depth - 1)
    out = dict.fromkeys(smaller)
    for a in smaller:
        out.setdefault(Bang(a))
    for a in smaller:
        for b in smaller:
            out.setdefault(Sum(a, b))
            out.setdefault(Tensor(a, b))
            out.setdefault(Lolli(a, b))
    return list(out)


def _enumerate_types(palette: tuple[Type, ...], depth: int) -> list[Type]:
    """Every type of structural depth <= `depth`, palette entries first."""
    out = dict.fromkeys(palette)
    for t in _structural_types(depth):
        out.setdefault(t)
    return list(out)


def _cmp_vals(ty: Type, a, b, fuel: int, probes: int):
    return sem_equal(ty, Ret(a), Ret(b), fuel, probes)


def suite_comonoid_laws(cfg: GenConfig) -> TestReport:
    report = TestReport("comonoid-laws")
    types = [t for t in _enumerate_types(COMONOID_PALETTE, 3) if is_nonlinear(t)]
    points = max(cfg.count, 1)
    fuel = cfg.fuel
    probes = cfg.probe_budget
    unknown_count = 0
    for t_index, ty in enumerate(types):
        for point in range(points):
            v = gen_sem_val(ty, _mix("comonoid", cfg.seed, t_index, point), 3)
            report.cases += 1
            first = copy(ty, v)
            checks = [
                ("counit-left", ty, first.snd, v),
                ("counit-right", ty, first.fst, v),
            ]
            again = copy(ty, v)
            left_assoc = (copy(ty, first.fst), first.snd)  # ((a,a'),b)
            right_assoc = (again.fst, copy(ty, again.snd))  # (a,(b,b'))
            checks.extend(
                [
                    ("coassoc-0", ty, left_assoc[0].fst, right_assoc[0]),
                    ("coassoc-1", ty, left_assoc[0].snd, right_assoc[1].fst),
                    ("coassoc-2", ty, left_assoc[1], right_assoc[1].snd),
                    ("cocommute-0", ty, first.snd, again.fst),
                    ("cocommute-1", ty, first.fst, again.snd),
                ]
            )
            for law, law_ty, x, y in checks:
                verdict = _cmp_vals(law_ty, x, y, fuel, probes)
                if isinstance(verdict, Differ):
                    report.fail(
                        type=format_type(ty),
                        law=law,
                        point=point,
                        detail=f"{verdict.path}: {verdict.detail}",
                    )
                elif isinstance(verdict, Unknown):
                    unknown_count += 1
    report.extra["types"] = len(types)
    report.extra["unknown_comparisons"] = unknown_count
    return report


def _gen_shared_value_case(cfg: GenConfig, seed: int):
    """A shareable open value with its context, or None on a dead end."""
    import random as _random

    rng = _random.Random(f"shared-case:{seed}")
    nonlinear_palette = [t for t in COMONOID_PALETTE if is_nonlinear(t)]
    entries = tuple(
        (f"e{j}", rng.choice(nonlinear_palette)) for j in range(rng.randrange(3))
    )
    goal = rng.choice(nonlinear_palette)
    try:
        v = gen_value(replace(cfg, seed=seed), entries, goal)
    except Exception:
        return None
    return entries, goal, v


def _gen_env(entries, seed: int) -> dict:
    return {
        name: gen_sem_val(ty, _mix("env", seed, i), 3)
        for i, (name, ty) in enumerate(entries)
    }


def suite_substructural_naturality(cfg: GenConfig) -> TestReport:
    report = TestReport("substructural-naturality")
    fuel, probes = cfg.fuel, cfg.probe_budget
    unknown_count = 0

    produced = 0
    seed = cfg.seed
    while produced < cfg.count:
        seed += 1
        case = _gen_shared_value_case(cfg, seed)
        if case is None:
            continue
        entries, goal, v = case
        produced += 1
        report.cases += 1
        ctx = Context.of(*entries)
        env = _gen_env(entries, seed)
        vden = denote_value_shared(cfg.calculus, ctx, v, goal)
        w = vden.fun(env)

        # discarding commutes: both routes end at the unit point
        if discard(goal, w) is not SUNIT or discard(ctx, env) is not SUNIT:
            report.fail(seed=seed, term=format_term(v), detail="discard mismatch")
            continue

        # copying commutes: share the image vs image the shared environment
        lhs = copy(goal, w)
        rhs = SPair(vden.fun(env), vden.fun(env))
        verdict = _cmp_vals(Tensor(goal, goal), lhs, rhs, fuel, probes)
        if isinstance(verdict, Differ):
            report.fail(seed=seed, term=format_term(v), law="copy",
                        detail=f"{verdict.path}: {verdict.detail}")
        elif isinstance(verdict, Unknown):
            unknown_count += 1

        # promotion commutes: box the image vs map over the boxed environment
        lhs_box = box(goal, w)
        boxed_env = box(ctx, env)
        rhs_box = SThunk(Bind(boxed_env.comp, lambda e: Ret(vden.fun(e))))
        verdict = _cmp_vals(Bang(goal), lhs_box, rhs_box, fuel, probes)
        if isinstance(verdict, Differ):
            report.fail(seed=seed, term=format_term(v), law="box",
                        detail=f"{verdict.path}: {verdict.detail}")
        elif isinstance(verdict, Unknown):
            unknown_count += 1

    # affine discardability at arbitrary types, value denotations total
    import random as _random

    affine_cfg = replace(cfg, calculus=Calculus.AFFINE)
    produced = 0
    seed = _mix("affine-discard", cfg.seed)
    while produced < cfg.count:
        seed += 1
        rng = _random.Random(f"affine-case:{seed}")
        entries = tuple(
            (f"e{j}", rng.choice(cfg.palette)) for j in range(rng.randrange(3))
        )
        goal = rng.choice(cfg.palette)
        try:
            v = gen_value(replace(affine_cfg, seed=seed), entries, goal)
        except Exception:
            continue
        produced += 1
        report.cases += 1
        env = _gen_env(entries, seed)
        w = denote_value(Calculus.AFFINE, Context.of(*entries), v, goal).fun(env)
        if discard(goal, w, affine=True) is not SUNIT:
            report.fail(seed=seed, term=format_term(v), detail="affine discard failed")

    report.extra["unknown_comparisons"] = unknown_count
    return report


def suite_coherence(cfg: GenConfig) -> TestReport:
    report = TestReport("coherence")
    import random as _random

    fuel, probes = cfg.fuel, cfg.probe_budget
    unknown_count = 0
    shared_checked = 0
    produced = 0
    seed = cfg.seed
    while produced < cfg.count:
        seed += 1
        calc = Calculus.LINEAR if produced % 2 == 0 else Calculus.AFFINE
        rng = _random.Random(f"coherence-case:{seed}")
        nonlinear_palette = [t for t in cfg.palette if is_nonlinear(t)]
        entries = tuple(
            (f"e{j}", rng.choice(nonlinear_palette)) for j in range(rng.randrange(3))
        )
        goal = rng.choice(cfg.palette)
        try:
            v = gen_value(replace(cfg, calculus=calc, seed=seed), entries, goal)
        except Exception:
            continue
        produced += 1
        report.cases += 1
        ctx = Context.of(*entries)
        env = _gen_env(entries, seed)
        d_term = denote(calc, ctx, v, goal)
        d_val = denote_value(calc, ctx, v, goal)
        verdict = sem_equal(goal, d_term.fun(env), Ret(d_val.fun(env)), fuel, probes)
        if isinstance(verdict, Differ):
            report.fail(seed=seed, calculus=calc.value, term=format_term(v),
                        detail=f"value-level: {verdict.path}: {verdict.detail}")
        elif isinstance(verdict, Unknown):
            unknown_count += 1
        if is_nonlinear(goal):
            shared_checked += 1
            d_shared = denote_value_shared(calc, ctx, v, goal)
            verdict = sem_equal(
                goal, d_term.fun(env), Ret(d_shared.fun(env)), fuel, probes
            )
            if isinstance(verdict, Differ):
                report.fail(seed=seed, calculus=calc.value, term=format_term(v),
                            detail=f"shared-level: {verdict.path}: {verdict.detail}")
            elif isinstance(verdict, Unknown):
                unknown_count += 1
    report.extra["unknown_comparisons"] = unknown_count
    report.extra["shared_layer_checked"] = shared_checked
    return report


def suite_inclusion(cfg: GenConfig) -> TestReport:
    report = TestReport("inclusion")
    sub = replace(cfg, calculus=Calculus.LINEAR)
    for i in range(sub.count):
        case = replace(sub, seed=sub.seed + i)
        term, ty = gen_typed_term(case)
        report.cases += 1
        try:
            got, _ = typecheck(Calculus.AFFINE, EMPTY_CONTEXT, term)
        except TypeCheckError as exc:
            report.fail(seed=case.seed, term=format_term(term),
                        detail=f"affine rejection: {exc}")
            continue
        if got != ty:
            report.fail(seed=case.seed, term=format_term(term),
                        detail=f"type changed: {format_type(ty)} -> {format_type(got)}")
    return report


def suite_degeneracy(cfg: GenConfig) -> TestReport:
    report = TestReport("degeneracy")
    deg = degeneracy_report(bottom_bound=DIVERGENCE_BOUND, fuel=cfg.fuel)
    report.extra["witness"] = deg.to_dict()
    report.cases += 1
    if not deg.expected_shape:
        report.fail(detail="canonical witness did not show the expected shape",
                    report=deg.to_dict())

    # on linearly-typed programs the two backends never observably differ
    sub = replace(cfg, calculus=Calculus.LINEAR)
    unknown_count = 0
    for i in range(sub.count):
        case = replace(sub, seed=sub.seed + i)
        term, ty = gen_typed_term(case)
        report.cases += 1
        d_std = denote(Calculus.LINEAR, EMPTY_CONTEXT, term, ty)
        d_naive = denote_naive(
            Calculus.LINEAR, EMPTY_CONTEXT, term, ty, bottom_bound=case.fuel
        )
        verdict = sem_equal(
            ty, d_std.fun({}), d_naive.fun({}), case.fuel, case.probe_budget
        )
        if isinstance(verdict, Differ):
            report.fail(seed=case.seed, term=format_term(term),
                        detail=f"backends differ at {verdict.path}: {verdict.detail}")
        elif isinstance(verdict, Unknown):
            unknown_count += 1
    report.extra["unknown_comparisons"] = unknown_count
    return report


_SUITES: dict[str, Callable[[GenConfig], TestReport]] = {
    "subject-reduction": suite_subject_reduction,
    "soundness": suite_soundness,
    "adequacy": suite_adequacy,
    "comonoid-laws": suite_comonoid_laws,
    "substructural-naturality": suite_substructural_naturality,
    "coherence": suite_coherence,
    "inclusion": suite_inclusion,
    "degeneracy": suite_degeneracy,
    "monotonicity": suite_monotonicity,
}

#: per-suite default case counts; criteria-scale budgets
DEFAULT_COUNTS = {
    "subject-reduction": 1000,
    "soundness": 1000,
    "adequacy": 500,
    "comonoid-laws": 100,
    "substructural-naturality": 500,
    "coherence": 500,
    "inclusion": 1000,
    "degeneracy": 1000,
    "monotonicity": 1000,
}


def default_config(suite: str, **overrides) -> GenConfig:
    cfg = GenConfig(count=DEFAULT_COUNTS.get(suite, 1000))
    return replace(cfg, **overrides) if overrides else cfg


# ---------------------------------------------------------------------------
# corpus report (golden-tested)


def corpus_report(fuel: int = 10**4) -> dict:
    """Deterministic description of every corpus program."""
    entries = []
    for e in corpus():
        item: dict = {"name": e.name, "source": e.source, "type": e.type_source}
        verdicts = {}
        for calc in (Calculus.LINEAR, Calculus.AFFINE):
            try:
                ty, _ = typecheck(calc, EMPTY_CONTEXT, e.term)
                verdicts[calc.value] = format_type(ty)
            except TypeCheckError as exc:
                verdicts[calc.value] = f"rejected: {exc.kind.value}"
        item["typecheck"] = verdicts
        outcome = evaluate(e.term, fuel)
        item["eval"] = (
            format_term(outcome.value) if isinstance(outcome, Converged) else "OUT_OF_FUEL"
        )
        calc = e.calculi[0] if e.affine_only else Calculus.LINEAR
        sem = denote(calc, EMPTY_CONTEXT, e.term).fun({}).run(fuel)
        item["denotation"] = "BOTTOM" if sem is NOT_YET else render_semval(sem)
        item["diverges"] = e.diverges
        entries.append(item)
    return {"schema_version": SCHEMA_VERSION, "fuel": fuel, "entries": entries}
