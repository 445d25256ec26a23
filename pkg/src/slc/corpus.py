"""Named example programs exercised by the suites and shipped as files."""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import Term, Type, parse_term, parse_type
from .typecheck import Calculus


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    source: str
    calculi: tuple[Calculus, ...]  # disciplines under which the program checks
    type_source: str
    diverges: bool = False
    evaluates_to: str | None = None

    @property
    def term(self) -> Term:
        return parse_term(self.source)

    @property
    def type(self) -> Type:
        return parse_type(self.type_source)

    @property
    def affine_only(self) -> bool:
        return self.calculi == (Calculus.AFFINE,)


BOTH = (Calculus.LINEAR, Calculus.AFFINE)

_ENTRIES: tuple[CorpusEntry, ...] = (
    CorpusEntry(
        name="diverging-loop",
        source="rec z:!I. force z",
        calculi=BOTH,
        type_source="I",
        diverges=True,
    ),
    CorpusEntry(
        name="discard-divergent-function",
        source="(\\y:(I -o I). *) (\\x:I. rec z:!I. force z)",
        calculi=(Calculus.AFFINE,),
        type_source="I",
        evaluates_to="*",
    ),
    CorpusEntry(
        name="affine-discarder",
        source="\\x:(I -o I). *",
        calculi=(Calculus.AFFINE,),
        type_source="(I -o I) -o I",
        evaluates_to="\\x:(I -o I). *",
    ),
    CorpusEntry(
        name="bang-contraction",
        source="\\x:!I. <force x, force x>",
        calculi=BOTH,
        type_source="!I -o I * I",
        evaluates_to="\\x:!I. <force x, force x>",
    ),
    CorpusEntry(
        name="case-letpair",
        source="let <x, y> = <*, left[I,I] *> in case y of {left a -> a; x | right b -> b; x}",
        calculi=BOTH,
        type_source="I",
        evaluates_to="*",
    ),
    CorpusEntry(
        name="linear-routing",
        source="\\f:(I -o I). \\g:(I -o I). <f *, g *>",
        calculi=BOTH,
        type_source="(I -o I) -o (I -o I) -o I * I",
        evaluates_to="\\f:(I -o I). \\g:(I -o I). <f *, g *>",
    ),
    CorpusEntry(
        name="rec-two-step",
        source=(
            "(rec f:!((I + I) -o (I + I)). \\x:(I + I). "
            "case x of {left a -> force f right[I,I] a | right b -> right[I,I] b}) "
            "(left[I,I] *)"
        ),
        calculi=BOTH,
        type_source="I + I",
        evaluates_to="right[I, I] *",
    ),
    CorpusEntry(
        name="suspended-loop",
        source="lift (rec z:!I. force z)",
        calculi=BOTH,
        type_source="!I",
        evaluates_to="lift (rec z:!I. force z)",
    ),
    CorpusEntry(
        name="loop-after-star",
        source="*; rec z:!I. force z",
        calculi=BOTH,
        type_source="I",
        diverges=True,
    ),
)


def corpus() -> tuple[CorpusEntry, ...]:
    return _ENTRIES


def entry(name: str) -> CorpusEntry:
    for e in _ENTRIES:
        if e.name == name:
            return e
    raise KeyError(name)


def as_source_file(e: CorpusEntry) -> str:
    calc = "affine" if e.affine_only else "linear"
    lines = [f"# {e.name}"]
    if e.diverges:
        lines.append("# diverges")
    elif e.evaluates_to is not None:
        lines.append(f"# evaluates to: {e.evaluates_to}")
    lines.append(f"calculus {calc}")
    lines.append(e.source)
    return "\n".join(lines) + "\n"
