"""Types, terms, contexts, and the concrete syntax.

Type grammar (loosest to tightest): `A -o B` (right assoc), `A + B`,
`A * B` (both right assoc), `!A`, `I`, parentheses.

Term grammar: `\\x:A. m`, `rec z:!A. m` and `let <x,y> = m in n` extend
as far right as possible; `m; n` is right associative; application is
juxtaposition (left associative); `lift`, `force`, `left[A,B]`,
`right[A,B]` are prefix operators taking an atom; atoms are `*`,
variables, `<m, n>`, `case m of {left x -> n | right y -> p}`, and
parenthesised terms.  `#` starts a line comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping

from .errors import ContractViolation, ParseError

# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Type:
    def __str__(self) -> str:
        return format_type(self)


@dataclass(frozen=True)
class Unit(Type):
    """The tensor unit `I`."""


@dataclass(frozen=True)
class Sum(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class Tensor(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class Lolli(Type):
    arg: Type
    result: Type


@dataclass(frozen=True)
class Bang(Type):
    body: Type


UNIT = Unit()


def is_nonlinear(t: Type) -> bool:
    """Whether variables of type `t` may be freely copied and discarded.

    Nonlinear types are generated by `I`, sums and tensors of nonlinear
    types, and `!A` for any `A`; function types are always linear.
    """
    match t:
        case Unit():
            return True
        case Sum(a, b) | Tensor(a, b):
            return is_nonlinear(a) and is_nonlinear(b)
        case Bang(_):
            return True
        case Lolli(_, _):
            return False
    raise TypeError(f"not a type: {t!r}")


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Term:
    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Star(Term):
    """The unit value `*`."""


@dataclass(frozen=True)
class Seq(Term):
    first: Term
    second: Term


@dataclass(frozen=True)
class LeftInj(Term):
    left_type: Type
    right_type: Type
    body: Term


@dataclass(frozen=True)
class RightInj(Term):
    left_type: Type
    right_type: Type
    body: Term


@dataclass(frozen=True)
class Case(Term):
    scrutinee: Term
    left_name: str
    left_body: Term
    right_name: str
    right_body: Term


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term


@dataclass(frozen=True)
class LetPair(Term):
    fst_name: str
    snd_name: str
    pair: Term
    body: Term


@dataclass(frozen=True)
class Lam(Term):
    param: str
    param_type: Type
    body: Term


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Lift(Term):
    body: Term


@dataclass(frozen=True)
class Force(Term):
    body: Term


@dataclass(frozen=True)
class Rec(Term):
    name: str
    bang_type: Type  # annotation of the bound variable, always some !A
    body: Term


STAR = Star()


def is_value(m: Term) -> bool:
    """Whether `m` is in the value grammar.

    Values: variables, `*`, injections and pairs of values, lambdas, and
    `lift m` for an arbitrary body `m`.
    """
    match m:
        case Var(_) | Star() | Lam(_, _, _) | Lift(_):
            return True
        case LeftInj(_, _, b) | RightInj(_, _, b):
            return is_value(b)
        case Pair(a, b):
            return is_value(a) and is_value(b)
        case _:
            return False


def free_vars(m: Term) -> frozenset[str]:
    match m:
        case Var(x):
            return frozenset((x,))
        case Star():
            return frozenset()
        case Seq(a, b) | App(a, b) | Pair(a, b):
            return free_vars(a) | free_vars(b)
        case LeftInj(_, _, b) | RightInj(_, _, b) | Lift(b) | Force(b):
            return free_vars(b)
        case Case(s, x, n, y, p):
            return free_vars(s) | (free_vars(n) - {x}) | (free_vars(p) - {y})
        case LetPair(x, y, pr, b):
            return free_vars(pr) | (free_vars(b) - {x, y})
        case Lam(x, _, b):
            return free_vars(b) - {x}
        case Rec(z, _, b):
            return free_vars(b) - {z}
    raise TypeError(f"not a term: {m!r}")


def fresh_name(base: str, avoid: frozenset[str] | set[str]) -> str:
    """First of base, base', base'', ... not in `avoid`."""
    name = base
    while name in avoid:
        name += "'"
    return name


def subst(m: Term, v: Term, x: str) -> Term:
    """Capture-avoiding substitution of the value `v` for free `x` in `m`."""
    return subst_parallel(m, {x: v})


def subst_parallel(m: Term, mapping: Mapping[str, Term]) -> Term:
    """Simultaneous capture-avoiding substitution of values for variables.

    Every replacement must satisfy `is_value`; substituting a non-value
    is a contract violation.  Binders are renamed when they would
    capture a free variable of a replacement.
    """
    for name, v in mapping.items():
        if not is_value(v):
            raise ContractViolation(f"substituting non-value for {name}: {v}")
    return _subst(m, dict(mapping))


def _subst(m: Term, sub: dict[str, Term]) -> Term:
    if not sub:
        return m
    match m:
        case Var(x):
            return sub.get(x, m)
        case Star():
            return m
        case Seq(a, b):
            return Seq(_subst(a, sub), _subst(b, sub))
        case LeftInj(ta, tb, b):
            return LeftInj(ta, tb, _subst(b, sub))
        case RightInj(ta, tb, b):
            return RightInj(ta, tb, _subst(b, sub))
        case Case(s, x, n, y, p):
            x2, n2 = _subst_under(x, n, sub)
            y2, p2 = _subst_under(y, p, sub)
            return Case(_subst(s, sub), x2, n2, y2, p2)
        case Pair(a, b):
            return Pair(_subst(a, sub), _subst(b, sub))
        case LetPair(x, y, pr, b):
            pr2 = _subst(pr, sub)
            # rename the second binder first: when x == y the inner (second)
            # binding owns all occurrences in the body
            y2, b1 = _subst_under(y, b, sub, extra_avoid={x})
            live = {k: v for k, v in sub.items() if k != y2}
            x2, b2 = _subst_under(x, b1, live, extra_avoid={y2})
            return LetPair(x2, y2, pr2, b2)
        case Lam(x, t, b):
            x2, b2 = _subst_under(x, b, sub)
            return Lam(x2, t, b2)
        case App(f, a):
            return App(_subst(f, sub), _subst(a, sub))
        case Lift(b):
            return Lift(_subst(b, sub))
        case Force(b):
            return Force(_subst(b, sub))
        case Rec(z, t, b):
            z2, b2 = _subst_under(z, b, sub)
            return Rec(z2, t, b2)
    raise TypeError(f"not a term: {m!r}")


def _subst_under(
    binder: str, body: Term, sub: dict[str, Term], extra_avoid: set[str] = frozenset()
) -> tuple[str, Term]:
    live = {k: v for k, v in sub.items() if k != binder}
    if not live:
        return binder, body
    if any(binder in free_vars(v) for v in live.values()):
        avoid = free_vars(body) | set(live) | set(extra_avoid) | {binder}
        for v in live.values():
            avoid |= free_vars(v)
        renamed = fresh_name(binder, avoid)
        body = _subst(body, {binder: Var(renamed)})
        binder = renamed
    return binder, _subst(body, live)


def freshen_binder(
    binder: str, body: Term, avoid: frozenset[str] | set[str]
) -> tuple[str, Term]:
    """Rename `binder` away from `avoid`, rewriting its occurrences in `body`."""
    if binder not in avoid:
        return binder, body
    renamed = fresh_name(binder, set(avoid) | free_vars(body))
    return renamed, _subst(body, {binder: Var(renamed)})


# ---------------------------------------------------------------------------
# Contexts


@dataclass(frozen=True)
class Context:
    """Ordered typing context with distinct variable names."""

    entries: tuple[tuple[str, Type], ...] = ()

    def __post_init__(self):
        names = [n for n, _ in self.entries]
        if len(names) != len(set(names)):
            raise ContractViolation(f"duplicate names in context: {names}")

    @staticmethod
    def of(*entries: tuple[str, Type]) -> "Context":
        return Context(tuple(entries))

    def names(self) -> frozenset[str]:
        return frozenset(n for n, _ in self.entries)

    def lookup(self, name: str) -> Type | None:
        for n, t in self.entries:
            if n == name:
                return t
        return None

    def extend(self, name: str, t: Type) -> "Context":
        return Context(self.entries + ((name, t),))

    def linear_names(self) -> frozenset[str]:
        return frozenset(n for n, t in self.entries if not is_nonlinear(t))

    def is_nonlinear(self) -> bool:
        return all(is_nonlinear(t) for _, t in self.entries)

    def nonlinear_part(self) -> "Context":
        return Context(tuple((n, t) for n, t in self.entries if is_nonlinear(t)))

    def __str__(self) -> str:
        return ", ".join(f"{n}:{format_type(t)}" for n, t in self.entries)


EMPTY_CONTEXT = Context()


# ---------------------------------------------------------------------------
# Lexer

KEYWORDS = frozenset(
    "left right case of let in lift force rec calculus linear affine I".split()
)

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>\#[^\n]*)
      | (?P<op>-o|->|[*;<>,()\[\]{}|\\:.!+=])
      | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # keyword or operator text, 'ident', or 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        lexeme = match.group(0)
        kind = match.lastgroup
        if kind == "op":
            tokens.append(Token(lexeme, lexeme, line, col))
        elif kind == "ident":
            tok_kind = lexeme if lexeme in KEYWORDS else "ident"
            tokens.append(Token(tok_kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = match.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser

_ATOM_STARTERS = frozenset(("*", "ident", "<", "(", "case", "lift", "force", "left", "right"))


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                f"expected {kind!r}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.col,
                expected=(kind,),
            )
        return self.advance()

    def expect_ident(self) -> str:
        return self.expect("ident").text

    # -- types

    def type_(self) -> Type:
        left = self.type_sum()
        if self.at("-o"):
            self.advance()
            return Lolli(left, self.type_())
        return left

    def type_sum(self) -> Type:
        left = self.type_tensor()
        if self.at("+"):
            self.advance()
            return Sum(left, self.type_sum())
        return left

    def type_tensor(self) -> Type:
        left = self.type_atom()
        if self.at("*"):
            self.advance()
            return Tensor(left, self.type_tensor())
        return left

    def type_atom(self) -> Type:
        tok = self.peek()
        if tok.kind == "!":
            self.advance()
            return Bang(self.type_atom())
        if tok.kind == "I":
            self.advance()
            return UNIT
        if tok.kind == "(":
            self.advance()
            t = self.type_()
            self.expect(")")
            return t
        raise ParseError(
            f"expected a type, found {tok.text or 'end of input'!r}",
            tok.line,
            tok.col,
            expected=("!", "I", "("),
        )

    # -- terms

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "\\":
            self.advance()
            name = self.expect_ident()
            self.expect(":")
            t = self.type_()
            self.expect(".")
            return Lam(name, t, self.term())
        if tok.kind == "rec":
            self.advance()
            name = self.expect_ident()
            self.expect(":")
            t = self.type_()
            self.expect(".")
            if not isinstance(t, Bang):
                raise ParseError(
                    "rec annotation must be of shape !A", tok.line, tok.col
                )
            return Rec(name, t, self.term())
        if tok.kind == "let":
            self.advance()
            self.expect("<")
            x = self.expect_ident()
            self.expect(",")
            y = self.expect_ident()
            self.expect(">")
            self.expect("=")
            pair = self.term()
            self.expect("in")
            return LetPair(x, y, pair, self.term())
        left = self.app()
        if self.at(";"):
            self.advance()
            return Seq(left, self.term())
        return left

    def app(self) -> Term:
        result = self.prefix()
        while self.peek().kind in _ATOM_STARTERS:
            result = App(result, self.prefix())
        return result

    def prefix(self) -> Term:
        tok = self.peek()
        if tok.kind == "lift":
            self.advance()
            return Lift(self.prefix())
        if tok.kind == "force":
            self.advance()
            return Force(self.prefix())
        if tok.kind in ("left", "right"):
            self.advance()
            self.expect("[")
            ta = self.type_()
            self.expect(",")
            tb = self.type_()
            self.expect("]")
            body = self.prefix()
            return LeftInj(ta, tb, body) if tok.kind == "left" else RightInj(ta, tb, body)
        return self.atom()

    def atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "*":
            self.advance()
            return STAR
        if tok.kind == "ident":
            return Var(self.advance().text)
        if tok.kind == "<":
            self.advance()
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(">")
            return Pair(a, b)
        if tok.kind == "(":
            self.advance()
            m = self.term()
            self.expect(")")
            return m
        if tok.kind == "case":
            self.advance()
            scrutinee = self.term()
            self.expect("of")
            self.expect("{")
            self.expect("left")
            x = self.expect_ident()
            self.expect("->")
            n = self.term()
            self.expect("|")
            self.expect("right")
            y = self.expect_ident()
            self.expect("->")
            p = self.term()
            self.expect("}")
            return Case(scrutinee, x, n, y, p)
        raise ParseError(
            f"expected a term, found {tok.text or 'end of input'!r}",
            tok.line,
            tok.col,
            expected=tuple(sorted(_ATOM_STARTERS)),
        )


def parse_type(text: str) -> Type:
    parser = _Parser(text)
    t = parser.type_()
    parser.expect("eof")
    return t


def parse_term(text: str) -> Term:
    parser = _Parser(text)
    m = parser.term()
    parser.expect("eof")
    return m


def parse_program(text: str) -> tuple[str | None, Term]:
    """Parse a source file: an optional `calculus linear|affine` pragma,
    then a single term."""
    parser = _Parser(text)
    calculus = None
    if parser.at("calculus"):
        parser.advance()
        tok = parser.peek()
        if tok.kind not in ("linear", "affine"):
            raise ParseError(
                "expected 'linear' or 'affine' after 'calculus'",
                tok.line,
                tok.col,
                expected=("linear", "affine"),
            )
        calculus = parser.advance().kind
    m = parser.term()
    parser.expect("eof")
    return calculus, m


# ---------------------------------------------------------------------------
# Printers
#
# Positions, loosest to tightest: 0 full term, 1 left of `;` / function
# side of application, 2 argument side and prefix operand.  Atoms print
# bare everywhere.


def format_type(t: Type, prec: int = 0) -> str:
    match t:
        case Unit():
            return "I"
        case Lolli(a, b):
            s = f"{format_type(a, 1)} -o {format_type(b, 0)}"
            return f"({s})" if prec > 0 else s
        case Sum(a, b):
            s = f"{format_type(a, 2)} + {format_type(b, 1)}"
            return f"({s})" if prec > 1 else s
        case Tensor(a, b):
            s = f"{format_type(a, 3)} * {format_type(b, 2)}"
            return f"({s})" if prec > 2 else s
        case Bang(a):
            return f"!{format_type(a, 3)}"
    raise TypeError(f"not a type: {t!r}")


def format_term(m: Term, prec: int = 0) -> str:
    match m:
        case Var(x):
            return x
        case Star():
            return "*"
        case Pair(a, b):
            return f"<{format_term(a)}, {format_term(b)}>"
        case Case(s, x, n, y, p):
            return (
                f"case {format_term(s)} of {{left {x} -> {format_term(n)}"
                f" | right {y} -> {format_term(p)}}}"
            )
        case Lam(x, t, b):
            s = f"\\{x}:{format_type(t)}. {format_term(b)}"
            return f"({s})" if prec > 0 else s
        case Rec(z, t, b):
            s = f"rec {z}:{format_type(t)}. {format_term(b)}"
            return f"({s})" if prec > 0 else s
        case LetPair(x, y, pr, b):
            s = f"let <{x}, {y}> = {format_term(pr)} in {format_term(b)}"
            return f"({s})" if prec > 0 else s
        case Seq(a, b):
            s = f"{format_term(a, 1)}; {format_term(b)}"
            return f"({s})" if prec > 0 else s
        case App(f, a):
            s = f"{format_term(f, 1)} {format_term(a, 2)}"
            return f"({s})" if prec > 1 else s
        case Lift(b):
            s = f"lift {format_term(b, 2)}"
            return f"({s})" if prec > 2 else s
        case Force(b):
            s = f"force {format_term(b, 2)}"
            return f"({s})" if prec > 2 else s
        case LeftInj(ta, tb, b):
            s = f"left[{format_type(ta)}, {format_type(tb)}] {format_term(b, 2)}"
            return f"({s})" if prec > 2 else s
        case RightInj(ta, tb, b):
            s = f"right[{format_type(ta)}, {format_type(tb)}] {format_term(b, 2)}"
            return f"({s})" if prec > 2 else s
    raise TypeError(f"not a term: {m!r}")


def term_size(m: Term) -> int:
    """Number of AST nodes, used as a generous fuel bound for values."""
    return 1 + sum(term_size(c) for c in _children(m))


def _children(m: Term) -> Iterator[Term]:
    match m:
        case Var(_) | Star():
            return
        case Seq(a, b) | App(a, b) | Pair(a, b):
            yield a
            yield b
        case LeftInj(_, _, b) | RightInj(_, _, b) | Lift(b) | Force(b):
            yield b
        case Case(s, _, n, _, p):
            yield s
            yield n
            yield p
        case LetPair(_, _, pr, b):
            yield pr
            yield b
        case Lam(_, _, b) | Rec(_, _, b):
            yield b
