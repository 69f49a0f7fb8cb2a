"""Two-sorted formulas, sequents and ultimately periodic sequences.

Formulas come in two sorts: STAR formulas denote languages of finite
words, OMEGA formulas denote languages of infinite words.  The grammar
is enforced at construction time, so every reachable ``Formula`` value
is sort-correct:

    star:   variables, F.F, F\\F, F/F, F|F, F&F, W/W, F*
    omega:  $variables, F.W, F\\W, W|W, W&W, F^w

(F ranges over star formulas, W over omega formulas.)  Note that a
quotient of two omega formulas is itself star-sorted, and that omega
formulas never occur as the left factor of a product.

Antecedents of sequents are one of three shapes: a finite list of star
formulas (kind 1), an infinite ultimately periodic list of star
formulas (kind 2), or a finite list of star formulas followed by a
single trailing omega formula (kind 3).  Kind 1 requires a star
succedent, kinds 2 and 3 an omega succedent.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import cached_property


class Sort(enum.Enum):
    STAR = "star"
    OMEGA = "omega"


class SortError(ValueError):
    """An operator was applied to operands of the wrong sort."""


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Formula:
    """Base class; concrete nodes expose their sort as ``.sort``."""


@dataclass(frozen=True)
class Var(Formula):
    name: str
    sort: Sort = Sort.STAR


@dataclass(frozen=True)
class Prod(Formula):
    left: Formula
    right: Formula

    def __post_init__(self):
        if self.left.sort is not Sort.STAR:
            raise SortError(f"left factor of a product must be star-sorted: {self.left}")

    @cached_property
    def sort(self) -> Sort:
        return self.right.sort


@dataclass(frozen=True)
class Under(Formula):
    """Left residual ``left \\ right``: the left divisor is star-sorted."""

    left: Formula
    right: Formula

    def __post_init__(self):
        if self.left.sort is not Sort.STAR:
            raise SortError(f"left divisor must be star-sorted: {self.left}")

    @cached_property
    def sort(self) -> Sort:
        return self.right.sort


@dataclass(frozen=True)
class Over(Formula):
    """Right residual ``left / right``: operands share a sort, result is star."""

    left: Formula
    right: Formula

    def __post_init__(self):
        if self.left.sort is not self.right.sort:
            raise SortError(f"quotient operands must share a sort: {self.left} / {self.right}")

    @cached_property
    def sort(self) -> Sort:
        return Sort.STAR


@dataclass(frozen=True)
class Join(Formula):
    left: Formula
    right: Formula

    def __post_init__(self):
        if self.left.sort is not self.right.sort:
            raise SortError(f"join operands must share a sort: {self.left} | {self.right}")

    @cached_property
    def sort(self) -> Sort:
        return self.left.sort


@dataclass(frozen=True)
class Meet(Formula):
    left: Formula
    right: Formula

    def __post_init__(self):
        if self.left.sort is not self.right.sort:
            raise SortError(f"meet operands must share a sort: {self.left} & {self.right}")

    @cached_property
    def sort(self) -> Sort:
        return self.left.sort


@dataclass(frozen=True)
class Star(Formula):
    arg: Formula

    def __post_init__(self):
        if self.arg.sort is not Sort.STAR:
            raise SortError(f"* applies to star-sorted formulas only: {self.arg}")

    @cached_property
    def sort(self) -> Sort:
        return Sort.STAR


@dataclass(frozen=True)
class Omega(Formula):
    arg: Formula

    def __post_init__(self):
        if self.arg.sort is not Sort.STAR:
            raise SortError(f"^w applies to star-sorted formulas only: {self.arg}")

    @cached_property
    def sort(self) -> Sort:
        return Sort.OMEGA


def variables(f: Formula) -> frozenset[tuple[str, Sort]]:
    """All variable occurrences of ``f`` as (name, sort) pairs."""
    if isinstance(f, Var):
        return frozenset([(f.name, f.sort)])
    if isinstance(f, (Star, Omega)):
        return variables(f.arg)
    return variables(f.left) | variables(f.right)


# ---------------------------------------------------------------------------
# Ultimately periodic sequences


@dataclass(frozen=True)
class UpSequence:
    """A finite prefix followed by a (possibly absent) repeating period.

    With a nonempty period the sequence is infinite: position i holds
    ``prefix[i]`` for i < len(prefix) and cycles through ``period``
    afterwards.  With an empty period it is just the finite prefix.
    """

    prefix: tuple[Formula, ...] = ()
    period: tuple[Formula, ...] = ()

    def __post_init__(self):
        for f in self.prefix + self.period:
            if f.sort is not Sort.STAR:
                raise SortError(f"sequence items must be star-sorted: {f}")

    @property
    def infinite(self) -> bool:
        return bool(self.period)

    def at(self, i: int) -> Formula:
        if i < len(self.prefix):
            return self.prefix[i]
        if not self.period:
            raise IndexError(f"index {i} out of range for a finite sequence of length {len(self.prefix)}")
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def drop(self, k: int) -> "UpSequence":
        """The sequence starting at position k."""
        if k <= len(self.prefix):
            return UpSequence(self.prefix[k:], self.period)
        if not self.period:
            raise IndexError(f"cannot drop {k} items from a finite sequence of length {len(self.prefix)}")
        off = (k - len(self.prefix)) % len(self.period)
        return UpSequence((), self.period[off:] + self.period[:off])

    def take(self, k: int) -> tuple[Formula, ...]:
        return tuple(self.at(i) for i in range(k))

    def unrolled(self, upto: int) -> "UpSequence":
        """Equal sequence whose prefix covers at least ``upto`` positions."""
        if not self.period or upto <= len(self.prefix):
            return self
        return UpSequence(self.take(upto), self.drop(upto).period)


def up_index(s: UpSequence, i: int) -> Formula:
    """Positional access; errors past the end of a finite sequence."""
    return s.at(i)


def _primitive_root(block: tuple) -> tuple:
    n = len(block)
    for d in range(1, n + 1):
        if n % d == 0 and all(block[i] == block[i % d] for i in range(n)):
            return block[:d]
    return block


def normalize_up(s: UpSequence) -> UpSequence:
    """Canonical form: primitive period, shortest prefix, same content."""
    if not s.period:
        return s
    period = _primitive_root(s.period)
    prefix = s.prefix
    while prefix and prefix[-1] == period[-1]:
        prefix = prefix[:-1]
        period = period[-1:] + period[:-1]
    return UpSequence(prefix, period)


# ---------------------------------------------------------------------------
# Lasso words: finitely presented infinite words u . v^w


@dataclass(frozen=True)
class LassoWord:
    """The infinite word ``u . v^w`` over single-variable letters."""

    u: tuple[str, ...]
    v: tuple[str, ...]

    def __post_init__(self):
        if not self.v:
            raise ValueError("lasso period must be nonempty")

    def letter(self, i: int) -> str:
        if i < len(self.u):
            return self.u[i]
        return self.v[(i - len(self.u)) % len(self.v)]

    def drop(self, k: int) -> "LassoWord":
        if k <= len(self.u):
            return LassoWord(self.u[k:], self.v)
        off = (k - len(self.u)) % len(self.v)
        return LassoWord((), self.v[off:] + self.v[:off])

    def take(self, k: int) -> tuple[str, ...]:
        return tuple(self.letter(i) for i in range(k))

    def normalized(self) -> "LassoWord":
        v = _primitive_root(self.v)
        u = self.u
        while u and u[-1] == v[-1]:
            u = u[:-1]
            v = v[-1:] + v[:-1]
        return LassoWord(u, v)

    def letters(self) -> frozenset[str]:
        return frozenset(self.u) | frozenset(self.v)

    def to_sequence(self) -> UpSequence:
        return UpSequence(tuple(Var(c) for c in self.u), tuple(Var(c) for c in self.v))

    def __str__(self) -> str:
        sep = "" if all(len(c) == 1 for c in self.u + self.v) else " "
        return f"{sep.join(self.u)}({sep.join(self.v)})^w"


# ---------------------------------------------------------------------------
# Sequents


@dataclass(frozen=True)
class Sequent:
    """An antecedent of one of the three shapes plus a succedent.

    kind 1: ``ante`` finite (empty period), no ``tail``, star succedent.
    kind 2: ``ante`` infinite, no ``tail``, omega succedent.
    kind 3: ``ante`` finite, omega ``tail``, omega succedent.
    """

    ante: UpSequence
    tail: Formula | None
    succ: Formula

    def __post_init__(self):
        if self.tail is not None:
            if self.ante.infinite:
                raise SortError("a trailing omega formula cannot follow an infinite sequence")
            if self.tail.sort is not Sort.OMEGA:
                raise SortError(f"trailing antecedent formula must be omega-sorted: {self.tail}")
        expected = Sort.STAR if (not self.ante.infinite and self.tail is None) else Sort.OMEGA
        if self.succ.sort is not expected:
            raise SortError(
                f"kind-{self.kind} antecedent requires a {expected.value}-sorted succedent, got {self.succ}"
            )

    @property
    def kind(self) -> int:
        if self.ante.infinite:
            return 2
        return 3 if self.tail is not None else 1

    @property
    def finite_len(self) -> int:
        """Number of directly addressable positions (prefix plus tail)."""
        return len(self.ante.prefix) + (1 if self.tail is not None else 0)

    def at(self, i: int) -> Formula:
        """Formula at position i; unrolls into the period of kind-2 sequents."""
        if self.tail is not None and i == len(self.ante.prefix):
            return self.tail
        return self.ante.at(i)

    def replace_at(self, i: int, items: tuple[Formula, ...], new_tail: Formula | None = None) -> "Sequent":
        """Rewrite position i to ``items`` (star) plus an optional new tail."""
        if self.tail is not None and i == len(self.ante.prefix):
            return Sequent(UpSequence(self.ante.prefix + items, ()), new_tail, self.succ)
        ante = self.ante.unrolled(i + 1)
        if new_tail is not None and (ante.period or self.tail is not None):
            raise SortError("cannot introduce a tail before existing infinite content")
        prefix = ante.prefix[:i] + items + ante.prefix[i + 1 :]
        return Sequent(UpSequence(prefix, ante.period), self.tail if new_tail is None else new_tail, self.succ)

    def normalized(self) -> "Sequent":
        return Sequent(normalize_up(self.ante), self.tail, self.succ)


def seq1(items, succ: Formula) -> Sequent:
    return Sequent(UpSequence(tuple(items), ()), None, succ)


def seq2(prefix, period, succ: Formula) -> Sequent:
    return Sequent(UpSequence(tuple(prefix), tuple(period)), None, succ)


def seq3(items, tail: Formula, succ: Formula) -> Sequent:
    return Sequent(UpSequence(tuple(items), ()), tail, succ)


def sequent_variables(s: Sequent) -> frozenset[tuple[str, Sort]]:
    out = variables(s.succ)
    for f in s.ante.prefix + s.ante.period:
        out |= variables(f)
    if s.tail is not None:
        out |= variables(s.tail)
    return out


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<WS>\s+)
  | (?P<TURNSTILE>\|-|=>)
  | (?P<OMEGAVAR>\$[A-Za-z_][A-Za-z0-9_]*)
  | (?P<NAME>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<OMEGA>\^w)
  | (?P<STAR>\*)
  | (?P<DOT>\.)
  | (?P<UNDER>\\)
  | (?P<OVER>/)
  | (?P<MEET>&)
  | (?P<JOIN>\|)
  | (?P<LPAR>\()
  | (?P<RPAR>\))
  | (?P<LBRACE>\{)
  | (?P<RBRACE>\})
  | (?P<COMMA>,)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "WS":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("EOF", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent over the token stream.

    Precedence, loosest first: ``|``, ``&``, ``.``, residuals, postfix.
    ``|`` ``&`` ``.`` associate to the right; ``/`` chains fold to the
    left and ``\\`` chains to the right; a chain mixing the two residuals
    requires parentheses.
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1] or 'end of input'!r}", tok[2])
        return self.next()

    def formula(self) -> Formula:
        return self.join()

    def join(self) -> Formula:
        return self._fold_right("JOIN", Join, self.meet)

    def meet(self) -> Formula:
        return self._fold_right("MEET", Meet, self.prod)

    def prod(self) -> Formula:
        return self._fold_right("DOT", Prod, self.resid)

    def _fold_right(self, token: str, ctor, sub) -> Formula:
        parts = [sub()]
        positions = []
        while self.peek() == token:
            positions.append(self.next()[2])
            parts.append(sub())
        out = parts[-1]
        for part, pos in zip(reversed(parts[:-1]), reversed(positions)):
            out = self._mk(ctor, part, out, pos)
        return out

    def resid(self) -> Formula:
        first = self.postfix()
        chain: list[tuple[str, Formula, int]] = []
        while self.peek() in ("OVER", "UNDER"):
            kind, _, pos = self.next()
            chain.append((kind, self.postfix(), pos))
        if not chain:
            return first
        kinds = {k for k, _, _ in chain}
        if len(kinds) > 1:
            raise ParseError("mixed \\ and / chain needs parentheses", chain[1][2])
        if kinds == {"OVER"}:
            out = first
            for _, operand, pos in chain:
                out = self._mk(Over, out, operand, pos)
            return out
        operands = [first] + [f for _, f, _ in chain]
        out = operands[-1]
        for operand, (_, _, pos) in zip(reversed(operands[:-1]), reversed(chain)):
            out = self._mk(Under, operand, out, pos)
        return out

    def postfix(self) -> Formula:
        f = self.atom()
        while self.peek() in ("STAR", "OMEGA"):
            kind, _, pos = self.next()
            ctor = Star if kind == "STAR" else Omega
            try:
                f = ctor(f)
            except SortError as e:
                raise ParseError(str(e), pos) from None
        return f

    def atom(self) -> Formula:
        kind, value, pos = self.next()
        if kind == "NAME":
            return Var(value)
        if kind == "OMEGAVAR":
            return Var(value[1:], Sort.OMEGA)
        if kind == "LPAR":
            f = self.formula()
            self.expect("RPAR")
            return f
        raise ParseError(f"expected a formula, found {value or 'end of input'!r}", pos)

    @staticmethod
    def _mk(ctor, left: Formula, right: Formula, pos: int) -> Formula:
        try:
            return ctor(left, right)
        except SortError as e:
            raise ParseError(str(e), pos) from None

    def sequent(self) -> Sequent:
        items: list[Formula] = []
        period: list[Formula] = []
        has_period = False
        if self.peek() not in ("TURNSTILE",):
            while True:
                if self.peek() == "LBRACE":
                    brace_pos = self.next()[2]
                    if has_period:
                        raise ParseError("only one {...} period is allowed", brace_pos)
                    has_period = True
                    period.append(self.formula())
                    while self.peek() == "COMMA":
                        self.next()
                        period.append(self.formula())
                    self.expect("RBRACE")
                    break
                items.append(self.formula())
                if self.peek() == "COMMA":
                    self.next()
                    continue
                break
        tok = self.expect("TURNSTILE")
        succ = self.formula()
        self.expect("EOF")
        try:
            if has_period:
                return seq2(items, period, succ)
            if items and items[-1].sort is Sort.OMEGA:
                return seq3(items[:-1], items[-1], succ)
            return seq1(items, succ)
        except SortError as e:
            raise ParseError(str(e), tok[2]) from None


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.expect("EOF")
    return f


def parse_sequent(text: str) -> Sequent:
    return _Parser(text).sequent()


# ---------------------------------------------------------------------------
# Printer

_LEVEL_JOIN = 10
_LEVEL_MEET = 20
_LEVEL_PROD = 30
_LEVEL_RESID = 40
_LEVEL_POSTFIX = 50


def _level(f: Formula) -> int:
    if isinstance(f, Var):
        return 60
    if isinstance(f, (Star, Omega)):
        return _LEVEL_POSTFIX
    if isinstance(f, Prod):
        return _LEVEL_PROD
    if isinstance(f, (Over, Under)):
        return _LEVEL_RESID
    if isinstance(f, Meet):
        return _LEVEL_MEET
    return _LEVEL_JOIN


def _wrap(f: Formula, text: str, min_level: int) -> str:
    return f"({text})" if _level(f) < min_level else text


def print_formula(f: Formula) -> str:
    if isinstance(f, Var):
        return f.name if f.sort is Sort.STAR else f"${f.name}"
    if isinstance(f, Star):
        return _wrap(f.arg, print_formula(f.arg), _LEVEL_POSTFIX) + "*"
    if isinstance(f, Omega):
        return _wrap(f.arg, print_formula(f.arg), _LEVEL_POSTFIX) + "^w"
    if isinstance(f, Prod):
        left = _wrap(f.left, print_formula(f.left), _LEVEL_PROD + 1)
        right = _wrap(f.right, print_formula(f.right), _LEVEL_PROD)
        return f"{left} . {right}"
    if isinstance(f, Over):
        ltext = print_formula(f.left)
        left = ltext if isinstance(f.left, Over) else _wrap(f.left, ltext, _LEVEL_RESID + 1)
        right = _wrap(f.right, print_formula(f.right), _LEVEL_RESID + 1)
        return f"{left} / {right}"
    if isinstance(f, Under):
        left = _wrap(f.left, print_formula(f.left), _LEVEL_RESID + 1)
        rtext = print_formula(f.right)
        right = rtext if isinstance(f.right, Under) else _wrap(f.right, rtext, _LEVEL_RESID + 1)
        return f"{left} \\ {right}"
    if isinstance(f, Meet):
        left = _wrap(f.left, print_formula(f.left), _LEVEL_MEET + 1)
        right = _wrap(f.right, print_formula(f.right), _LEVEL_MEET)
        return f"{left} & {right}"
    if isinstance(f, Join):
        left = _wrap(f.left, print_formula(f.left), _LEVEL_JOIN + 1)
        right = _wrap(f.right, print_formula(f.right), _LEVEL_JOIN)
        return f"{left} | {right}"
    raise TypeError(f"not a formula: {f!r}")


def print_sequent(s: Sequent) -> str:
    parts = [print_formula(f) for f in s.ante.prefix]
    if s.ante.period:
        parts.append("{" + ", ".join(print_formula(f) for f in s.ante.period) + "}")
    if s.tail is not None:
        parts.append(print_formula(s.tail))
    lhs = ", ".join(parts)
    return f"{lhs} |- {print_formula(s.succ)}" if lhs else f"|- {print_formula(s.succ)}"
