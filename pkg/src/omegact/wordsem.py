"""Derivative-based word membership for the regex fragment.

This is the syntactic route to language membership: expressions over
{variables, ``.``, ``|``, ``*``, ``^w``} are rewritten by letter
derivatives, with joins kept in a set normal form so the reachable
derivative space is finite and walks along ultimately periodic words can
be cut off as soon as a (position class, derivative) pair repeats.
It shares no machinery with the automata engines and serves as their
cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .syntax import Formula, Join, LassoWord, Omega, Prod, Sort, Star, Var


def is_omega_regex(f: Formula) -> bool:
    """True if ``f`` uses only variables, products, joins, star and omega."""
    if isinstance(f, Var):
        return f.sort is Sort.STAR
    if isinstance(f, (Prod, Join)):
        return is_omega_regex(f.left) and is_omega_regex(f.right)
    if isinstance(f, (Star, Omega)):
        return is_omega_regex(f.arg)
    return False


# ---------------------------------------------------------------------------
# Canonical expressions: alternation is a set, concatenation a flat tuple.


@dataclass(frozen=True)
class _Re:
    pass


@dataclass(frozen=True)
class _Empty(_Re):
    pass


@dataclass(frozen=True)
class _Eps(_Re):
    pass


@dataclass(frozen=True)
class _Chr(_Re):
    letter: str


@dataclass(frozen=True)
class _Cat(_Re):
    items: tuple[_Re, ...]


@dataclass(frozen=True)
class _Alt(_Re):
    items: frozenset[_Re]


@dataclass(frozen=True)
class _St(_Re):
    arg: _Re


EMPTY = _Empty()
EPS = _Eps()


def _cat(items) -> _Re:
    flat: list[_Re] = []
    for it in items:
        if isinstance(it, _Empty):
            return EMPTY
        if isinstance(it, _Eps):
            continue
        if isinstance(it, _Cat):
            flat.extend(it.items)
        else:
            flat.append(it)
    if not flat:
        return EPS
    if len(flat) == 1:
        return flat[0]
    return _Cat(tuple(flat))


def _alt(items) -> _Re:
    flat: set[_Re] = set()
    for it in items:
        if isinstance(it, _Empty):
            continue
        if isinstance(it, _Alt):
            flat.update(it.items)
        else:
            flat.add(it)
    if not flat:
        return EMPTY
    if len(flat) == 1:
        return next(iter(flat))
    return _Alt(frozenset(flat))


def _st(r: _Re) -> _Re:
    if isinstance(r, (_Empty, _Eps)):
        return EPS
    if isinstance(r, _St):
        return r
    return _St(r)


def _to_re(f: Formula) -> _Re:
    if isinstance(f, Var) and f.sort is Sort.STAR:
        return _Chr(f.name)
    if isinstance(f, Prod):
        return _cat([_to_re(f.left), _to_re(f.right)])
    if isinstance(f, Join):
        return _alt([_to_re(f.left), _to_re(f.right)])
    if isinstance(f, Star):
        return _st(_to_re(f.arg))
    raise ValueError(f"not a star-sorted regex: {f}")


@lru_cache(maxsize=None)
def _nullable(r: _Re) -> bool:
    if isinstance(r, _Eps) or isinstance(r, _St):
        return True
    if isinstance(r, _Cat):
        return all(_nullable(it) for it in r.items)
    if isinstance(r, _Alt):
        return any(_nullable(it) for it in r.items)
    return False


@lru_cache(maxsize=None)
def _deriv(r: _Re, a: str) -> _Re:
    if isinstance(r, (_Empty, _Eps)):
        return EMPTY
    if isinstance(r, _Chr):
        return EPS if r.letter == a else EMPTY
    if isinstance(r, _Alt):
        return _alt(_deriv(it, a) for it in r.items)
    if isinstance(r, _St):
        return _cat([_deriv(r.arg, a), r])
    head, tail = r.items[0], _cat(r.items[1:])
    d = _cat([_deriv(head, a), tail])
    if _nullable(head):
        return _alt([d, _deriv(tail, a)])
    return d


def word_in_regex(word, f: Formula) -> bool:
    """Membership of a finite word (iterable of letters) in a star regex."""
    r = _to_re(f)
    for a in word:
        r = _deriv(r, a)
        if isinstance(r, _Empty):
            return False
    return _nullable(r)


def _phase(w: LassoWord, pos: int) -> int:
    if pos < len(w.u):
        return pos
    return len(w.u) + (pos - len(w.u)) % len(w.v)


def _walk(r: _Re, w: LassoWord):
    """(position, derivative) pairs along w, until a phase/state repeat.

    Every (position class, derivative) configuration reachable on w
    appears exactly once, so scanning the yielded pairs is a complete
    search over cut points.
    """
    seen = set()
    pos = 0
    while True:
        key = (_phase(w, pos), r)
        if key in seen:
            return
        seen.add(key)
        yield pos, r
        r = _deriv(r, w.letter(pos))
        pos += 1


def derivative_cuts(f: Formula, w: LassoWord) -> list[int]:
    """Positions i with w[0..i) in L(f), one representative per configuration.

    Cuts sharing a (position class, derivative) configuration have
    identical suffixes and futures, so only the first of each class is
    returned; existential questions over cut points lose nothing.
    """
    return [i for i, r in _walk(_to_re(f), w) if _nullable(r)]


def up_word_in_omega_regex(w: LassoWord, e: Formula) -> bool:
    """Membership of the infinite word u.v^w in an omega-sorted regex."""
    if e.sort is not Sort.OMEGA:
        raise ValueError(f"omega-sorted expression required: {e}")
    if not is_omega_regex(e):
        raise ValueError(f"not in the regex fragment: {e}")
    return _up_member(w, e, {})


def _up_member(w: LassoWord, e: Formula, memo: dict) -> bool:
    key = (w, e)
    if key in memo:
        return memo[key]
    memo[key] = False  # cycle-safe default while computing
    if isinstance(e, Join):
        out = _up_member(w, e.left, memo) or _up_member(w, e.right, memo)
    elif isinstance(e, Prod):
        out = any(
            _nullable(r) and _up_member(w.drop(i), e.right, memo)
            for i, r in _walk(_to_re(e.left), w)
        )
    elif isinstance(e, Omega):
        out = _omega_power_member(w, _to_re(e.arg))
    else:
        raise ValueError(f"not an omega-sorted regex: {e}")
    memo[key] = out
    return out


def _omega_power_member(w: LassoWord, base: _Re) -> bool:
    # u.v^w is an infinite product of nonempty base-words iff some anchor
    # i >= |u| has w[0..i) in base* and some j > i with j = i mod |v| has
    # w[i..j) in base+; the repeated stretch then tiles the whole tail.
    star = _st(base)
    plus = _cat([base, star])
    for i, r in _walk(star, w):
        if i < len(w.u) or not _nullable(r):
            continue
        rest = w.drop(i)
        # position 0 is deliberately not keyed: its configuration may
        # legitimately recur at a qualifying k > 0
        seen = set()
        state, k = plus, 0
        while True:
            if k > 0:
                key = (k % len(rest.v), state)
                if key in seen:
                    break
                seen.add(key)
                if k % len(rest.v) == 0 and _nullable(state):
                    return True
            state = _deriv(state, rest.letter(k))
            k += 1
    return False
