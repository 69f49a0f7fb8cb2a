"""Finite-word and infinite-word automata engines.

NFAs carry the finitary semantics of the regex fragment; Buchi automata
carry the omega-word semantics.  Complementation comes in two
independent flavours: the primary rank-based construction (tight level
rankings with an owing set) and a Ramsey-style construction built from
transition profiles, kept as a cross-oracle.  Inclusion is decided as
emptiness of the intersection with a complement.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from .syntax import Formula, Join, LassoWord, Omega, Prod, Sort, Star, Var
from .wordsem import is_omega_regex


@dataclass(frozen=True)
class Nfa:
    """Epsilon-free nondeterministic automaton on finite words."""

    states: frozenset[int]
    alphabet: frozenset[str]
    transitions: frozenset[tuple[int, str, int]]
    initial: frozenset[int]
    final: frozenset[int]

    def __post_init__(self):
        for src, letter, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError(f"transition endpoint outside the state set: {(src, letter, dst)}")
            if letter not in self.alphabet:
                raise ValueError(f"transition letter outside the alphabet: {letter}")
        if not self.initial <= self.states or not self.final <= self.states:
            raise ValueError("initial/final states must be states")

    @cached_property
    def delta(self) -> dict[tuple[int, str], frozenset[int]]:
        out: dict[tuple[int, str], set[int]] = {}
        for src, letter, dst in self.transitions:
            out.setdefault((src, letter), set()).add(dst)
        return {k: frozenset(v) for k, v in out.items()}

    def step(self, current: frozenset[int], letter: str) -> frozenset[int]:
        nxt: set[int] = set()
        for s in current:
            nxt |= self.delta.get((s, letter), frozenset())
        return frozenset(nxt)

    def accepts(self, word) -> bool:
        current = self.initial
        for letter in word:
            current = self.step(current, letter)
            if not current:
                return False
        return bool(current & self.final)

    def accepts_epsilon(self) -> bool:
        return bool(self.initial & self.final)

    def accepts_some_nonempty(self) -> bool:
        seen = set()
        queue = deque(dst for (src, _, dst) in self.transitions if src in self.initial)
        while queue:
            s = queue.popleft()
            if s in seen:
                continue
            seen.add(s)
            if s in self.final:
                return True
            for (src, _, dst) in self.transitions:
                if src == s:
                    queue.append(dst)
        return False

    def with_alphabet(self, letters) -> "Nfa":
        return Nfa(self.states, frozenset(letters) | self.alphabet, self.transitions, self.initial, self.final)


@dataclass(frozen=True)
class BuchiAutomaton:
    """Automaton on infinite words; a run is accepting when it visits
    the accepting set infinitely often."""

    states: frozenset[int]
    alphabet: frozenset[str]
    transitions: frozenset[tuple[int, str, int]]
    initial: frozenset[int]
    accepting: frozenset[int]
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        for src, letter, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError(f"transition endpoint outside the state set: {(src, letter, dst)}")
            if letter not in self.alphabet:
                raise ValueError(f"transition letter outside the alphabet: {letter}")
        if not self.initial <= self.states or not self.accepting <= self.states:
            raise ValueError("initial/accepting states must be states")

    @cached_property
    def delta(self) -> dict[tuple[int, str], frozenset[int]]:
        out: dict[tuple[int, str], set[int]] = {}
        for src, letter, dst in self.transitions:
            out.setdefault((src, letter), set()).add(dst)
        return {k: frozenset(v) for k, v in out.items()}

    def with_alphabet(self, letters) -> "BuchiAutomaton":
        return BuchiAutomaton(
            self.states,
            frozenset(letters) | self.alphabet,
            self.transitions,
            self.initial,
            self.accepting,
            self.notes,
        )


# ---------------------------------------------------------------------------
# Regex -> NFA (epsilon-free compositional construction)


def _shift(n: Nfa, k: int) -> Nfa:
    return Nfa(
        frozenset(s + k for s in n.states),
        n.alphabet,
        frozenset((s + k, c, t + k) for s, c, t in n.transitions),
        frozenset(s + k for s in n.initial),
        frozenset(s + k for s in n.final),
    )


def _nfa_concat(a: Nfa, b: Nfa) -> Nfa:
    b = _shift(b, max(a.states, default=-1) + 1)
    bridge = {
        (f, c, t)
        for f in a.final
        for (s, c, t) in b.transitions
        if s in b.initial
    }
    final = b.final | (a.final if b.accepts_epsilon() else frozenset())
    initial = a.initial | (b.initial if a.accepts_epsilon() else frozenset())
    return Nfa(
        a.states | b.states,
        a.alphabet | b.alphabet,
        a.transitions | b.transitions | frozenset(bridge),
        initial,
        final,
    )


def _nfa_union(a: Nfa, b: Nfa) -> Nfa:
    b = _shift(b, max(a.states, default=-1) + 1)
    return Nfa(
        a.states | b.states,
        a.alphabet | b.alphabet,
        a.transitions | b.transitions,
        a.initial | b.initial,
        a.final | b.final,
    )


def _nfa_star(a: Nfa) -> Nfa:
    hub = max(a.states, default=-1) + 1
    entry = {(s, c, t) for (s, c, t) in a.transitions if s in a.initial}
    extra = {(hub, c, t) for (_, c, t) in entry} | {
        (f, c, t) for f in a.final for (_, c, t) in entry
    }
    return Nfa(
        a.states | {hub},
        a.alphabet,
        a.transitions | frozenset(extra),
        frozenset({hub}),
        a.final | {hub},
    )


def regex_to_nfa(e: Formula) -> Nfa:
    """NFA for a star-sorted expression over variables, ., |, *."""
    if e.sort is not Sort.STAR:
        raise ValueError(f"star-sorted expression required: {e}")
    if not is_omega_regex(e):
        raise ValueError(f"not in the regex fragment: {e}")
    if isinstance(e, Var):
        return Nfa(
            frozenset({0, 1}),
            frozenset({e.name}),
            frozenset({(0, e.name, 1)}),
            frozenset({0}),
            frozenset({1}),
        )
    if isinstance(e, Prod):
        return _nfa_concat(regex_to_nfa(e.left), regex_to_nfa(e.right))
    if isinstance(e, Join):
        return _nfa_union(regex_to_nfa(e.left), regex_to_nfa(e.right))
    if isinstance(e, Star):
        return _nfa_star(regex_to_nfa(e.arg))
    raise ValueError(f"unsupported expression: {e}")


# ---------------------------------------------------------------------------
# Omega regex -> Buchi


def _buchi_omega_power(n: Nfa, notes: tuple[str, ...]) -> BuchiAutomaton:
    """Loop-back construction for L(n)^w; empty-word repeats are dropped."""
    hub = max(n.states, default=-1) + 1
    entry = {(s, c, t) for (s, c, t) in n.transitions if s in n.initial}
    closing = {(s, c, hub) for (s, c, t) in n.transitions if t in n.final}
    restart = {(hub, c, t) for (_, c, t) in entry}
    loop = {(hub, c, hub) for (s, c, t) in entry if t in n.final}
    if not n.accepts_some_nonempty():
        notes = notes + ("omega power of a language without nonempty words: empty omega-language",)
    return BuchiAutomaton(
        n.states | {hub},
        n.alphabet,
        n.transitions | frozenset(closing | restart | loop),
        frozenset({hub}),
        frozenset({hub}),
        notes,
    )


def _buchi_concat(n: Nfa, b: BuchiAutomaton) -> BuchiAutomaton:
    shift = max(n.states, default=-1) + 1
    b_states = frozenset(s + shift for s in b.states)
    b_trans = frozenset((s + shift, c, t + shift) for s, c, t in b.transitions)
    b_initial = frozenset(s + shift for s in b.initial)
    bridge = {(f, c, t) for f in n.final for (s, c, t) in b_trans if s in b_initial}
    initial = n.initial | (b_initial if n.accepts_epsilon() else frozenset())
    return BuchiAutomaton(
        n.states | b_states,
        n.alphabet | b.alphabet,
        n.transitions | b_trans | frozenset(bridge),
        initial,
        frozenset(s + shift for s in b.accepting),
        b.notes,
    )


def _buchi_union(a: BuchiAutomaton, b: BuchiAutomaton) -> BuchiAutomaton:
    shift = max(a.states, default=-1) + 1
    return BuchiAutomaton(
        a.states | frozenset(s + shift for s in b.states),
        a.alphabet | b.alphabet,
        a.transitions | frozenset((s + shift, c, t + shift) for s, c, t in b.transitions),
        a.initial | frozenset(s + shift for s in b.initial),
        a.accepting | frozenset(s + shift for s in b.accepting),
        a.notes + b.notes,
    )


def omega_regex_to_buchi(e: Formula) -> BuchiAutomaton:
    """Buchi automaton for an omega-sorted expression of the fragment."""
    if e.sort is not Sort.OMEGA:
        raise ValueError(f"omega-sorted expression required: {e}")
    if not is_omega_regex(e):
        raise ValueError(f"not in the regex fragment: {e}")
    if isinstance(e, Omega):
        return _buchi_omega_power(regex_to_nfa(e.arg), ())
    if isinstance(e, Prod):
        return _buchi_concat(regex_to_nfa(e.left), omega_regex_to_buchi(e.right))
    if isinstance(e, Join):
        return _buchi_union(omega_regex_to_buchi(e.left), omega_regex_to_buchi(e.right))
    raise ValueError(f"unsupported expression: {e}")


# ---------------------------------------------------------------------------
# Reachability, pruning, emptiness


def _renumber_buchi(states, alphabet, transitions, initial, accepting, notes=()) -> BuchiAutomaton:
    index: dict = {}
    for s in states:
        index.setdefault(s, len(index))
    return BuchiAutomaton(
        frozenset(index.values()),
        frozenset(alphabet),
        frozenset((index[s], c, index[t]) for s, c, t in transitions),
        frozenset(index[s] for s in initial),
        frozenset(index[s] for s in accepting),
        tuple(notes),
    )


def prune_buchi(b: BuchiAutomaton) -> BuchiAutomaton:
    """Keep only states on some initial path to an accepting cycle."""
    succ: dict[int, set[int]] = {}
    pred: dict[int, set[int]] = {}
    for s, _, t in b.transitions:
        succ.setdefault(s, set()).add(t)
        pred.setdefault(t, set()).add(s)

    def closure(seed, edges):
        seen = set(seed)
        queue = deque(seed)
        while queue:
            s = queue.popleft()
            for t in edges.get(s, ()):
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        return seen

    reachable = closure(b.initial, succ)
    cyclic_accepting = {
        f for f in b.accepting & reachable if f in closure(succ.get(f, set()), succ)
    }
    useful = reachable & closure(cyclic_accepting, pred)
    order = sorted(useful)
    return _renumber_buchi(
        order,
        b.alphabet,
        [(s, c, t) for s, c, t in b.transitions if s in useful and t in useful],
        [s for s in order if s in b.initial],
        [s for s in order if s in cyclic_accepting],
        b.notes,
    )


def buchi_emptiness(b: BuchiAutomaton) -> LassoWord | None:
    """None if the language is empty, otherwise a witness lasso."""

    def bfs(sources, target=None):
        parent: dict = {s: None for s in sources}
        queue = deque(sources)
        while queue:
            s = queue.popleft()
            for letter in sorted(b.alphabet):
                for t in sorted(b.delta.get((s, letter), ())):
                    if t not in parent:
                        parent[t] = (s, letter)
                        if t == target:
                            return parent
                        queue.append(t)
        return parent

    def path_letters(parent, end):
        letters = []
        node = end
        while parent[node] is not None:
            node, letter = parent[node]
            letters.append(letter)
        return tuple(reversed(letters))

    reach = bfs(sorted(b.initial))
    for f in sorted(b.accepting):
        if f not in reach:
            continue
        # a nonempty cycle through f, searched from f's successors
        starts = []
        first = {}
        for letter in sorted(b.alphabet):
            for t in sorted(b.delta.get((f, letter), ())):
                if t not in first:
                    first[t] = letter
                    starts.append(t)
        back = bfs(starts, target=f)
        if f in back:
            u = path_letters(reach, f)
            node = f
            letters = []
            while back[node] is not None:
                node, letter = back[node]
                letters.append(letter)
            v = (first[node],) + tuple(reversed(letters))
            return LassoWord(u, v)
    return None


def buchi_intersection(a: BuchiAutomaton, b: BuchiAutomaton) -> BuchiAutomaton:
    """Product with a three-valued visit flag; same alphabet required."""
    if a.alphabet != b.alphabet:
        raise ValueError("intersection requires a shared alphabet")
    start = [(p, q, 1) for p in sorted(a.initial) for q in sorted(b.initial)]
    states: list = []
    seen = set(start)
    queue = deque(start)
    transitions = []
    while queue:
        state = queue.popleft()
        states.append(state)
        p, q, flag = state
        for letter in sorted(a.alphabet):
            for p2 in sorted(a.delta.get((p, letter), ())):
                for q2 in sorted(b.delta.get((q, letter), ())):
                    if flag in (0, 1):
                        flag2 = 2 if p2 in a.accepting else 1
                    else:
                        flag2 = 0 if q2 in b.accepting else 2
                    nxt = (p2, q2, flag2)
                    transitions.append((state, letter, nxt))
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
    return _renumber_buchi(
        states,
        a.alphabet,
        transitions,
        start,
        [s for s in states if s[2] == 0],
    )


# ---------------------------------------------------------------------------
# Rank-based complementation (tight level rankings + owing set)


def rank_complement_bound(n: int) -> int:
    """Crude safe bound on the state count of the rank construction."""
    if n == 0:
        return 2
    return 2**n + (2 * n) ** n * 2**n + 1


def _tight_rankings(dom: tuple[int, ...], caps: dict[int, int], accepting: frozenset[int]):
    """All tight rankings of ``dom``: per-state rank <= cap, accepting
    states even, the maximum odd, every odd value below it attained."""
    if not dom:
        yield {}
        return
    out: list[dict[int, int]] = []

    def assign(i: int, current: dict[int, int], used_odd: set[int], max_so_far: int):
        if i == len(dom):
            if max_so_far % 2 == 1 and used_odd == set(range(1, max_so_far + 1, 2)):
                out.append(dict(current))
            return
        q = dom[i]
        cap = caps[q]
        for r in range(cap + 1):
            if q in accepting and r % 2 == 1:
                continue
            current[q] = r
            assign(i + 1, current, used_odd | ({r} if r % 2 == 1 else set()), max(max_so_far, r))
        del current[q]

    assign(0, {}, set(), -1)
    yield from out


def buchi_complement(b: BuchiAutomaton) -> BuchiAutomaton:
    """Rank-based complement: subset phase, then tight rankings with an
    owing set that must empty out infinitely often."""
    b = prune_buchi(b)
    letters = sorted(b.alphabet)
    n = len(b.states)
    ceiling = max(2 * n - 1, 1)

    def post(states, letter):
        out: set[int] = set()
        for s in states:
            out |= b.delta.get((s, letter), frozenset())
        return frozenset(out)

    def rank_key(g: dict[int, int]):
        return tuple(sorted(g.items()))

    ranking_cache: dict = {}

    def fresh_rankings(dom: frozenset[int]):
        if dom not in ranking_cache:
            caps = {q: min(ceiling, 2 * len(dom) - 1) for q in dom}
            ranking_cache[dom] = [
                rank_key(g) for g in _tight_rankings(tuple(sorted(dom)), caps, b.accepting)
            ]
        return ranking_cache[dom]

    def succ_rankings(g: dict[int, int], letter: str):
        dom = frozenset(g)
        new_dom = post(dom, letter)
        caps: dict[int, int] = {}
        for q in dom:
            for t in b.delta.get((q, letter), ()):
                caps[t] = min(caps.get(t, ceiling), g[q])
        return [rank_key(h) for h in _tight_rankings(tuple(sorted(new_dom)), caps, b.accepting)]

    init_subset = ("s", frozenset(b.initial))
    initial = [init_subset] + [("r", g, frozenset()) for g in fresh_rankings(frozenset(b.initial))]
    states: list = []
    seen = set(initial)
    queue = deque(initial)
    transitions = []
    while queue:
        state = queue.popleft()
        states.append(state)
        nexts = []
        if state[0] == "s":
            subset = state[1]
            for letter in letters:
                new_subset = post(subset, letter)
                nexts.append((letter, ("s", new_subset)))
                for g in fresh_rankings(new_subset):
                    nexts.append((letter, ("r", g, frozenset())))
        else:
            _, gk, owing = state
            g = dict(gk)
            for letter in letters:
                owing_post = post(owing, letter)
                for hk in succ_rankings(g, letter):
                    h = dict(hk)
                    evens = frozenset(q for q, r in h.items() if r % 2 == 0)
                    new_owing = (owing_post & evens) if owing else evens
                    nexts.append((letter, ("r", hk, new_owing)))
        for letter, nxt in nexts:
            transitions.append((state, letter, nxt))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    accepting = [s for s in states if s[0] == "r" and not s[2]]
    return _renumber_buchi(states, b.alphabet, transitions, initial, accepting)


# ---------------------------------------------------------------------------
# Ramsey-style complementation (transition profiles), the cross-oracle


class ProfileExplosion(RuntimeError):
    pass


def _profile_compose(x: frozenset, y: frozenset) -> frozenset:
    by_src: dict[int, list[tuple[int, int]]] = {}
    for p, f, q in x:
        by_src.setdefault(p, []).append((f, q))
    mid: dict[int, list[tuple[int, int]]] = {}
    for q, f, r in y:
        mid.setdefault(q, []).append((f, r))
    best: dict[tuple[int, int], int] = {}
    for p, items in by_src.items():
        for f1, q in items:
            for f2, r in mid.get(q, ()):
                key = (p, r)
                flag = max(f1, f2)
                if best.get(key, -1) < flag:
                    best[key] = flag
    return frozenset((p, f, r) for (p, r), f in best.items())


def _letter_profile(b: BuchiAutomaton, letter: str) -> frozenset:
    best: dict[tuple[int, int], int] = {}
    for s, c, t in b.transitions:
        if c != letter:
            continue
        flag = 1 if (s in b.accepting or t in b.accepting) else 0
        if best.get((s, t), -1) < flag:
            best[(s, t)] = flag
    return frozenset((p, f, q) for (p, q), f in best.items())


def buchi_complement_ramsey(b: BuchiAutomaton, max_profiles: int = 20000) -> BuchiAutomaton:
    """Complement via the finite monoid of transition profiles.

    The word space splits into classes Y_rho . (Y_sigma)^w over linked
    profile pairs; a class is wholly inside or outside L(b), and the
    complement is the union of the outside classes.
    """
    b = prune_buchi(b)
    letters = sorted(b.alphabet)
    identity = frozenset((q, 1 if q in b.accepting else 0, q) for q in b.states)
    letter_profiles = {a: _letter_profile(b, a) for a in letters}

    profiles = {identity: 0}
    order = [identity]
    edges: dict[tuple[int, str], int] = {}
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for a in letters:
            y = _profile_compose(x, letter_profiles[a])
            if y not in profiles:
                if len(profiles) >= max_profiles:
                    raise ProfileExplosion(f"profile monoid exceeded {max_profiles} elements")
                profiles[y] = len(order)
                order.append(y)
                queue.append(y)
            edges[(profiles[x], a)] = profiles[y]

    def profile_nfa(target: frozenset) -> Nfa:
        return Nfa(
            frozenset(range(len(order))),
            frozenset(letters),
            frozenset((i, a, j) for (i, a), j in edges.items()),
            frozenset({0}),
            frozenset({profiles[target]}),
        )

    def accepted(rho: frozenset, sigma: frozenset) -> bool:
        rho_pairs = {(p, q) for p, _, q in rho}
        sigma_loops = {p for p, f, q in sigma if p == q and f == 1}
        return any((p, q) in rho_pairs and q in sigma_loops for p in b.initial for q in b.states)

    # sigma must be the profile of at least one nonempty word; exactly the
    # monoid elements reached by at least one letter step qualify
    reached_by_word = set(edges.values())
    sigma_candidates = [x for x in order if profiles[x] in reached_by_word]

    parts: list[BuchiAutomaton] = []
    for sigma in sigma_candidates:
        if _profile_compose(sigma, sigma) != sigma:
            continue
        for rho in order:
            if _profile_compose(rho, sigma) != rho:
                continue
            if accepted(rho, sigma):
                continue
            parts.append(_buchi_concat(profile_nfa(rho), _buchi_omega_power(profile_nfa(sigma), ())))
    if not parts:
        return BuchiAutomaton(frozenset(), frozenset(letters), frozenset(), frozenset(), frozenset())
    out = parts[0]
    for p in parts[1:]:
        out = _buchi_union(out, p)
    return prune_buchi(out)


# ---------------------------------------------------------------------------
# Membership and inclusion


def up_word_in_buchi(w: LassoWord, b: BuchiAutomaton) -> bool:
    """Does b accept u.v^w?  Lasso search in the product with positions."""
    if not w.letters() <= b.alphabet:
        raise ValueError("word letters outside the automaton alphabet")
    span = len(w.u) + len(w.v)

    def successors(node):
        state, pos = node
        nxt = pos + 1 if pos + 1 < span else len(w.u)
        return [(t, nxt) for t in b.delta.get((state, w.letter(pos)), ())]

    start = [(s, 0) for s in b.initial]
    seen = set(start)
    queue = deque(start)
    reachable = []
    while queue:
        node = queue.popleft()
        reachable.append(node)
        for nxt in successors(node):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    for node in reachable:
        if node[0] not in b.accepting:
            continue
        local = set()
        queue = deque(successors(node))
        found = False
        while queue:
            m = queue.popleft()
            if m == node:
                found = True
                break
            if m in local:
                continue
            local.add(m)
            queue.extend(successors(m))
        if found:
            return True
    return False


def unify_alphabets(a, b):
    letters = a.alphabet | b.alphabet
    return a.with_alphabet(letters), b.with_alphabet(letters)


def buchi_inclusion(a: BuchiAutomaton, b: BuchiAutomaton, complement=buchi_complement) -> LassoWord | None:
    """None when L(a) is included in L(b); otherwise a counterexample
    lasso accepted by a and rejected by b."""
    a, b = unify_alphabets(a, b)
    witness = buchi_emptiness(buchi_intersection(a, complement(b)))
    return None if witness is None else witness.normalized()


def nfa_inclusion(a: Nfa, b: Nfa) -> tuple[str, ...] | None:
    """None when L(a) <= L(b); otherwise a shortest-ish counterexample word."""
    a, b = unify_alphabets(a, b)
    start = [(p, b.initial) for p in sorted(a.initial)]
    parent: dict = {node: None for node in start}
    queue = deque(start)

    def extract(node):
        letters = []
        while parent[node] is not None:
            node, letter = parent[node]
            letters.append(letter)
        return tuple(reversed(letters))

    for node in start:
        if node[0] in a.final and not node[1] & b.final:
            return ()
    while queue:
        node = queue.popleft()
        p, subset = node
        for letter in sorted(a.alphabet):
            for p2 in sorted(a.delta.get((p, letter), ())):
                nxt = (p2, b.step(subset, letter))
                if nxt not in parent:
                    parent[nxt] = (node, letter)
                    if p2 in a.final and not nxt[1] & b.final:
                        return extract(nxt)
                    queue.append(nxt)
    return None


# ---------------------------------------------------------------------------
# Dump format


def dump_automaton(m: Nfa | BuchiAutomaton) -> str:
    kind = "nfa" if isinstance(m, Nfa) else "buchi"
    marked = m.final if isinstance(m, Nfa) else m.accepting
    lines = [f"{kind} {len(m.states)} {' '.join(sorted(m.alphabet))}"]
    for src, letter, dst in sorted(m.transitions):
        lines.append(f"{src} {letter} {dst}")
    lines.append("init: " + " ".join(str(s) for s in sorted(m.initial)))
    lines.append("acc: " + " ".join(str(s) for s in sorted(marked)))
    return "\n".join(lines) + "\n"
