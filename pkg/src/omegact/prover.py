"""Decision procedure, word-sequent certificates, and backward search.

Inclusion of omega-regular expressions is decided semantically on the
automata; for sequents whose antecedent is a concrete lasso word a
right-rules-only certificate is produced from a membership
decomposition; everything else goes through depth-bounded backward
search.  Search failure is always bound-relative -- only the
omega-regular route may declare a sequent unprovable, on the strength
of a semantic counterexample.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .automata import buchi_inclusion, nfa_inclusion, omega_regex_to_buchi, regex_to_nfa
from .kernel import (
    AX,
    HYP,
    JOIN_L,
    JOIN_R,
    L_OMEGA,
    MEET_L,
    OMEGA_R,
    OVER_L,
    PROD_L,
    PROD_R,
    STAR_L,
    STAR_R,
    UNDER_L,
    DEFAULT_SCHEMA_BOUND,
    PeriodicSplit,
    PremiseSchema,
    ProofNode,
    RuleError,
    VdashDerivation,
    _first_invertible,
    _is_axiom,
    apply_rule_backward,
    fresh_variable,
)
from .syntax import (
    Formula,
    Join,
    LassoWord,
    Meet,
    Omega,
    Over,
    Prod,
    Sequent,
    Sort,
    Star,
    Under,
    Var,
    seq1,
)
from .wordsem import is_omega_regex, up_word_in_omega_regex, word_in_regex


@dataclass(frozen=True)
class Provable:
    def __str__(self):
        return "Provable"


@dataclass(frozen=True)
class NotProvable:
    counterexample: LassoWord | tuple[str, ...]

    def __str__(self):
        return f"NotProvable({self.counterexample})"


@dataclass(frozen=True)
class Found:
    proof: ProofNode


@dataclass(frozen=True)
class NotFoundWithin:
    depth: int


class NotMember(ValueError):
    pass


# ---------------------------------------------------------------------------
# Semantic decision for the regex fragment


def decide_omega_regular(alpha: Formula, beta: Formula, complement=None):
    """Provable iff the omega-language of alpha is included in beta's.

    Both sides must be regex-fragment expressions of equal sort; the
    star-sorted case is delegated to NFA inclusion (the counterexample
    is then a finite word rather than a lasso).
    """
    if not is_omega_regex(alpha) or not is_omega_regex(beta):
        raise ValueError("both sides must be in the regex fragment")
    if alpha.sort is not beta.sort:
        raise ValueError("both sides must have the same sort")
    if alpha.sort is Sort.STAR:
        witness = nfa_inclusion(regex_to_nfa(alpha), regex_to_nfa(beta))
        return Provable() if witness is None else NotProvable(witness)
    kwargs = {} if complement is None else {"complement": complement}
    witness = buchi_inclusion(omega_regex_to_buchi(alpha), omega_regex_to_buchi(beta), **kwargs)
    return Provable() if witness is None else NotProvable(witness)


# ---------------------------------------------------------------------------
# Right-rules-only certificates for word sequents


def prove_word_sequent(w: LassoWord, beta: Formula) -> ProofNode:
    """Certificate of  <w> |- beta  built from a membership decomposition.

    Raises NotMember when the infinite word is not in the language.
    """
    if beta.sort is not Sort.OMEGA or not is_omega_regex(beta):
        raise ValueError("an omega-sorted regex-fragment succedent is required")
    if not up_word_in_omega_regex(w, beta):
        raise NotMember(f"{w} is not in the language of the succedent")
    return _build_omega(w, beta)


def _var_word(letters) -> tuple[Var, ...]:
    return tuple(Var(c) for c in letters)


def _build_omega(w: LassoWord, e: Formula) -> ProofNode:
    s = Sequent(w.to_sequence(), None, e)
    if isinstance(e, Join):
        pick = 1 if up_word_in_omega_regex(w, e.left) else 2
        side = e.left if pick == 1 else e.right
        return ProofNode(JOIN_R, s, (_build_omega(w, side),), aux=pick)
    if isinstance(e, Prod):
        for k in _star_cuts(e.left, w):
            if up_word_in_omega_regex(w.drop(k), e.right):
                head = _build_star(w.take(k), e.left)
                rest = _build_omega(w.drop(k), e.right)
                return ProofNode(PROD_R, s, (head, rest), aux=k)
        raise AssertionError("membership holds but no product cut was found")
    if isinstance(e, Omega):
        split, blocks = _omega_split(w, e.arg)
        built: dict = {}
        premises = []
        for block in blocks:
            if block not in built:
                built[block] = _build_star(block, e.arg)
                premises.append(built[block])
        return ProofNode(OMEGA_R, s, tuple(premises), aux=split)
    raise AssertionError(f"unexpected succedent {e}")


def _star_cuts(f: Formula, w: LassoWord):
    """Candidate cut points k with w[0..k) in L(f), one per configuration."""
    from .wordsem import derivative_cuts

    return derivative_cuts(f, w)


def _segment_table(f: Formula, w: LassoWord, horizon: int):
    """members[i][j] truth of w[i..j) in L(f), computed lazily."""
    letters = w.take(horizon)
    cache: dict[tuple[int, int], bool] = {}

    def member(i: int, j: int) -> bool:
        if (i, j) not in cache:
            cache[(i, j)] = word_in_regex(letters[i:j], f)
        return cache[(i, j)]

    return member


def _omega_split(w: LassoWord, base: Formula):
    """A periodic split of <w> into blocks all in L(base).

    Searches for an anchor i >= |u| reachable from 0 by nonempty base
    segments and a same-residue j > i reachable from i; the segment cuts
    become the split.  The horizon grows geometrically; membership was
    established beforehand, so a decomposition exists.
    """
    for scale in (4, 16, 64, 200):
        horizon = len(w.u) + len(w.v) * scale
        member = _segment_table(base, w, horizon)
        reach_from_0 = _segment_reach(member, 0, horizon)
        for i in sorted(reach_from_0):
            if i < len(w.u):
                continue
            reach_from_i = _segment_reach(member, i, horizon)
            targets = [
                j
                for j in sorted(reach_from_i)
                if j > i and (j - i) % len(w.v) == 0
            ]
            if not targets:
                continue
            j = targets[0]
            lead_cuts = _recover_cuts(member, 0, i)
            loop_cuts = _recover_cuts(member, i, j)
            bounds = tuple(lead_cuts[1:])
            pattern = tuple(b - a for a, b in zip(loop_cuts, loop_cuts[1:]))
            split = PeriodicSplit(bounds, pattern)
            blocks = [w.take(i)[a:b] for a, b in zip(lead_cuts, lead_cuts[1:])]
            blocks += [w.take(j)[a:b] for a, b in zip(loop_cuts, loop_cuts[1:])]
            return split, [tuple(b) for b in blocks]
    raise AssertionError("no periodic decomposition found within the horizon")


def _segment_reach(member, start: int, horizon: int) -> set[int]:
    reach = {start}
    frontier = [start]
    while frontier:
        i = frontier.pop(0)
        for j in range(i + 1, horizon + 1):
            if j not in reach and member(i, j):
                reach.add(j)
                frontier.append(j)
    return reach


def _recover_cuts(member, start: int, end: int) -> list[int]:
    """Shortest cut sequence start = c0 < ... < cm = end, segments in L."""
    from collections import deque

    parent = {start: None}
    queue = deque([start])
    while queue:
        i = queue.popleft()
        if i == end:
            break
        for j in range(i + 1, end + 1):
            if j not in parent and member(i, j):
                parent[j] = i
                queue.append(j)
    cuts = [end]
    while parent[cuts[-1]] is not None:
        cuts.append(parent[cuts[-1]])
    return list(reversed(cuts))


def _build_star(letters: tuple, g: Formula) -> ProofNode:
    """Right-rules-only proof of  letters |- g  for a star regex g."""
    word = tuple(c.name if isinstance(c, Var) else c for c in letters)
    s = seq1(_var_word(word), g)
    if isinstance(g, Var):
        assert word == (g.name,)
        return ProofNode(AX, s)
    if isinstance(g, Join):
        pick = 1 if word_in_regex(word, g.left) else 2
        side = g.left if pick == 1 else g.right
        return ProofNode(JOIN_R, s, (_build_star(word, side),), aux=pick)
    if isinstance(g, Prod):
        for k in range(len(word) + 1):
            if word_in_regex(word[:k], g.left) and word_in_regex(word[k:], g.right):
                return ProofNode(
                    PROD_R, s, (_build_star(word[:k], g.left), _build_star(word[k:], g.right)), aux=k
                )
        raise AssertionError("membership holds but no product split was found")
    if isinstance(g, Star):
        if not word:
            return ProofNode(STAR_R, s, (), aux=())
        member = lambda i, j: word_in_regex(word[i:j], g.arg)  # noqa: E731
        cuts = _recover_cuts(member, 0, len(word))
        lengths = tuple(b - a for a, b in zip(cuts, cuts[1:]))
        premises = tuple(_build_star(word[a:b], g.arg) for a, b in zip(cuts, cuts[1:]))
        return ProofNode(STAR_R, s, premises, aux=lengths)
    raise AssertionError(f"unexpected star succedent {g}")


# ---------------------------------------------------------------------------
# Bounded backward search


@dataclass
class SearchMemo:
    """Shared between searches over related sequents.

    Successes are keyed by the exact sequent (certificates must conclude
    the sequent as written); failures by its normalized form together
    with the depth that was exhausted.
    """

    proved: dict = field(default_factory=dict)
    failed: dict = field(default_factory=dict)


def bounded_search(
    s: Sequent,
    depth: int,
    schema_bound: int = DEFAULT_SCHEMA_BOUND,
    memo: SearchMemo | None = None,
):
    """Backward proof search up to the given tree height.

    Invertible decompositions are committed, then the non-invertible
    choices are enumerated cheapest-first.  A repeated sequent along the
    current branch fails that branch (proofs are finite trees, so a
    genuine proof never needs the repetition).  NotFoundWithin is
    bound-relative, never a refutation.
    """
    memo = memo or SearchMemo()
    node, _ = _search(s, depth, schema_bound, memo, frozenset())
    return Found(node) if node is not None else NotFoundWithin(depth)


def _search(s: Sequent, d: int, K: int, memo: SearchMemo, onpath: frozenset):
    """Returns (proof or None, cycle cuts against sequents still on the
    path).  A failure pruned by such a cut is path-dependent and must
    not be cached."""
    if d <= 0:
        return None, frozenset()
    if s in memo.proved:
        return memo.proved[s], frozenset()
    key = s.normalized()
    if memo.failed.get(key, -1) >= d:
        return None, frozenset()
    if key in onpath:
        return None, frozenset({key})
    onpath = onpath | {key}

    node, hits = _try_moves(s, d, K, memo, onpath)
    if node is not None:
        memo.proved[s] = node
        return node, frozenset()
    hits = hits - {key}
    if not hits and memo.failed.get(key, -1) < d:
        memo.failed[key] = d
    return None, hits


def _prove_all(goals, d, K, memo, onpath):
    children = []
    hits: frozenset = frozenset()
    for g in goals:
        child, h = _search(g, d - 1, K, memo, onpath)
        if child is None:
            return None, hits | h
        children.append(child)
    return tuple(children), hits


def _try_moves(s: Sequent, d: int, K: int, memo: SearchMemo, onpath: frozenset):
    step = _first_invertible(s)
    if step is not None:
        rule, aux = step
        goals = apply_rule_backward(s, rule, aux)
        children, hits = _prove_all(goals, d, K, memo, onpath)
        if children is None:
            return None, hits
        return ProofNode(rule, s, children, aux), frozenset()

    if _is_axiom(s):
        return ProofNode(AX, s), frozenset()

    all_hits: frozenset = frozenset()
    for rule, aux in _enumerate_moves(s, d):
        if rule == STAR_L:
            node, hits = _star_schema_move(s, aux, d, K, memo, onpath)
        elif rule == L_OMEGA:
            node, hits = _l_omega_move(s, aux, d, K, memo, onpath)
        else:
            try:
                goals = apply_rule_backward(s, rule, aux)
            except RuleError:
                continue
            children, hits = _prove_all(goals, d, K, memo, onpath)
            node = None if children is None else ProofNode(rule, s, children, aux)
        if node is not None:
            return node, frozenset()
        all_hits |= hits
    return None, all_hits


def _enumerate_moves(s: Sequent, d: int):
    """Non-invertible candidates, cheapest first: join-right and
    meet-left, then product/star splits by increasing position count,
    then residual left rules and star schemas, then periodic splits."""
    finite_positions = range(s.finite_len)
    if isinstance(s.succ, Join):
        yield (JOIN_R, 1)
        yield (JOIN_R, 2)
    for p in finite_positions:
        if isinstance(s.at(p), Meet):
            yield (MEET_L, (p, 1))
            yield (MEET_L, (p, 2))
    if isinstance(s.succ, Prod):
        limit = len(s.ante.prefix) + (len(s.ante.period) if s.kind == 2 else 0)
        for k in range(limit + 1):
            yield (PROD_R, k)
    if s.kind == 1 and isinstance(s.succ, Star):
        n_items = len(s.ante.prefix)
        if n_items == 0:
            yield (STAR_R, ())
        for count in range(1, n_items + 1):
            for parts in _compositions(n_items, count):
                yield (STAR_R, parts)
    for p in finite_positions:
        f = s.at(p)
        if isinstance(f, Under):
            for j in range(p, -1, -1):
                yield (UNDER_L, (j, p))
        elif isinstance(f, Over):
            if f.right.sort is Sort.STAR:
                rest = s.finite_len - p - 1 + (len(s.ante.period) if s.kind == 2 else 0)
                for ln in range(0, rest + 1):
                    yield (OVER_L, (p, ln))
            else:
                yield (OVER_L, (p, None))
    for p in range(len(s.ante.prefix)):
        if isinstance(s.ante.prefix[p], Star):
            yield (STAR_L, p)
    if s.kind == 2:
        if isinstance(s.succ, Omega):
            for split in _enumerate_splits(s, d):
                yield (OMEGA_R, split)
        for split in _enumerate_splits(s, d):
            yield (L_OMEGA, split)


def _compositions(total: int, count: int):
    """Orderings of `total` into `count` positive parts, lexicographic."""
    if count == 1:
        yield (total,)
        return
    for first in range(1, total - count + 2):
        for rest in _compositions(total - first, count - 1):
            yield (first,) + rest


def _enumerate_splits(s: Sequent, d: int):
    """Periodic splits: repeating patterns over one or two period copies
    with block length bounded by the remaining depth, leading blocks
    covering the prefix plus at most one extra window."""
    rho = len(s.ante.period)
    pi = len(s.ante.prefix)
    max_block = max(1, min(d, 2 * rho + pi))
    seen = set()
    for m in (1, 2):
        window = m * rho
        patterns = []
        for count in range(1, window + 1):
            for parts in _compositions(window, count):
                if max(parts) <= max_block:
                    patterns.append(parts)
        patterns.sort(key=lambda parts: (max(parts), len(parts), parts))
        for start_extra in range(0, window + 1):
            s0 = pi + start_extra
            for bounds in _bounds_options(s0):
                for parts in patterns:
                    split = (bounds, parts)
                    if split in seen:
                        continue
                    seen.add(split)
                    try:
                        yield PeriodicSplit(bounds, parts)
                    except ValueError:
                        continue


def _bounds_options(s0: int):
    if s0 == 0:
        yield ()
        return
    for count in range(1, s0 + 1):
        for parts in _compositions(s0, count):
            bounds = []
            acc = 0
            for p in parts:
                acc += p
                bounds.append(acc)
            yield tuple(bounds)


def _star_schema_move(s: Sequent, pos: int, d: int, K: int, memo: SearchMemo, onpath: frozenset):
    try:
        family = apply_rule_backward(s, STAR_L, pos)
    except RuleError:
        return None, frozenset()
    instances = []
    hits: frozenset = frozenset()
    for n in range(K + 1):
        inst, h = _search(family.member(n), d - 1, K, memo, onpath)
        if inst is None:
            return None, hits | h
        instances.append(inst)
    node = ProofNode(STAR_L, s, aux=pos, schema=PremiseSchema("n", instances=tuple(instances)))
    return node, frozenset()


def _l_omega_move(s: Sequent, split: PeriodicSplit, d: int, K: int, memo: SearchMemo, onpath: frozenset):
    from .kernel import split_blocks

    try:
        lead, repeating = split_blocks(s.ante, split)
    except RuleError:
        return None, frozenset()
    x = fresh_variable(s)
    per_block = []
    for block in lead:
        per_block.append(_vdash_options(block, x))
    for block in repeating:
        opts = [(t, hs) for t, hs in _vdash_options(block, x) if len(hs) == 1]
        per_block.append(opts)
    if any(not opts for opts in per_block):
        return None, frozenset()
    all_hits: frozenset = frozenset()
    for combo in itertools.islice(itertools.product(*per_block), 64):
        ms = tuple(hs for _, hs in combo)
        if all(
            len(hs) == 1 and hs[0] == block
            for block, (_, hs) in zip(lead + repeating, combo)
        ):
            continue  # identity rewriting: the premise is the conclusion again
        try:
            goals = apply_rule_backward(s, L_OMEGA, (split, ms))
        except RuleError:
            continue
        children, hits = _prove_all(goals, d, K, memo, onpath)
        if children is None:
            all_hits |= hits
            continue
        vds = []
        for block, (tree, hyp_seqs) in zip(lead + repeating, combo):
            hyps = tuple(seq1(h, x) for h in hyp_seqs)
            index = {h: i for i, h in enumerate(hyp_seqs)}
            vds.append(VdashDerivation(seq1(block, x), hyps, _reindex_hyps(tree, index)))
        return ProofNode(L_OMEGA, s, tuple(children), aux=split, vdash=tuple(vds)), frozenset()
    return None, all_hits


def _reindex_hyps(tree: ProofNode, index: dict) -> ProofNode:
    if tree.rule == HYP:
        return ProofNode(HYP, tree.conclusion, aux=index[tree.aux])
    return ProofNode(
        tree.rule,
        tree.conclusion,
        tuple(_reindex_hyps(c, index) for c in tree.premises),
        tree.aux,
    )


def _vdash_options(items: tuple, x: Var, depth: int = 4, cap: int = 16):
    """Left-rule rewritings of a block: list of (tree, hypothesis tuples).

    The hypothesis leaves carry their own sequence as a placeholder aux;
    the caller assigns indices once the hypothesis set is fixed.
    """
    seq = seq1(items, x)
    options: list = []

    def decompositions(k: int, f: Formula):
        if isinstance(f, Prod):
            sub = items[:k] + (f.left, f.right) + items[k + 1 :]
            for t, hs in _vdash_options(sub, x, depth - 1, cap):
                yield ProofNode(PROD_L, seq, (t,), aux=k), hs
        elif isinstance(f, Join):
            li = items[:k] + (f.left,) + items[k + 1 :]
            ri = items[:k] + (f.right,) + items[k + 1 :]
            for lt, lh in _vdash_options(li, x, depth - 1, cap):
                for rt, rh in _vdash_options(ri, x, depth - 1, cap):
                    merged = lh + tuple(h for h in rh if h not in lh)
                    yield ProofNode(JOIN_L, seq, (lt, rt), aux=k), merged
        elif isinstance(f, Meet):
            for choice, side in ((1, f.left), (2, f.right)):
                sub = items[:k] + (side,) + items[k + 1 :]
                for t, hs in _vdash_options(sub, x, depth - 1, cap):
                    yield ProofNode(MEET_L, seq, (t,), aux=(k, choice)), hs
        elif isinstance(f, Under):
            for j in range(k, -1, -1):
                side = _prove_left_only(seq1(items[j:k], f.left), 6)
                if side is None:
                    continue
                sub = items[:j] + (f.right,) + items[k + 1 :]
                for t, hs in _vdash_options(sub, x, depth - 1, cap):
                    yield ProofNode(UNDER_L, seq, (t, side), aux=(j, k)), hs
        elif isinstance(f, Over) and f.right.sort is Sort.STAR:
            for ln in range(0, len(items) - k):
                side = _prove_left_only(seq1(items[k + 1 : k + 1 + ln], f.right), 6)
                if side is None:
                    continue
                sub = items[:k] + (f.left,) + items[k + 1 + ln :]
                for t, hs in _vdash_options(sub, x, depth - 1, cap):
                    yield ProofNode(OVER_L, seq, (t, side), aux=(k, ln)), hs

    if depth > 0:
        for k, f in enumerate(items):
            for option in decompositions(k, f):
                options.append(option)
                if len(options) >= cap - 1:
                    break
            if len(options) >= cap - 1:
                break
    # the trivial rewriting (stop and take the block as a hypothesis)
    options.append((ProofNode(HYP, seq, aux=items), (items,)))
    return options


def _prove_left_only(s: Sequent, d: int):
    """Proof using only axioms and finitary left rules, or None."""
    if _is_axiom(s):
        return ProofNode(AX, s)
    if d <= 0:
        return None
    items = s.ante.prefix
    for k, f in enumerate(items):
        if isinstance(f, Prod):
            (g,) = apply_rule_backward(s, PROD_L, k)
            sub = _prove_left_only(g, d - 1)
            if sub is not None:
                return ProofNode(PROD_L, s, (sub,), aux=k)
        elif isinstance(f, Join):
            goals = apply_rule_backward(s, JOIN_L, k)
            subs = [_prove_left_only(g, d - 1) for g in goals]
            if all(x is not None for x in subs):
                return ProofNode(JOIN_L, s, tuple(subs), aux=k)
        elif isinstance(f, Meet):
            for choice in (1, 2):
                (g,) = apply_rule_backward(s, MEET_L, (k, choice))
                sub = _prove_left_only(g, d - 1)
                if sub is not None:
                    return ProofNode(MEET_L, s, (sub,), aux=(k, choice))
        elif isinstance(f, Under):
            for j in range(k, -1, -1):
                try:
                    main_goal, side_goal = apply_rule_backward(s, UNDER_L, (j, k))
                except RuleError:
                    continue
                side = _prove_left_only(side_goal, d - 1)
                main = _prove_left_only(main_goal, d - 1) if side is not None else None
                if side is not None and main is not None:
                    return ProofNode(UNDER_L, s, (main, side), aux=(j, k))
        elif isinstance(f, Over) and f.right.sort is Sort.STAR:
            for ln in range(0, len(items) - k):
                try:
                    main_goal, side_goal = apply_rule_backward(s, OVER_L, (k, ln))
                except RuleError:
                    continue
                side = _prove_left_only(side_goal, d - 1)
                main = _prove_left_only(main_goal, d - 1) if side is not None else None
                if side is not None and main is not None:
                    return ProofNode(OVER_L, s, (main, side), aux=(k, ln))
    return None
