"""Proof certificates and their checker.

A certificate is a finite tree of rule applications.  Rules with
omega-indexed premise families are finitely presented in one of two
ways: block families over an ultimately periodic antecedent are given a
periodic split (finitely many distinct blocks, each proved once), and
the star-on-the-left family is given a premise schema that the checker
instantiates up to a configurable bound.  Certificates without schemas
check exactly (FullyChecked); schema-bearing ones only up to the bound
(SchemaChecked), which is deliberately reported as a weaker verdict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

from .syntax import (
    Formula,
    Join,
    Meet,
    Omega,
    Over,
    Prod,
    Sequent,
    Sort,
    SortError,
    Star,
    Under,
    UpSequence,
    Var,
    print_sequent,
    seq1,
    seq3,
    sequent_variables,
    variables,
)

# Rule tags.
AX = "ax"
HYP = "hyp"
PROD_L = "prod_l"
UNDER_L = "under_l"
OVER_L = "over_l"
MEET_L = "meet_l"
JOIN_L = "join_l"
STAR_L = "star_l"
OMEGA_L = "omega_l"
L_OMEGA = "l_omega"
PROD_R = "prod_r"
UNDER_R = "under_r"
OVER_R = "over_r"
MEET_R = "meet_r"
JOIN_R = "join_r"
STAR_R = "star_r"
OMEGA_R = "omega_r"

LEFT_RULES = frozenset({PROD_L, UNDER_L, OVER_L, MEET_L, JOIN_L, STAR_L, OMEGA_L, L_OMEGA})
RIGHT_RULES = frozenset({PROD_R, UNDER_R, OVER_R, MEET_R, JOIN_R, STAR_R, OMEGA_R})
ALL_RULES = LEFT_RULES | RIGHT_RULES | {AX, HYP}

DEFAULT_SCHEMA_BOUND = 8


class RuleError(ValueError):
    """A rule does not apply to the given sequent at the given position."""


@dataclass(frozen=True)
class PeriodicSplit:
    """Block boundaries for an infinite antecedent: finitely many leading
    blocks (given by their nondecreasing end offsets) followed by a
    repeating pattern of block lengths."""

    prefix_bounds: tuple[int, ...] = ()
    pattern: tuple[int, ...] = ()

    def __post_init__(self):
        if any(b < 0 for b in self.prefix_bounds) or any(
            x > y for x, y in zip(self.prefix_bounds, self.prefix_bounds[1:])
        ):
            raise ValueError("prefix bounds must be nondecreasing and nonnegative")
        if not self.pattern or any(l < 0 for l in self.pattern):
            raise ValueError("pattern must be a nonempty tuple of nonnegative lengths")
        if sum(self.pattern) < 1:
            raise ValueError("pattern must cover at least one position per cycle")


def split_blocks(ante: UpSequence, split: PeriodicSplit):
    """Leading blocks and the uniform repeating blocks of the split.

    Raises RuleError when the repeating blocks fail to be uniform, i.e.
    when some pattern slot would hold different content in different
    cycles of the infinite antecedent.
    """
    if not ante.infinite:
        raise RuleError("periodic splits apply to infinite antecedents only")
    start = split.prefix_bounds[-1] if split.prefix_bounds else 0
    lead = []
    prev = 0
    for bound in split.prefix_bounds:
        lead.append(tuple(ante.at(i) for i in range(prev, bound)))
        prev = bound
    span = sum(split.pattern)
    rho = len(ante.period)
    pi = len(ante.prefix)
    settle = max(0, -(-(pi - start) // span))
    cycles = settle + rho // gcd(span, rho) + 1

    def cycle_blocks(c: int):
        base = start + c * span
        out = []
        offset = 0
        for length in split.pattern:
            out.append(tuple(ante.at(base + offset + i) for i in range(length)))
            offset += length
        return out

    repeating = cycle_blocks(0)
    for c in range(1, cycles):
        if cycle_blocks(c) != repeating:
            raise RuleError("split not periodic: repeating blocks are not uniform")
    return lead, repeating


@dataclass(frozen=True)
class SequentFamily:
    """The omega-indexed sequent family  pre, B^n, post |- succ."""

    pre: tuple[Formula, ...]
    block: tuple[Formula, ...]
    succ: Formula
    post_prefix: tuple[Formula, ...] = ()
    post_period: tuple[Formula, ...] = ()
    post_tail: Formula | None = None

    def member(self, n: int) -> Sequent:
        return Sequent(
            UpSequence(self.pre + self.block * n + self.post_prefix, self.post_period),
            self.post_tail,
            self.succ,
        )


@dataclass(frozen=True)
class ProofNode:
    rule: str
    conclusion: Sequent
    premises: tuple["ProofNode", ...] = ()
    aux: object = None
    schema: "PremiseSchema | None" = None
    vdash: tuple["VdashDerivation", ...] = ()

    def height(self) -> int:
        sub = [p.height() for p in self.premises]
        if self.schema is not None:
            sub.extend(p.height() for p in self.schema.instances)
        return 1 + max(sub, default=0)


@dataclass(frozen=True)
class RepBlocks:
    """Star-split block lengths in a template: fixed part plus a group
    repeated once per schema parameter step."""

    fixed: tuple[int, ...]
    each: tuple[int, ...]


@dataclass(frozen=True)
class TemplateNode:
    """Proof template for a premise schema.

    Instantiation at n replaces family conclusions by their n-th member,
    expands ``rep_premise`` into n copies, and expands RepBlocks aux
    into ``fixed + each * n``.
    """

    rule: str
    conclusion: "SequentFamily | Sequent"
    premises: tuple["TemplateNode", ...] = ()
    rep_premise: "TemplateNode | None" = None
    aux: object = None

    def instantiate(self, n: int) -> ProofNode:
        conc = self.conclusion.member(n) if isinstance(self.conclusion, SequentFamily) else self.conclusion
        prems = tuple(t.instantiate(n) for t in self.premises)
        if self.rep_premise is not None:
            prems = prems + tuple(self.rep_premise.instantiate(n) for _ in range(n))
        aux = self.aux
        if isinstance(aux, RepBlocks):
            aux = aux.fixed + aux.each * n
        return ProofNode(self.rule, conc, prems, aux)


@dataclass(frozen=True)
class PremiseSchema:
    """Finite presentation of an omega-indexed premise family: either a
    template instantiable at every n, or explicit instance proofs for
    n = 0, 1, ... (honest up to their count)."""

    param: str = "n"
    template: TemplateNode | None = None
    instances: tuple[ProofNode, ...] = ()

    def __post_init__(self):
        if (self.template is None) == (not self.instances):
            raise ValueError("schema needs exactly one of template or instances")


@dataclass(frozen=True)
class VdashDerivation:
    """A left-rules-only derivation of  root.ante |- x  from hypotheses
    ``hyps`` (each  Xi |- x ) and optionally a star-indexed hypothesis
    family; x is the fresh variable root.succ."""

    root: Sequent
    hyps: tuple[Sequent, ...]
    tree: ProofNode
    hyp_family: SequentFamily | None = None


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class FullyChecked:
    def __str__(self):
        return "FullyChecked"


@dataclass(frozen=True)
class SchemaChecked:
    bound: int

    def __str__(self):
        return f"SchemaChecked({self.bound})"


@dataclass(frozen=True)
class Rejected:
    reason: str
    path: tuple[str, ...] = ()

    def __str__(self):
        at = "/".join(self.path) or "root"
        return f"Rejected({self.reason} at {at})"


class _Reject(Exception):
    def __init__(self, reason: str, path: tuple[str, ...]):
        super().__init__(reason)
        self.reason = reason
        self.path = path


# ---------------------------------------------------------------------------
# Backward rule application


def _unrolled_view(s: Sequent, upto: int) -> UpSequence:
    view = s.ante.unrolled(upto)
    if view.infinite and len(view.prefix) < upto:
        raise RuleError("position out of range")
    return view


def apply_rule_backward(s: Sequent, rule: str, aux=None):
    """Premises of one backward rule application.

    Returns a list of sequents for finitary rules, a SequentFamily for
    the star-left rule, and the deduplicated goal list for the two
    periodic-split rules (the L-variant takes aux = (split, Ms) with one
    hypothesis tuple per block).  Raises RuleError when the rule does
    not apply at the designated position.
    """
    if rule == AX:
        if not _is_axiom(s):
            raise RuleError("not an axiom instance")
        return []
    if rule in (PROD_L, MEET_L, JOIN_L):
        return _left_decompose(s, rule, aux)
    if rule == OMEGA_L:
        if s.kind != 3 or not isinstance(s.tail, Omega):
            raise RuleError("omega-left needs a trailing omega-iteration formula")
        if aux != len(s.ante.prefix):
            raise RuleError("omega-left principal position must address the trailing formula")
        return [Sequent(UpSequence(s.ante.prefix, (s.tail.arg,)), None, s.succ)]
    if rule == STAR_L:
        pos = aux
        f = _formula_at(s, pos)
        if not isinstance(f, Star):
            raise RuleError(f"no star at position {pos}")
        view = _view_for(s, pos)
        return SequentFamily(
            pre=view.prefix[:pos],
            block=(f.arg,),
            succ=s.succ,
            post_prefix=view.prefix[pos + 1 :],
            post_period=view.period,
            post_tail=s.tail,
        )
    if rule == UNDER_L:
        return _under_left(s, aux)
    if rule == OVER_L:
        return _over_left(s, aux)
    if rule == L_OMEGA:
        split, ms = aux
        return _l_omega_goals(s, split, ms)
    if rule == OMEGA_R:
        return _omega_right_goals(s, aux)
    if rule == PROD_R:
        return _prod_right(s, aux)
    if rule == OVER_R:
        if s.kind != 1 or not isinstance(s.succ, Over):
            raise RuleError("over-right needs a finite antecedent and a quotient succedent")
        num, den = s.succ.left, s.succ.right
        if den.sort is Sort.STAR:
            return [seq1(s.ante.prefix + (den,), num)]
        return [seq3(s.ante.prefix, den, num)]
    if rule == UNDER_R:
        if not isinstance(s.succ, Under):
            raise RuleError("under-right needs an under succedent")
        return [Sequent(UpSequence((s.succ.left,) + s.ante.prefix, s.ante.period), s.tail, s.succ.right)]
    if rule == MEET_R:
        if not isinstance(s.succ, Meet):
            raise RuleError("meet-right needs a meet succedent")
        return [
            Sequent(s.ante, s.tail, s.succ.left),
            Sequent(s.ante, s.tail, s.succ.right),
        ]
    if rule == JOIN_R:
        if not isinstance(s.succ, Join) or aux not in (1, 2):
            raise RuleError("join-right needs a join succedent and a side choice")
        side = s.succ.left if aux == 1 else s.succ.right
        return [Sequent(s.ante, s.tail, side)]
    if rule == STAR_R:
        return _star_right(s, aux)
    raise RuleError(f"unknown rule {rule}")


def _is_axiom(s: Sequent) -> bool:
    if s.kind == 1:
        return len(s.ante.prefix) == 1 and s.ante.prefix[0] == s.succ
    if s.kind == 3:
        return not s.ante.prefix and s.tail == s.succ
    return False


def _formula_at(s: Sequent, pos) -> Formula:
    if not isinstance(pos, int) or pos < 0:
        raise RuleError(f"bad position {pos!r}")
    try:
        return s.at(pos)
    except IndexError:
        raise RuleError(f"position {pos} out of range") from None


def _view_for(s: Sequent, pos: int) -> UpSequence:
    """Antecedent with the prefix unrolled far enough to address pos."""
    if s.tail is not None and pos >= len(s.ante.prefix):
        raise RuleError("position addresses the trailing omega formula")
    return s.ante.unrolled(pos + 1)


def _left_decompose(s: Sequent, rule: str, aux):
    if rule == MEET_L:
        pos, choice = aux
        if choice not in (1, 2):
            raise RuleError("meet-left needs a side choice")
    else:
        pos = aux
    f = _formula_at(s, pos)
    is_tail = s.tail is not None and pos == len(s.ante.prefix)
    if rule == PROD_L:
        if not isinstance(f, Prod):
            raise RuleError(f"no product at position {pos}")
        if is_tail:
            return [s.replace_at(pos, (f.left,), new_tail=f.right)]
        return [s.replace_at(pos, (f.left, f.right))]
    if rule == MEET_L:
        if not isinstance(f, Meet):
            raise RuleError(f"no meet at position {pos}")
        side = f.left if choice == 1 else f.right
    else:
        if not isinstance(f, Join):
            raise RuleError(f"no join at position {pos}")
        if is_tail:
            return [s.replace_at(pos, (), new_tail=f.left), s.replace_at(pos, (), new_tail=f.right)]
        return [s.replace_at(pos, (f.left,)), s.replace_at(pos, (f.right,))]
    if is_tail:
        return [s.replace_at(pos, (), new_tail=side)]
    return [s.replace_at(pos, (side,))]


def _under_left(s: Sequent, aux):
    pi_start, pos = aux
    if not 0 <= pi_start <= pos:
        raise RuleError("under-left block must end at the principal position")
    f = _formula_at(s, pos)
    if not isinstance(f, Under):
        raise RuleError(f"no under at position {pos}")
    divisor, num = f.left, f.right
    if s.tail is not None and pos == len(s.ante.prefix):
        block = s.ante.prefix[pi_start:]
        main = seq3(s.ante.prefix[:pi_start], num, s.succ)
        return [main, seq1(block, divisor)]
    view = _view_for(s, pos)
    block = view.prefix[pi_start:pos]
    main = Sequent(
        UpSequence(view.prefix[:pi_start] + (num,) + view.prefix[pos + 1 :], view.period),
        s.tail,
        s.succ,
    )
    return [main, seq1(block, divisor)]


def _over_left(s: Sequent, aux):
    pos, xi_len = aux
    f = _formula_at(s, pos)
    if not isinstance(f, Over):
        raise RuleError(f"no over at position {pos}")
    num, den = f.left, f.right
    if den.sort is Sort.STAR:
        if xi_len is None or xi_len < 0:
            raise RuleError("over-left with a star denominator needs a block length")
        view = _view_for(s, pos + xi_len)
        block = view.prefix[pos + 1 : pos + 1 + xi_len]
        if len(block) != xi_len:
            raise RuleError("over-left block out of range")
        main = Sequent(
            UpSequence(view.prefix[:pos] + (num,) + view.prefix[pos + 1 + xi_len :], view.period),
            s.tail,
            s.succ,
        )
        return [main, seq1(block, den)]
    # omega-sorted denominator: the argument block is the entire rest
    if xi_len is not None:
        raise RuleError("over-left with an omega denominator consumes the whole rest")
    if s.kind == 1:
        raise RuleError("the rest of a finite antecedent cannot derive an omega formula")
    view = _view_for(s, pos)
    main = seq3(view.prefix[:pos], num, s.succ)
    if s.kind == 2:
        side = Sequent(s.ante.drop(pos + 1), None, den)
    else:
        side = seq3(view.prefix[pos + 1 :], s.tail, den)
    return [main, side]


def _prod_right(s: Sequent, aux):
    if not isinstance(s.succ, Prod):
        raise RuleError("prod-right needs a product succedent")
    k = aux
    if not isinstance(k, int) or k < 0:
        raise RuleError("prod-right needs a split offset")
    left, right = s.succ.left, s.succ.right
    if s.tail is not None and k > len(s.ante.prefix):
        raise RuleError("split crosses the trailing omega formula")
    if s.kind == 1 and k > len(s.ante.prefix):
        raise RuleError("split out of range")
    head = s.ante.take(k) if s.kind == 2 else s.ante.prefix[:k]
    rest_ante = s.ante.drop(k) if s.kind == 2 else UpSequence(s.ante.prefix[k:], ())
    return [seq1(head, left), Sequent(rest_ante, s.tail, right)]


def _star_right(s: Sequent, aux):
    if s.kind != 1 or not isinstance(s.succ, Star):
        raise RuleError("star-right needs a finite antecedent and a star succedent")
    lengths = aux if aux is not None else ()
    if any(l < 0 for l in lengths):
        raise RuleError("negative block length")
    if sum(lengths) != len(s.ante.prefix):
        raise RuleError("star-right blocks must cover the antecedent")
    goals = []
    offset = 0
    for l in lengths:
        goals.append(seq1(s.ante.prefix[offset : offset + l], s.succ.arg))
        offset += l
    return goals


def _omega_right_goals(s: Sequent, split):
    if s.kind != 2 or not isinstance(s.succ, Omega):
        raise RuleError("omega-right needs an infinite antecedent and an omega-iteration succedent")
    if not isinstance(split, PeriodicSplit):
        raise RuleError("omega-right needs a periodic split")
    lead, repeating = split_blocks(s.ante, split)
    goals = []
    for block in lead + repeating:
        goal = seq1(block, s.succ.arg)
        if goal not in goals:
            goals.append(goal)
    return goals


def _l_omega_goals(s: Sequent, split, ms):
    """Choice premises of the infinitary left rule.

    ms pairs each block of the split (leading blocks first, then the
    repeating ones) with its hypothesis set, a tuple of finite formula
    tuples.  Repeating blocks must have singleton hypothesis sets;
    infinitely many binary choices would need uncountably many premises.
    """
    if s.kind != 2:
        raise RuleError("the infinitary left rule applies to infinite antecedents")
    lead, repeating = split_blocks(s.ante, split)
    blocks = lead + repeating
    if len(ms) != len(blocks):
        raise RuleError(f"expected {len(blocks)} hypothesis sets, got {len(ms)}")
    for m in ms:
        if not m:
            raise RuleError("empty hypothesis set")
    for m in ms[len(lead) :]:
        if len(m) != 1:
            raise RuleError("choice set unsupported: repeating blocks need singleton hypotheses")
    period_items = tuple(itertools.chain.from_iterable(m[0] for m in ms[len(lead) :]))
    if not period_items:
        raise RuleError("premise degenerates to a finite sequence")
    goals = []
    for choice in itertools.product(*ms[: len(lead)]):
        prefix_items = tuple(itertools.chain.from_iterable(choice))
        goal = Sequent(UpSequence(prefix_items, period_items), None, s.succ)
        if goal not in goals:
            goals.append(goal)
    return goals


# ---------------------------------------------------------------------------
# The checker


def check_vdash(d: VdashDerivation) -> str | None:
    """None when the derivation is valid, otherwise the failure reason."""
    x = d.root.succ
    if not isinstance(x, Var):
        return "succedent of the derivation must be a variable"
    key = (x.name, x.sort)
    fresh_scope = set()
    for f in d.root.ante.prefix + d.root.ante.period:
        fresh_scope |= variables(f)
    if d.root.tail is not None:
        fresh_scope |= variables(d.root.tail)
    for h in d.hyps:
        for f in h.ante.prefix + h.ante.period:
            fresh_scope |= variables(f)
        if h.tail is not None:
            fresh_scope |= variables(h.tail)
    if d.hyp_family is not None:
        for f in d.hyp_family.pre + d.hyp_family.block + d.hyp_family.post_prefix + d.hyp_family.post_period:
            fresh_scope |= variables(f)
    if key in fresh_scope:
        return "x not fresh: it occurs in the sequence or the hypotheses"
    for h in d.hyps:
        if h.succ != x:
            return "hypothesis succedent differs from the fresh variable"
    if d.hyp_family is not None and d.hyp_family.succ != x:
        return "hypothesis family succedent differs from the fresh variable"
    if d.tree.conclusion != d.root:
        return "derivation root differs from the declared sequence"

    used: set[int] = set()
    family_used = [False]

    def walk(node: ProofNode) -> str | None:
        if node.schema is not None or node.vdash:
            return "schemas and nested infinitary rules are not allowed here"
        if node.rule == AX:
            if node.premises:
                return "axiom with premises"
            if not _is_axiom(node.conclusion):
                return "malformed step: not an axiom instance"
            return None
        if node.rule == HYP:
            i = node.aux
            if not isinstance(i, int) or not 0 <= i < len(d.hyps):
                return "hypothesis index out of range"
            if node.conclusion != d.hyps[i]:
                return "hypothesis leaf differs from the declared hypothesis"
            used.add(i)
            return None
        if node.rule == STAR_L and not node.premises:
            if d.hyp_family is None:
                return "star family used without a declared hypothesis family"
            try:
                family = apply_rule_backward(node.conclusion, STAR_L, node.aux)
            except RuleError as e:
                return f"malformed step: {e}"
            if family != d.hyp_family:
                return "star family differs from the declared hypothesis family"
            family_used[0] = True
            return None
        if node.rule not in LEFT_RULES:
            return f"right rule used: {node.rule}" if node.rule in RIGHT_RULES else f"unknown rule {node.rule}"
        if node.rule == L_OMEGA:
            return "only finitary left rules are allowed here"
        try:
            goals = apply_rule_backward(node.conclusion, node.rule, node.aux)
        except RuleError as e:
            return f"malformed step: {e}"
        if isinstance(goals, SequentFamily):
            return "star-left inside a derivation needs family hypotheses"
        if len(node.premises) != len(goals):
            return "premise count mismatch"
        for child, goal in zip(node.premises, goals):
            if child.conclusion != goal:
                return f"premise mismatch: expected {print_sequent(goal)}"
            err = walk(child)
            if err:
                return err
        return None

    err = walk(d.tree)
    if err:
        return err
    if used != set(range(len(d.hyps))):
        return "unused hypothesis"
    if d.hyp_family is not None and not family_used[0]:
        return "unused hypothesis family"
    return None


def check_proof(p: ProofNode, schema_bound: int = DEFAULT_SCHEMA_BOUND):
    """Check a certificate tree.

    FullyChecked when no schema occurs; SchemaChecked(k) when schemas
    occur and every instantiation at 0..k passed; Rejected(reason, path)
    at the first failing node.
    """
    bounds: list[int] = []
    try:
        _check_node(p, (), schema_bound, bounds)
    except _Reject as e:
        return Rejected(e.reason, e.path)
    if bounds:
        return SchemaChecked(min(bounds))
    return FullyChecked()


def _check_node(node: ProofNode, path: tuple[str, ...], schema_bound: int, bounds: list[int]):
    rule = node.rule
    if rule not in ALL_RULES:
        raise _Reject(f"unknown rule {rule}", path)
    if rule == HYP:
        raise _Reject("hypothesis leaf outside a derivation context", path)
    if node.schema is not None and rule != STAR_L:
        raise _Reject("only star-left carries a premise schema", path)
    if node.vdash and rule != L_OMEGA:
        raise _Reject("only the infinitary left rule carries block derivations", path)

    if rule == AX:
        if node.premises:
            raise _Reject("axiom with premises", path)
        if not _is_axiom(node.conclusion):
            raise _Reject("rule mismatch: not an axiom instance", path)
        return

    if rule == STAR_L:
        try:
            family = apply_rule_backward(node.conclusion, STAR_L, node.aux)
        except RuleError as e:
            raise _Reject(f"rule mismatch: {e}", path) from None
        if node.premises:
            raise _Reject("star-left premises must come through the schema", path)
        if node.schema is None:
            raise _Reject("star-left without a premise schema", path)
        _check_schema(node.schema, family, path, schema_bound, bounds)
        return

    if rule == L_OMEGA:
        _check_l_omega(node, path, schema_bound, bounds)
        return

    try:
        goals = apply_rule_backward(node.conclusion, rule, node.aux)
    except (RuleError, SortError) as e:
        raise _Reject(f"rule mismatch: {e}", path) from None
    if len(node.premises) != len(goals):
        raise _Reject(f"premise count mismatch: expected {len(goals)}, got {len(node.premises)}", path)
    for i, (child, goal) in enumerate(zip(node.premises, goals)):
        if child.conclusion != goal:
            raise _Reject(
                f"premise mismatch: expected {print_sequent(goal)}, got {print_sequent(child.conclusion)}",
                path + (f"p{i}",),
            )
        _check_node(child, path + (f"p{i}",), schema_bound, bounds)


def _check_schema(schema: PremiseSchema, family: SequentFamily, path, schema_bound: int, bounds: list[int]):
    if schema.instances:
        effective = min(schema_bound, len(schema.instances) - 1)
    else:
        effective = schema_bound
    for n in range(effective + 1):
        inst = schema.instances[n] if schema.instances else schema.template.instantiate(n)
        if inst.conclusion != family.member(n):
            raise _Reject(
                f"schema instance {n} proves {print_sequent(inst.conclusion)}, "
                f"family expects {print_sequent(family.member(n))}",
                path + (f"s{n}",),
            )
        _check_node(inst, path + (f"s{n}",), schema_bound, bounds)
    bounds.append(effective)


def _check_l_omega(node: ProofNode, path, schema_bound: int, bounds: list[int]):
    s = node.conclusion
    if not isinstance(node.aux, PeriodicSplit):
        raise _Reject("the infinitary left rule needs a periodic split", path)
    try:
        lead, repeating = split_blocks(s.ante, node.aux)
    except RuleError as e:
        raise _Reject(str(e), path) from None
    blocks = lead + repeating
    if len(node.vdash) != len(blocks):
        raise _Reject(f"expected {len(blocks)} block derivations, got {len(node.vdash)}", path)
    ms = []
    for i, (vd, block) in enumerate(zip(node.vdash, blocks)):
        if vd.hyp_family is not None:
            raise _Reject("choice set unsupported: infinite hypothesis families", path + (f"v{i}",))
        if vd.root.kind != 1 or vd.root.ante.prefix != block:
            raise _Reject("block derivation root differs from the split block", path + (f"v{i}",))
        err = check_vdash(vd)
        if err:
            raise _Reject(f"invalid block derivation: {err}", path + (f"v{i}",))
        for h in vd.hyps:
            if h.kind != 1:
                raise _Reject("hypotheses of a block must be finite sequences", path + (f"v{i}",))
        ms.append(tuple(h.ante.prefix for h in vd.hyps))
    try:
        goals = _l_omega_goals(s, node.aux, tuple(ms))
    except (RuleError, SortError) as e:
        raise _Reject(str(e), path) from None
    if len(node.premises) != len(goals):
        raise _Reject(f"premise count mismatch: expected {len(goals)}, got {len(node.premises)}", path)
    for i, (child, goal) in enumerate(zip(node.premises, goals)):
        if child.conclusion != goal:
            raise _Reject(
                f"premise mismatch: expected {print_sequent(goal)}, got {print_sequent(child.conclusion)}",
                path + (f"p{i}",),
            )
        _check_node(child, path + (f"p{i}",), schema_bound, bounds)


# ---------------------------------------------------------------------------
# Invertible-rule saturation


def invert(s: Sequent):
    """Saturate the invertible decompositions of a sequent.

    Applies prod-left, join-left, omega-left at directly addressable
    positions and meet-right, under-right, over-right on the succedent
    until none applies; star-left fixpoints are reported as families.
    Decomposable formulas inside the period of an infinite antecedent
    are left untouched (they belong to the infinitary left rule) -- the
    returned sequent represents that branching family lazily.
    """
    out = []
    queue = [s]
    while queue:
        t = queue.pop(0)
        step = _first_invertible(t)
        if step is None:
            fam = _first_star_family(t)
            out.append(fam if fam is not None else t)
        else:
            queue.extend(apply_rule_backward(t, step[0], step[1]))
    return out


def _first_invertible(s: Sequent):
    for pos in range(s.finite_len):
        f = s.at(pos)
        if isinstance(f, Prod):
            return (PROD_L, pos)
        if isinstance(f, Join):
            return (JOIN_L, pos)
        if isinstance(f, Omega) and s.tail is not None and pos == len(s.ante.prefix):
            return (OMEGA_L, pos)
    if isinstance(s.succ, Meet):
        return (MEET_R, None)
    if isinstance(s.succ, Under):
        return (UNDER_R, None)
    if isinstance(s.succ, Over) and s.kind == 1:
        return (OVER_R, None)
    return None


def _first_star_family(s: Sequent):
    for pos in range(len(s.ante.prefix)):
        if isinstance(s.ante.prefix[pos], Star):
            return apply_rule_backward(s, STAR_L, pos)
    return None


def fresh_variable(*seqs: Sequent, sort: Sort = Sort.STAR, stem: str = "x") -> Var:
    taken = set()
    for s in seqs:
        taken |= {name for name, srt in sequent_variables(s) if srt is sort}
    if stem not in taken:
        return Var(stem, sort)
    i = 0
    while f"{stem}{i}" in taken:
        i += 1
    return Var(f"{stem}{i}", sort)
