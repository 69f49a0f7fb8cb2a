import random

import pytest

from example_certs import ax, cert_looping_quotient, cert_pumped_quotient, single_node_mutations
from omegact.kernel import (
    AX,
    HYP,
    JOIN_L,
    L_OMEGA,
    MEET_L,
    OMEGA_L,
    OMEGA_R,
    OVER_L,
    PROD_L,
    PROD_R,
    STAR_L,
    STAR_R,
    UNDER_L,
    FullyChecked,
    PeriodicSplit,
    PremiseSchema,
    ProofNode,
    Rejected,
    RepBlocks,
    RuleError,
    SchemaChecked,
    SequentFamily,
    TemplateNode,
    VdashDerivation,
    apply_rule_backward,
    check_proof,
    check_vdash,
    invert,
    split_blocks,
)
from omegact.syntax import (
    Join,
    Meet,
    Omega,
    Over,
    Prod,
    Sort,
    Star,
    Under,
    UpSequence,
    Var,
    parse_sequent,
    seq1,
    seq2,
    seq3,
)

p, q, a, b, c = Var("p"), Var("q"), Var("a"), Var("b"), Var("c")
x = Var("x")


class TestWorkedCertificates:
    def test_looping_quotient_fully_checked(self):
        assert check_proof(cert_looping_quotient()) == FullyChecked()

    def test_pumped_quotient_fully_checked(self):
        assert check_proof(cert_pumped_quotient()) == FullyChecked()

    @pytest.mark.parametrize("builder", [cert_looping_quotient, cert_pumped_quotient])
    def test_mutations_rejected(self, builder):
        cert = builder()
        muts = single_node_mutations(cert, limit=10)
        assert len(muts) == 10
        for m in muts:
            assert isinstance(check_proof(m), Rejected)

    def test_axiom_leaf_swap_rejected(self):
        cert = cert_pumped_quotient()
        bad_leaf = ProofNode(AX, seq1((p,), q))  # not even sort-consistent as an axiom
        inner = cert.premises[0].premises[0]
        rebuilt = ProofNode(
            cert.rule,
            cert.conclusion,
            (
                ProofNode(
                    cert.premises[0].rule,
                    cert.premises[0].conclusion,
                    (ProofNode(inner.rule, inner.conclusion, (bad_leaf,), inner.aux),),
                    cert.premises[0].aux,
                ),
            ),
            cert.aux,
        )
        verdict = check_proof(rebuilt)
        assert isinstance(verdict, Rejected)
        assert "mismatch" in verdict.reason


class TestApplyRuleBackward:
    def test_omega_left(self):
        got = apply_rule_backward(parse_sequent("q^w |- p^w"), OMEGA_L, 0)
        assert got == [parse_sequent("{q} |- p^w")]

    def test_prod_right_split(self):
        got = apply_rule_backward(parse_sequent("a, {b} |- a . c^w"), PROD_R, 1)
        assert got == [parse_sequent("a |- a"), parse_sequent("{b} |- c^w")]

    def test_star_left_family(self):
        fam = apply_rule_backward(parse_sequent("a*, b |- c"), STAR_L, 0)
        assert isinstance(fam, SequentFamily)
        assert fam.member(0) == parse_sequent("b |- c")
        assert fam.member(2) == parse_sequent("a, a, b |- c")

    def test_under_left(self):
        s = parse_sequent("a, q, q \\ p |- c")
        main, side = apply_rule_backward(s, UNDER_L, (1, 2))
        assert main == parse_sequent("a, p |- c")
        assert side == parse_sequent("q |- q")

    def test_over_left_star_denominator(self):
        s = parse_sequent("p/q, q, b |- c")
        main, side = apply_rule_backward(s, OVER_L, (0, 1))
        assert main == parse_sequent("p, b |- c")
        assert side == parse_sequent("q |- q")

    def test_over_left_omega_denominator(self):
        s = parse_sequent("p^w / q^w, {q} |- c^w")
        main, side = apply_rule_backward(s, OVER_L, (0, None))
        assert main == parse_sequent("p^w |- c^w")
        assert side == parse_sequent("{q} |- q^w")

    def test_over_left_omega_denominator_finite_rest_rejected(self):
        with pytest.raises(RuleError):
            apply_rule_backward(parse_sequent("p^w / q^w, q |- c"), OVER_L, (0, None))

    def test_prod_left_inside_period_unrolls(self):
        s = parse_sequent("{a . b} |- c^w")
        (got,) = apply_rule_backward(s, PROD_L, 2)
        assert got == parse_sequent("a . b, a . b, a, b, {a . b} |- c^w")

    def test_inapplicable(self):
        with pytest.raises(RuleError):
            apply_rule_backward(parse_sequent("a |- a"), PROD_L, 0)
        with pytest.raises(RuleError):
            apply_rule_backward(parse_sequent("a, b |- a . b"), PROD_R, 5)


class TestSplitBlocks:
    def test_uniform(self):
        ante = UpSequence((q,), (a, b))
        lead, rep = split_blocks(ante, PeriodicSplit((1,), (2,)))
        assert lead == [(q,)]
        assert rep == [(a, b)]

    def test_multi_cycle_pattern(self):
        ante = UpSequence((), (a, b))
        lead, rep = split_blocks(ante, PeriodicSplit((), (1, 1)))
        assert lead == []
        assert rep == [(a,), (b,)]

    def test_non_uniform_rejected(self):
        ante = UpSequence((), (a, b))
        with pytest.raises(RuleError):
            split_blocks(ante, PeriodicSplit((), (1,)))

    def test_prefix_absorbed_by_leading_blocks(self):
        ante = UpSequence((q, a), (b, a))
        lead, rep = split_blocks(ante, PeriodicSplit((2,), (2,)))
        assert lead == [(q, a)]
        assert rep == [(b, a)]


class TestVdash:
    def test_join_elimination(self):
        root = seq1((Join(a, b),), x)
        hyps = (seq1((a,), x), seq1((b,), x))
        tree = ProofNode(
            JOIN_L,
            root,
            premises=(ProofNode(HYP, hyps[0], aux=0), ProofNode(HYP, hyps[1], aux=1)),
            aux=0,
        )
        assert check_vdash(VdashDerivation(root, hyps, tree)) is None

    def test_zero_step_reflexive(self):
        omega_x = Var("x", Sort.OMEGA)
        root = seq2((), (p,), omega_x)
        tree = ProofNode(HYP, root, aux=0)
        assert check_vdash(VdashDerivation(root, (root,), tree)) is None

    def test_star_family_hypotheses(self):
        root = seq1((Star(a),), x)
        fam = SequentFamily((), (a,), x)
        tree = ProofNode(STAR_L, root, aux=0)
        assert check_vdash(VdashDerivation(root, (), tree, hyp_family=fam)) is None

    def test_right_rule_rejected(self):
        root = seq1((a, b), x)
        # a bogus derivation ending with a right rule
        tree = ProofNode(PROD_R, root, premises=(ax(a), ax(b)), aux=1)
        err = check_vdash(VdashDerivation(root, (), tree))
        assert err is not None and "right rule" in err

    def test_unused_hypothesis(self):
        root = seq1((a,), x)
        hyps = (seq1((a,), x), seq1((b,), x))
        tree = ProofNode(HYP, hyps[0], aux=0)
        err = check_vdash(VdashDerivation(root, hyps, tree))
        assert err == "unused hypothesis"

    def test_fresh_variable_violation(self):
        root = seq1((x,), x)
        tree = ProofNode(HYP, root, aux=0)
        err = check_vdash(VdashDerivation(root, (root,), tree))
        assert err is not None and "fresh" in err

    def test_right_rule_fuzz(self):
        # take the valid join derivation and splice one right rule in
        root = seq1((Join(a, b),), x)
        hyps = (seq1((a,), x), seq1((b,), x))
        bad_child = ProofNode(PROD_R, seq1((a,), x), premises=(ax(a), ProofNode(HYP, seq1((), x), aux=0)), aux=1)
        tree = ProofNode(JOIN_L, root, premises=(bad_child, ProofNode(HYP, hyps[1], aux=1)), aux=0)
        err = check_vdash(VdashDerivation(root, hyps, tree))
        assert err is not None


class TestSchemas:
    def _template_cert(self):
        conclusion = seq1((Star(a),), Star(a))
        fam = SequentFamily((), (a,), Star(a))
        template = TemplateNode(
            STAR_R,
            conclusion=fam,
            rep_premise=TemplateNode(AX, seq1((a,), a)),
            aux=RepBlocks((), (1,)),
        )
        return ProofNode(STAR_L, conclusion, aux=0, schema=PremiseSchema("n", template=template))

    def _instances_cert(self, count):
        conclusion = seq1((Star(a),), Star(a))
        instances = tuple(
            ProofNode(STAR_R, seq1((a,) * n, Star(a)), premises=(ax(a),) * n, aux=(1,) * n)
            for n in range(count)
        )
        return ProofNode(STAR_L, conclusion, aux=0, schema=PremiseSchema("n", instances=instances))

    def test_template_schema_checked(self):
        assert check_proof(self._template_cert(), 8) == SchemaChecked(8)

    def test_template_monotone_in_bound(self):
        cert = self._template_cert()
        for k in (0, 1, 3, 8, 12):
            assert check_proof(cert, k) == SchemaChecked(k)

    def test_instances_schema_capped_by_count(self):
        cert = self._instances_cert(4)
        assert check_proof(cert, 8) == SchemaChecked(3)
        assert check_proof(cert, 2) == SchemaChecked(2)

    def test_broken_instance_rejected(self):
        cert = self._instances_cert(4)
        bad = ProofNode(
            STAR_L,
            cert.conclusion,
            aux=0,
            schema=PremiseSchema("n", instances=cert.schema.instances[:2] + (ax(a),) + cert.schema.instances[3:]),
        )
        assert isinstance(check_proof(bad, 8), Rejected)

    def test_fully_checked_stable_under_bound(self):
        cert = cert_looping_quotient()
        for k in (0, 3, 8):
            assert check_proof(cert, k) == FullyChecked()


class TestInvert:
    def test_prod_left(self):
        assert invert(parse_sequent("a . b |- c")) == [parse_sequent("a, b |- c")]

    def test_period_join_stays_lazy(self):
        got = invert(parse_sequent("(a | b)^w |- c^w"))
        assert got == [parse_sequent("{a | b} |- c^w")]

    def test_fixpoint(self):
        assert invert(parse_sequent("p |- p")) == [parse_sequent("p |- p")]

    def test_star_reported_as_family(self):
        (fam,) = invert(parse_sequent("a*, b |- c"))
        assert isinstance(fam, SequentFamily)
        assert fam.member(1) == parse_sequent("a, b |- c")

    def test_saturation_chains(self):
        got = invert(parse_sequent("a . b, a1 | a2 |- c & p"))
        assert len(got) == 4  # two join branches times two meet conjuncts
        assert parse_sequent("a, b, a1 |- c") in got
        assert parse_sequent("a, b, a2 |- p") in got

    def test_residual_right_rules(self):
        assert invert(parse_sequent("a |- p / q")) == [parse_sequent("a, q |- p")]
        assert invert(parse_sequent("{a} |- q \\ p^w")) == [parse_sequent("q, {a} |- p^w")]


class TestDuality:
    def test_omega_axiom_roundtrip_random(self):
        rng = random.Random(3)

        def random_star_formula(depth):
            if depth == 0:
                return rng.choice([p, q, a, b])
            kind = rng.choice(["var", "prod", "join", "meet", "over", "under", "star"])
            if kind == "var":
                return rng.choice([p, q, a, b])
            if kind == "star":
                return Star(random_star_formula(depth - 1))
            l, r = random_star_formula(depth - 1), random_star_formula(depth - 1)
            return {"prod": Prod, "join": Join, "meet": Meet, "over": Over, "under": Under}[kind](l, r)

        for _ in range(20):
            f = random_star_formula(2)
            s0 = seq3((), Omega(f), Omega(f))
            s1 = seq2((), (f,), Omega(f))
            cert = ProofNode(
                OMEGA_L,
                s0,
                premises=(
                    ProofNode(OMEGA_R, s1, premises=(ax(f),), aux=PeriodicSplit((), (1,))),
                ),
                aux=0,
            )
            assert check_proof(cert) == FullyChecked()


class TestGoalCoherence:
    CASES = [
        ("a . b, q |- c", PROD_L, 0),
        ("a, a1 & a2 |- c", MEET_L, (1, 2)),
        ("a1 | a2 |- c", JOIN_L, 0),
        ("q, q \\ p |- p", UNDER_L, (0, 1)),
        ("p/q, q |- p", OVER_L, (0, 1)),
        ("q^w |- p^w", OMEGA_L, 0),
        ("a, b |- a . b", PROD_R, 1),
        ("a, q, {b} |- c . p^w", PROD_R, 2),
        ("|- a*", STAR_R, ()),
        ("a, a |- a*", STAR_R, (1, 1)),
    ]

    @pytest.mark.parametrize("text,rule,aux", CASES)
    def test_stub_reassembly_checks_node_locally(self, text, rule, aux):
        s = parse_sequent(text)
        goals = apply_rule_backward(s, rule, aux)
        # reassemble with each goal stubbed by itself as an assumed leaf:
        # the node-local consistency is what the checker recomputes, so a
        # tree whose stubs are genuine proofs must pass below this node
        def prove_stub(goal):
            if goal.kind == 1 and len(goal.ante.prefix) == 1 and goal.ante.prefix[0] == goal.succ:
                return ax(goal.succ)
            return None

        node = ProofNode(rule, s, premises=tuple(
            prove_stub(g) or ProofNode(AX, g) for g in goals
        ), aux=aux)
        verdict = check_proof(node)
        if all(prove_stub(g) is not None for g in goals):
            assert verdict == FullyChecked()
        else:
            # stubs that are not real axioms must be flagged exactly there
            assert isinstance(verdict, Rejected)
            assert "axiom" in verdict.reason or "mismatch" in verdict.reason
