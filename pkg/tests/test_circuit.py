import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import random_labels, random_partitioned_cnf
from nestedamc.cnf import LabeledCnf, enumerate_models
from nestedamc.circuit import (
    Circuit,
    EvaluationRefused,
    NestedInstance,
    Node,
    brute_force_nested,
    circuit_models,
    count_boundary_nodes,
    count_models,
    emit_nnf,
    evaluate_nested,
    evaluate_verified,
    parse_nnf,
    smooth,
    verify_circuit,
)
from nestedamc.definability import defined_vars
from nestedamc.errors import CapacityError, ConfigError, ParseError, PreconditionError
from nestedamc.semirings import SemiringId, TransformId

LEX_CLAUSES = [(-1, 3), (1, -3), (-2, 4), (2, -4)]  # a<->c, b<->d


class Builder:
    def __init__(self):
        self.nodes = []

    def lit(self, l):
        self.nodes.append(Node("L", lit=l))
        return len(self.nodes) - 1

    def and_(self, *cs):
        self.nodes.append(Node("A", children=tuple(cs)))
        return len(self.nodes) - 1

    def or_(self, v, *cs):
        self.nodes.append(Node("O", dvar=v, children=tuple(cs)))
        return len(self.nodes) - 1

    def circuit(self, root, num_vars):
        return Circuit(self.nodes, root, num_vars)


def fig_left():
    """{a,b}-first circuit for the two-biconditional theory."""
    b = Builder()
    a, na = b.lit(1), b.lit(-1)
    bb, nb = b.lit(2), b.lit(-2)
    c, nc = b.lit(3), b.lit(-3)
    d, nd = b.lit(4), b.lit(-4)
    o20 = b.or_(2, b.and_(bb, b.and_(c, d)), b.and_(nb, b.and_(c, nd)))
    o21 = b.or_(2, b.and_(bb, b.and_(nc, d)), b.and_(nb, b.and_(nc, nd)))
    root = b.or_(1, b.and_(a, o20), b.and_(na, o21))
    return b.circuit(root, 4)


def fig_right():
    """Equivalent circuit deciding a together with c, sharing the {b,d} part."""
    b = Builder()
    a, na = b.lit(1), b.lit(-1)
    bb, nb = b.lit(2), b.lit(-2)
    c, nc = b.lit(3), b.lit(-3)
    d, nd = b.lit(4), b.lit(-4)
    shared = b.or_(2, b.and_(bb, d), b.and_(nb, nd))
    root = b.or_(1, b.and_(b.and_(a, c), shared), b.and_(b.and_(na, nc), shared))
    return b.circuit(root, 4)


def aex_instance():
    return NestedInstance(
        LabeledCnf(
            4,
            LEX_CLAUSES,
            outer_vars=frozenset([3]),
            inner_label={1: 0.4, -1: 0.6, 2: 0.6, -2: 0.4},
            inner_sr=SemiringId.PROBABILITY,
            outer_sr=SemiringId.MAX_TIMES,
            transform=TransformId.IDENTITY,
        )
    )


def succ_instance():
    return NestedInstance(
        LabeledCnf(
            4,
            LEX_CLAUSES,
            inner_label={1: 0.4, -1: 0.6, 2: 0.6, -2: 0.4, -3: 0.0},
        )
    )


# ------------------------------------------------------------------- format


def test_parse_tautology_circuit():
    c = parse_nnf("nnf 3 2 2\nL 1\nL -1\nO 1 2 0 1\n")
    assert c.node_count == 3
    assert c.nodes[2].dvar == 1
    assert count_models(c, over=frozenset([1])) == 2


def test_parse_rejects_forward_reference():
    with pytest.raises(ParseError) as e:
        parse_nnf("nnf 2 1 1\nA 1 1\nL 1\n")
    assert e.value.line == 2


def test_parse_rejects_self_reference():
    with pytest.raises(ParseError):
        parse_nnf("nnf 1 1 1\nO 1 1 0\n")


def test_roundtrip_preserves_models():
    circ = fig_right()
    again = parse_nnf(emit_nnf(circ))
    assert circuit_models(again, over=frozenset(range(1, 5))) == circuit_models(
        circ, over=frozenset(range(1, 5))
    )
    assert emit_nnf(again) == emit_nnf(circ)


def test_true_false_spellings():
    c = parse_nnf("nnf 2 0 1\nA 0\nO 0 0\n")
    assert c.nodes[0].kind == "A" and not c.nodes[0].children
    assert count_models(c, over=frozenset()) == 0  # root is the false node


@st.composite
def circuits(draw):
    num_vars = draw(st.integers(1, 5))
    nodes = [Node("L", lit=draw(st.sampled_from([v, -v])))
             for v in range(1, num_vars + 1)]
    for _ in range(draw(st.integers(0, 8))):
        k = draw(st.integers(0, min(3, len(nodes))))
        children = tuple(sorted(draw(
            st.sets(st.integers(0, len(nodes) - 1), min_size=k, max_size=k)
        )))
        if draw(st.booleans()):
            nodes.append(Node("A", children=children))
        else:
            dvar = draw(st.integers(0, num_vars))
            nodes.append(Node("O", dvar=dvar, children=children))
    return Circuit(nodes, len(nodes) - 1, num_vars)


@given(circuits())
@settings(max_examples=150, deadline=None)
def test_roundtrip_is_identity_on_random_circuits(circ):
    again = parse_nnf(emit_nnf(circ))
    assert [n for n in again.nodes] == [n for n in circ.nodes]
    assert again.root == circ.root
    assert again.num_vars == circ.num_vars


def test_emit_reorders_when_root_is_not_last():
    # hash-consing during smoothing can map the root of a circuit with
    # duplicate nodes onto an earlier id; emission must keep the root last
    dup = parse_nnf("nnf 3 0 1\nL 1\nL -1\nL 1\n")
    sm = smooth(dup)
    assert sm.root != len(sm.nodes) - 1  # the duplicate collapsed
    again = parse_nnf(emit_nnf(sm))
    assert circuit_models(again, over=frozenset([1])) == circuit_models(
        sm, over=frozenset([1])
    )
    assert again.nodes[again.root] == sm.nodes[sm.root]


# ---------------------------------------------------------------- smoothing


def test_smooth_pads_missing_variable():
    b = Builder()
    x, nx_ = b.lit(1), b.lit(-1)
    d = b.lit(2)
    root = b.or_(1, b.and_(x, d), nx_)  # ~x branch forgets variable 2
    circ = b.circuit(root, 2)
    sm = smooth(circ)
    masks = sm.masks()
    for nd in sm.nodes:
        if nd.kind == "O" and nd.children:
            assert len({masks[c] for c in nd.children}) == 1
    assert circuit_models(sm, over=frozenset([1, 2])) == circuit_models(
        circ, over=frozenset([1, 2])
    )


def test_smooth_idempotent_on_smooth_circuit():
    circ = smooth(fig_right())
    again = smooth(circ)
    assert again.node_count == circ.node_count


def test_smooth_fig_right_or_children_align():
    sm = smooth(fig_right())
    masks = sm.masks()
    for nd in sm.nodes:
        if nd.kind == "O" and nd.children:
            assert len({masks[c] for c in nd.children}) == 1


# --------------------------------------------------------------- evaluation


def test_aex_on_conforming_circuit():
    val = evaluate_nested(smooth(fig_right()), aex_instance())
    assert val == pytest.approx(0.6, rel=1e-9)


def test_aex_left_circuit_fails_partition_precondition():
    # the {a,b}-first circuit is not {c}-first modulo definability, and the
    # verifier must say so; its tag-driven evaluation would be wrong
    inst = aex_instance()
    d = defined_vars(inst.cnf, inst.cnf.outer_vars).defined
    report = verify_circuit(smooth(fig_left()), inst.cnf, d)
    assert not report.outer_first
    assert not report.outer_first_mod_defs
    assert report.model_equivalent
    with pytest.raises(EvaluationRefused) as e:
        evaluate_verified(smooth(fig_left()), inst, d)
    assert e.value.report.outer_first_mod_defs is False
    # the conforming circuit passes through the same guarded entry point
    assert evaluate_verified(smooth(fig_right()), inst, d) == pytest.approx(0.6)


def test_succ_as_degenerate_instance():
    for circ in (fig_left(), fig_right()):
        val = evaluate_nested(smooth(circ), succ_instance())
        assert val == pytest.approx(0.4, rel=1e-9)


def test_evaluation_invariant_under_child_shuffle():
    rng = random.Random(4)
    inst = succ_instance()
    base = smooth(fig_left())
    for _ in range(10):
        shuffled = []
        for nd in base.nodes:
            cs = list(nd.children)
            rng.shuffle(cs)
            shuffled.append(Node(nd.kind, nd.lit, nd.dvar, tuple(cs)))
        circ = Circuit(shuffled, base.root, base.num_vars, base.variables)
        assert evaluate_nested(circ, inst) == pytest.approx(0.4, rel=1e-9)


def test_mixed_or_children_rejected():
    b = Builder()
    root = b.or_(0, b.lit(1), b.lit(2))
    circ = b.circuit(root, 2)
    inst = NestedInstance(LabeledCnf(2, [(1, 2)], outer_vars=frozenset([1])))
    with pytest.raises(PreconditionError):
        evaluate_nested(circ, inst)


def test_instance_header_coherence():
    with pytest.raises(ConfigError):
        NestedInstance(
            LabeledCnf(
                1, [], inner_sr=SemiringId.EU, outer_sr=SemiringId.PROBABILITY,
                transform=TransformId.EU_PROJECT,
            )
        )
    with pytest.raises(ConfigError):
        NestedInstance(
            LabeledCnf(
                1, [], inner_sr=SemiringId.PROBABILITY,
                outer_sr=SemiringId.MAP_ARGMAX, transform=TransformId.IDENTITY,
            )
        )


# -------------------------------------------------------------- brute force


def test_brute_force_aex():
    assert brute_force_nested(aex_instance()) == pytest.approx(0.6, rel=1e-9)


def test_brute_force_empty_theory():
    inst = NestedInstance(LabeledCnf(0, []))
    assert brute_force_nested(inst) == 1.0


def test_brute_force_capacity_guard():
    inst = NestedInstance(LabeledCnf(25, []))
    with pytest.raises(CapacityError):
        brute_force_nested(inst)


def test_brute_force_meu_golden():
    # ?::a, 0.6::b, c:-a, d:-b, utility(c,40), utility(~d,20)
    cnf = LabeledCnf(
        4,
        LEX_CLAUSES,
        outer_vars=frozenset([1]),
        inner_label={
            2: (0.6, 0.0), -2: (0.4, 0.0),
            3: (1.0, 40.0), -4: (1.0, 20.0),
        },
        outer_label={1: (0.0, frozenset([1])), -1: (0.0, frozenset([-1]))},
        inner_sr=SemiringId.EU,
        outer_sr=SemiringId.MEU_ARGMAX,
        transform=TransformId.EU_PROJECT,
    )
    val = brute_force_nested(NestedInstance(cnf))
    assert val[0] == pytest.approx(48.0, rel=1e-9)
    assert val[1] == frozenset([1])


# ------------------------------------------------------------- verification


def test_fig_left_is_ab_first():
    cnf = LabeledCnf(4, LEX_CLAUSES, outer_vars=frozenset([1, 2]))
    d = defined_vars(cnf, cnf.outer_vars).defined
    assert d == frozenset([3, 4])
    rep = verify_circuit(smooth(fig_left()), cnf, d)
    assert rep.outer_first and rep.outer_first_mod_defs
    assert rep.decomposable and rep.deterministic and rep.smooth
    assert rep.model_equivalent


def test_fig_right_is_only_mod_defs_first():
    cnf = LabeledCnf(4, LEX_CLAUSES, outer_vars=frozenset([1, 2]))
    d = defined_vars(cnf, cnf.outer_vars).defined
    rep = verify_circuit(smooth(fig_right()), cnf, d)
    assert not rep.outer_first
    assert rep.outer_first_mod_defs
    assert rep.model_equivalent


def test_verifier_flags_nondecision_or():
    # a two-child or-node without decision structure but still deterministic
    b = Builder()
    root = b.or_(0, b.and_(b.lit(1), b.lit(2)), b.and_(b.lit(-1), b.lit(-2)))
    circ = b.circuit(root, 2)
    rep = verify_circuit(circ, LabeledCnf(2, [(1, -2), (-1, 2)]))
    assert rep.deterministic  # proved by the satisfiability fallback
    b2 = Builder()
    root2 = b2.or_(0, b2.lit(1), b2.lit(2))
    rep2 = verify_circuit(b2.circuit(root2, 2), LabeledCnf(2, [(1, 2)]))
    assert not rep2.deterministic


def test_boundary_node_count():
    circ = fig_left()
    assert count_boundary_nodes(circ, frozenset([1, 2])) == 4


def test_count_models_with_dont_cares():
    b = Builder()
    root = b.or_(1, b.lit(1), b.lit(-1))
    circ = b.circuit(root, 3)
    assert count_models(circ, over=frozenset([1, 2, 3])) == 8


def test_no_outer_vars_reduces_to_plain_counting():
    # with an empty outer set and identity transform the evaluator is plain
    # algebraic model counting: sum over models of the label products
    from nestedamc.compiler import CompileConfig, compile_cnf
    from nestedamc.treedecomp import VariableOrder

    rng = random.Random(361)
    for _ in range(40):
        cnf = random_labels(rng, random_partitioned_cnf(rng, max_vars=10, max_clauses=20))
        cnf = LabeledCnf(cnf.num_vars, cnf.clauses, inner_label={
            l: w for l, w in {**cnf.inner_label, **cnf.outer_label}.items()
        })
        circ = compile_cnf(cnf, CompileConfig(VariableOrder(tuple(sorted(cnf.variables)))))
        val = evaluate_nested(smooth(circ), NestedInstance(cnf))
        direct = 0.0
        for m in enumerate_models(cnf):
            prod = 1.0
            for l in m:
                prod *= cnf.inner_weight(l)
            direct += prod
        assert val == pytest.approx(direct, rel=1e-6, abs=1e-12)


# ------------------------------------------------- random oracle cross-check


def test_random_identity_instances_match_oracle():
    rng = random.Random(77)
    for _ in range(150):
        cnf = random_labels(rng, random_partitioned_cnf(rng, max_vars=10, max_clauses=20))
        inst = NestedInstance(cnf)
        val = brute_force_nested(inst)
        # independent re-derivation straight from the definition via the
        # model enumerator, only feasible because the transform is identity
        total = 0.0
        for outer_bits in range(1 << len(cnf.outer_vars)):
            outer_sorted = sorted(cnf.outer_vars)
            x_o = frozenset(
                v if outer_bits >> j & 1 else -v for j, v in enumerate(outer_sorted)
            )
            inner_sum = 0.0
            for m in enumerate_models(cnf):
                if x_o <= m:
                    prod = 1.0
                    for l in m:
                        if abs(l) not in cnf.outer_vars:
                            prod *= cnf.inner_weight(l)
                    inner_sum += prod
            term = inner_sum
            for l in x_o:
                term *= cnf.outer_weight(l)
            total += term
        assert val == pytest.approx(total, rel=1e-6, abs=1e-12)
