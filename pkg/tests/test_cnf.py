import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import random_cnf
from nestedamc.cnf import (
    LabeledCnf,
    PartialAssignment,
    condition,
    emit_cnf,
    enumerate_models,
    parse_cnf,
    primal_graph,
)
from nestedamc.errors import CapacityError, ParseError, PreconditionError
from nestedamc.semirings import SemiringId, TransformId

LEX_COMPLETION = """\
p cnf 4 4
c s probability maxtimes identity
c o 3 0
c n 1 a
c n 2 b
c n 3 c
c n 4 d
c wi 1 0.4 0
c wi -1 0.6 0
c wi 2 0.6 0
c wi -2 0.4 0
-1 3 0
1 -3 0
-2 4 0
2 -4 0
"""


def lex_cnf():
    return parse_cnf(LEX_COMPLETION)


def test_parse_lex_completion():
    cnf = lex_cnf()
    assert cnf.num_vars == 4
    assert cnf.outer_vars == frozenset([3])
    assert cnf.inner_sr is SemiringId.PROBABILITY
    assert cnf.outer_sr is SemiringId.MAX_TIMES
    assert cnf.transform is TransformId.IDENTITY
    assert cnf.inner_weight(1) == 0.4
    assert cnf.inner_weight(4) == 1.0  # default multiplicative identity
    assert cnf.names[3] == "c"
    assert len(cnf.clauses) == 4


def test_parse_empty_theory():
    cnf = parse_cnf("p cnf 0 0\nc s probability probability identity\n")
    assert cnf.num_vars == 0
    assert list(enumerate_models(cnf)) == [frozenset()]


def test_parse_weight_out_of_range():
    text = "p cnf 6 1\nc wi 7 0.5 0\n1 2 0\n"
    with pytest.raises(ParseError) as e:
        parse_cnf(text)
    assert e.value.line == 2


def test_parse_duplicate_weight():
    text = "p cnf 2 0\nc wi 1 0.5 0\nc wi 1 0.4 0\n"
    with pytest.raises(ParseError):
        parse_cnf(text)


def test_parse_bad_arity():
    text = "p cnf 2 0\nc s eu probability euproject\nc wi 1 0.5 0\n"
    with pytest.raises(ParseError):
        parse_cnf(text)


def test_parse_clause_literal_out_of_range():
    with pytest.raises(ParseError):
        parse_cnf("p cnf 2 1\n1 3 0\n")


def test_parse_drops_tautologies():
    cnf = parse_cnf("p cnf 2 2\n1 -1 0\n1 2 0\n")
    assert cnf.clauses == [(1, 2)]


def test_unknown_comment_lines_ignored():
    cnf = parse_cnf("p cnf 1 0\nc anything goes here\nc x y 0\n")
    assert cnf.num_vars == 1


def test_parse_scientific_notation_weights():
    cnf = parse_cnf("p cnf 2 0\nc wi 1 4e-1 0\nc wi -1 6.0E-1 0\n")
    assert cnf.inner_weight(1) == pytest.approx(0.4)
    assert cnf.inner_weight(-1) == pytest.approx(0.6)


def test_parse_counting_pair_labels():
    text = (
        "p cnf 2 1\n"
        "c s natpair probability ratio\n"
        "c o 1 0\n"
        "c wi -2 0 1 0\n"
        "c wo 1 0.25 0\n"
        "c wo -1 0.75 0\n"
        "1 2 0\n"
    )
    cnf = parse_cnf(text)
    assert cnf.inner_weight(-2) == (0, 1)
    assert cnf.inner_weight(2) == (1, 1)
    assert cnf.outer_weight(1) == 0.25
    assert parse_cnf(emit_cnf(cnf)) == cnf


def test_roundtrip_identity():
    cnf = lex_cnf()
    again = parse_cnf(emit_cnf(cnf))
    assert again == cnf
    assert emit_cnf(again) == emit_cnf(cnf)


def test_partial_assignment_consistency():
    with pytest.raises(PreconditionError):
        PartialAssignment([1, -1])
    assert PartialAssignment([1, -2]).variables() == frozenset([1, 2])


def test_condition_biconditional():
    cnf = LabeledCnf(2, [(-1, 2), (1, -2)])  # a <-> c
    out = condition(cnf, PartialAssignment([1]))
    assert out.clauses == [(2,)]
    assert out.variables == frozenset([2])


def test_condition_empty_assignment_is_identity():
    cnf = lex_cnf()
    out = condition(cnf, PartialAssignment([]))
    assert out == cnf


def test_condition_can_produce_empty_clause():
    cnf = LabeledCnf(2, [(1, 2), (-1,)])
    out = condition(cnf, PartialAssignment([1]))
    assert () in out.clauses


def test_condition_unknown_variable_rejected():
    cnf = LabeledCnf(2, [(1, 2)])
    with pytest.raises(PreconditionError):
        condition(cnf, PartialAssignment([5]))


def test_primal_two_disjoint_edges():
    g = primal_graph(lex_cnf())
    assert sorted(g.edges) == [(1, 3), (2, 4)]


def test_primal_clause_is_clique():
    g = primal_graph(LabeledCnf(3, [(1, 2, 3)]))
    assert sorted(g.edges) == [(1, 2), (1, 3), (2, 3)]


def test_primal_empty_theory():
    g = primal_graph(LabeledCnf(3, []))
    assert g.number_of_edges() == 0
    assert sorted(g.nodes) == [1, 2, 3]


def test_primal_symmetric_irreflexive():
    rng = random.Random(0)
    for _ in range(50):
        g = primal_graph(random_cnf(rng, max_vars=10, max_clauses=15))
        assert all(u != v for u, v in g.edges)
        assert isinstance(g, nx.Graph)


def test_enumerate_lex_models_in_order():
    models = list(enumerate_models(lex_cnf()))
    expected = [
        frozenset([1, 2, 3, 4]),
        frozenset([1, -2, 3, -4]),
        frozenset([-1, 2, -3, 4]),
        frozenset([-1, -2, -3, -4]),
    ]
    assert models == expected


def test_enumerate_unconstrained():
    assert len(list(enumerate_models(LabeledCnf(2, [])))) == 4


def test_enumerate_contradiction():
    assert list(enumerate_models(LabeledCnf(1, [(1,), (-1,)]))) == []


def test_enumerate_capacity_guard():
    with pytest.raises(CapacityError):
        list(enumerate_models(LabeledCnf(31, []), max_vars=30))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_condition_commutes_with_enumeration(seed):
    rng = random.Random(seed)
    cnf = random_cnf(rng, max_vars=12, max_clauses=20, min_vars=2)
    k = rng.randint(1, cnf.num_vars)
    chosen = rng.sample(range(1, cnf.num_vars + 1), k)
    lits = frozenset(v if rng.random() < 0.5 else -v for v in chosen)
    y = PartialAssignment(lits)

    conditioned = frozenset(enumerate_models(condition(cnf, y)))
    projected = frozenset(
        frozenset(l for l in m if abs(l) not in y.variables())
        for m in enumerate_models(cnf)
        if lits <= m
    )
    assert conditioned == projected
