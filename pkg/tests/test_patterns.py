import pytest

from core.exceptions import BudgetExceededError, MalformedPayloadError, ValidationError
from models.patterns import Certificate, InpArray, LabeledTree, PatternKind
from models.tree import TreeShape
from services.generators import block_cdt, block_level_cdt, block_tree
from services.pattern_service import (
    PatternService,
    consistent_subfamilies,
    inconsistency_degree,
    is_consistent,
    is_k_inconsistent,
)


def sets(*members):
    return [frozenset(m) for m in members]


def test_consistency():
    assert is_consistent([])
    assert is_consistent(sets({0, 1}, {1}))
    assert not is_consistent(sets({0}, {1}))


def test_k_inconsistency():
    assert is_k_inconsistent(sets({0}, {1}, {2}), 2)
    triangle = sets({0, 1}, {1, 2}, {0, 2})
    assert not is_k_inconsistent(triangle, 2)
    assert is_k_inconsistent(triangle, 3)
    assert inconsistency_degree(triangle) == 3
    # fewer than k sets: vacuously k-inconsistent
    assert is_k_inconsistent(sets({0}), 2)
    with pytest.raises(ValidationError):
        is_k_inconsistent(triangle, 1)


def test_consistent_subfamilies_in_lex_order():
    family = sets({0, 1}, {1, 2}, {0, 2}, {1})
    assert list(consistent_subfamilies(family, 2)) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]


def test_canonical_sop2(pattern_service):
    c = pattern_service.canonical_witness(PatternKind.SOP2, TreeShape(2, 2))
    assert c.ok
    assert c.payload.domain_size == 2
    assert c.payload.label((0,)) == frozenset({0})
    assert c.payload.label((1,)) == frozenset({1})


def test_empty_leaf_label_breaks_the_path(pattern_service):
    c = pattern_service.canonical_witness(PatternKind.SOP2, TreeShape(2, 3))
    assert c.ok
    labels = dict(c.payload.labels)
    labels[(0, 0)] = frozenset()
    broken = pattern_service.verify(Certificate(PatternKind.SOP2, {}, c.payload.with_labels(labels)))
    assert not broken.ok
    assert [v.rule for v in broken.verdict.violations] == ['path']
    assert broken.verdict.violations[0].nodes == ((0, 0),)


@pytest.mark.parametrize('k', [2, 3])
def test_tp1_implies_weak_ktp1(pattern_service, k):
    c = pattern_service.canonical_witness(PatternKind.TP1, TreeShape(3, 3))
    assert c.ok
    assert pattern_service.verify(c.as_kind(PatternKind.WEAK_KTP1, {'k': k})).ok
    assert pattern_service.verify(c.as_kind(PatternKind.KTP1, {'k': k})).ok


def test_full_labels_fail_tp(pattern_service):
    shape = TreeShape(2, 2)
    tree = LabeledTree(shape, 1, {node: frozenset({0}) for node in shape.labeled_nodes})
    c = pattern_service.verify(Certificate(PatternKind.TP, {'k': 2}, tree))
    assert not c.ok
    assert c.verdict.violations[0].rule == 'siblings'
    assert not pattern_service.verify(Certificate(PatternKind.SOP1, {}, tree)).ok
    assert pattern_service.verify(Certificate(PatternKind.CDT, {'bounds': [3]}, tree)).ok


def test_violation_cap(pattern_service):
    shape = TreeShape(3, 3)
    tree = LabeledTree(shape, 1, {node: frozenset({0}) for node in shape.labeled_nodes})
    c = pattern_service.verify(Certificate(PatternKind.TP1, {}, tree), cap=2)
    assert not c.ok
    assert len(c.verdict.violations) == 2
    assert c.verdict.truncated
    assert not pattern_service.verify(Certificate(PatternKind.TP1, {}, tree), cap=0).ok


def test_params_are_checked(pattern_service):
    tree = pattern_service.path_tree(TreeShape(2, 3))
    with pytest.raises(MalformedPayloadError):
        pattern_service.verify(Certificate(PatternKind.TP, {}, tree))
    with pytest.raises(MalformedPayloadError):
        pattern_service.verify(Certificate(PatternKind.CDT, {'bounds': [2]}, tree))
    with pytest.raises(MalformedPayloadError):
        pattern_service.verify(Certificate(PatternKind.TP, {'k': 1}, tree))
    with pytest.raises(MalformedPayloadError):
        pattern_service.verify(Certificate(PatternKind.INP, {'bounds': [2, 2]}, tree))
    with pytest.raises(MalformedPayloadError):
        pattern_service.verify(Certificate(PatternKind.SOP2, {}, pattern_service.path_tree(TreeShape(3, 2))))


def test_labels_must_cover_the_shape():
    with pytest.raises(MalformedPayloadError):
        LabeledTree(TreeShape(2, 2), 2, {(0,): frozenset({0})})
    with pytest.raises(MalformedPayloadError):
        LabeledTree(TreeShape(2, 2), 1, {(0,): frozenset({0}), (1,): frozenset({3})})


def test_canonical_tp2(pattern_service):
    c = pattern_service.canonical_witness(PatternKind.TP2, dims=(2, 2))
    assert c.ok
    assert c.params == {'k': 2}
    assert c.payload.domain_size == 4
    assert c.payload.cell(0, 0) == frozenset({0, 1})
    assert c.payload.cell(1, 1) == frozenset({1, 3})


def test_array_violations(pattern_service):
    array = InpArray(2, 2, 2, (sets({0}, {0}), sets({0}, {1})))
    c = pattern_service.verify(Certificate(PatternKind.INP, {'bounds': [2, 2]}, array))
    rules = {v.rule for v in c.verdict.violations}
    assert rules == {'row', 'transversal'}


def test_canonical_witness_budget(test_settings):
    service = PatternService(test_settings.model_copy(update={'canonical_node_budget': 10}))
    with pytest.raises(BudgetExceededError):
        service.canonical_witness(PatternKind.TP1, TreeShape(2, 4))
    with pytest.raises(ValidationError):
        service.canonical_witness(PatternKind.CDT, TreeShape(2, 2))


def test_cdt_from_inp(pattern_service):
    tp2 = pattern_service.canonical_witness(PatternKind.TP2, dims=(2, 2))
    c = pattern_service.cdt_from_inp(tp2)
    assert c.kind is PatternKind.CDT
    assert c.payload.shape == TreeShape(2, 3)
    assert c.ok


def test_block_trees(pattern_service):
    tree = block_tree(2, [2])
    assert tree.label((0,)) == tree.label((1,))
    assert pattern_service.verify(block_cdt(4, [2, 1, 4])).ok
    assert pattern_service.verify(block_level_cdt(4, [2, 1, 1, 1])).ok
    assert block_level_cdt(4, [2, 1, 1, 1]).params == {'k': 3}
