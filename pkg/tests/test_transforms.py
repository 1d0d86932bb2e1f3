import pytest

from core.exceptions import InternalInvariantError, InvalidInputError, ShapeInsufficiencyError, ValidationError
from models.patterns import Certificate, LabeledTree, PatternKind
from models.tree import TreeShape
from services.generators import block_cdt, block_inp, block_level_cdt, block_tree
from services.transform_service import TRANSFORM_NAMES, run_transform


def aleph1_example():
    """Labels <i> = {0..3} minus {i}, <i, j> = <i> & <j> on the 4x3 shape."""
    shape = TreeShape(4, 3)
    full = frozenset(range(4))
    labels = {}
    for node in shape.labeled_nodes:
        label = full
        for i in node:
            label = label - {i}
        labels[node] = label
    return Certificate(PatternKind.CDT, {'bounds': [4, 4]}, LabeledTree(shape, 4, labels))


def test_path_normalize(transform_service):
    c = block_cdt(2, [1, 1])
    out = transform_service.path_normalize(c)
    assert out.ok
    assert out.kind is PatternKind.CDT
    tree = out.payload
    assert all(tree.label(node) == tree.path_intersections[node] for node in tree.shape.labeled_nodes)


def test_cdt2_to_sct(transform_service):
    out = transform_service.cdt2_to_sct(block_cdt(3, [1, 1]))
    assert out.kind is PatternKind.SCT
    assert out.ok
    assert out.provenance.transform == 'cdt2_to_sct'


def test_cdt2_to_sct_needs_bound_two(transform_service):
    with pytest.raises(ValidationError):
        transform_service.cdt2_to_sct(block_cdt(4, [2, 1]))


def test_invalid_input_is_rejected(transform_service, pattern_service):
    shape = TreeShape(2, 3)
    tree = LabeledTree(shape, 1, {node: frozenset({0}) for node in shape.labeled_nodes})
    with pytest.raises(InvalidInputError) as info:
        transform_service.cdt2_to_sct(Certificate(PatternKind.CDT_N, {'n': 2}, tree))
    assert info.value.violations


def test_sctk_step_widens_when_a_block_is_consistent(transform_service):
    c = block_level_cdt(4, [2, 1, 1, 1])
    assert c.params == {'k': 3}
    out = transform_service.sctk_to_cdt2_step(c, 2)
    assert out.provenance.case_fired == 'widen-restrict(i=0)'
    assert out.kind is PatternKind.CDT_LEVEL
    assert out.params == {'k': 2}
    assert out.payload.shape == TreeShape(2, 3)
    assert out.payload.label((0,)).isdisjoint(out.payload.label((1,)))


@pytest.mark.parametrize('widths', [[2], [2, 1, 1, 1]])
def test_sctk_step_rejects_widening_a_binary_tree(transform_service, widths):
    m = 1 if len(widths) == 1 else 2
    with pytest.raises(ShapeInsufficiencyError, match='branching at least 4'):
        transform_service.sctk_to_cdt2_step(block_level_cdt(2, widths), m)
    with pytest.raises(ShapeInsufficiencyError):
        transform_service.sctk_to_cdt2(block_level_cdt(2, widths))


def test_sctk_to_cdt2_single_round(transform_service):
    out = transform_service.sctk_to_cdt2(block_level_cdt(4, [2, 1, 1, 1]))
    assert out.kind is PatternKind.CDT_N
    assert out.params == {'n': 2}
    assert out.ok
    assert len(out.provenance.notes['steps']) == 1


def test_sctk_step_elongates_when_every_block_is_split(transform_service, pattern_service):
    sct = pattern_service.canonical_witness(PatternKind.SCT, TreeShape(2, 5))
    out = transform_service.sctk_to_cdt2_step(sct, 2)
    assert out.provenance.case_fired == 'elongate'
    assert out.kind is PatternKind.CDT_N
    assert out.payload.shape == TreeShape(2, 3)
    assert out.provenance.ops_applied[0]['op'] == 'elongation'

    block = Certificate(PatternKind.SCT, {}, block_tree(2, [1, 1, 1, 1]))
    assert transform_service.sctk_to_cdt2_step(block, 2).provenance.case_fired == 'elongate'


def test_sctk_step_needs_enough_levels(transform_service, pattern_service):
    sct = pattern_service.canonical_witness(PatternKind.SCT, TreeShape(2, 4))
    with pytest.raises(ShapeInsufficiencyError):
        transform_service.sctk_to_cdt2_step(sct, 2)


def test_cdt_to_sctk_or_inp_sct_branch(transform_service, pattern_service):
    sct = pattern_service.canonical_witness(PatternKind.SCT, TreeShape(2, 5))
    out = transform_service.cdt_to_sctk_or_inp(sct, 2, 2)
    assert out.provenance.case_fired == 'sct'
    assert out.kind is PatternKind.SCT_K
    assert out.provenance.minimal_k == 2
    assert out.payload.shape == TreeShape(2, 3)


def test_cdt_to_sctk_or_inp_inp_branch(transform_service):
    c = block_cdt(2, [2, 2, 2, 2])
    out = transform_service.cdt_to_sctk_or_inp(c, 2, 2)
    assert out.provenance.case_fired == 'inp'
    assert out.kind is PatternKind.INP
    assert out.ok
    assert out.payload.rows == 2
    assert out.provenance.notes['width'] == 2


@pytest.mark.parametrize('cols', [2, 3])
def test_cdt_to_sctk_or_inp_reads_a_wide_inp_off_a_tp2_tree(transform_service, pattern_service, cols):
    tp2 = pattern_service.canonical_witness(PatternKind.TP2, dims=(4, cols))
    c = pattern_service.cdt_from_inp(tp2)
    out = transform_service.cdt_to_sctk_or_inp(c, 2, 2)
    assert out.provenance.case_fired == 'inp'
    assert out.ok
    assert out.payload.cols == cols
    assert out.provenance.notes['width'] == cols
    assert 'degenerate' not in out.provenance.notes


def test_cdt_to_sctk_or_inp_never_settles_for_one_column(transform_service):
    # level 1 is a single block, level 2 splits every sibling family
    c = block_cdt(2, [2, 1])
    with pytest.raises(InternalInvariantError, match=r"\['0', '1'\]"):
        transform_service.cdt_to_sctk_or_inp(c, 2, 1)


def test_inp_halving_pairs_columns(transform_service):
    out = transform_service.inp_halving_step(block_inp(4, [2, 2, 2, 2]), 2)
    assert out.provenance.case_fired == 'pair-columns(i=0)'
    assert out.params == {'bounds': [2, 2]}
    assert (out.payload.rows, out.payload.cols) == (2, 2)


def test_inp_halving_merges_rows(transform_service):
    out = transform_service.inp_halving_step(block_inp(2, [1, 1, 1, 1]), 2)
    assert out.provenance.case_fired == 'merge-rows'
    assert out.params == {'bounds': [2, 2]}
    assert out.ok


def test_inp_halving(transform_service):
    out = transform_service.inp_halving(block_inp(4, [2, 2, 2, 2]))
    assert out.ok
    assert max(out.params['bounds']) == 2


def test_aleph1_stage(transform_service):
    out = transform_service.aleph1_stage(aleph1_example(), 0)
    assert out.ok
    assert out.provenance.minimal_k == 2
    assert out.provenance.n_levels == 1
    assert out.payload.shape == TreeShape(2, 3)
    assert out.params == {'bounds': [2, 4]}
    assert out.payload.label((0,)) == frozenset({2, 3})
    assert out.payload.label((1,)) == frozenset({0, 1})
    assert out.provenance.notes['spine_pairwise_inconsistent']


def test_aleph1_stage_level_must_exist(transform_service):
    with pytest.raises(ValidationError):
        transform_service.aleph1_stage(aleph1_example(), 2)


def test_comb_transport(transform_service, pattern_service):
    sop2 = pattern_service.canonical_witness(PatternKind.SOP2, TreeShape(2, 4))
    for target in (TreeShape(2, 2), TreeShape(3, 2)):
        out = transform_service.comb_transport(sop2, target)
        assert out.kind is PatternKind.TP1
        assert out.ok
        assert out.payload.shape == target


def test_comb_transport_needs_depth(transform_service, pattern_service):
    sop2 = pattern_service.canonical_witness(PatternKind.SOP2, TreeShape(2, 3))
    with pytest.raises(ShapeInsufficiencyError):
        transform_service.comb_transport(sop2, TreeShape(3, 2))


def test_tp1_to_sop2(transform_service, pattern_service):
    tp1 = pattern_service.canonical_witness(PatternKind.TP1, TreeShape(3, 3))
    out = transform_service.tp1_to_sop2(tp1)
    assert out.kind is PatternKind.SOP2
    assert out.payload.shape == TreeShape(2, 3)
    assert out.ok


def test_spread_transport(transform_service, pattern_service):
    sop2 = pattern_service.canonical_witness(PatternKind.SOP2, TreeShape(2, 5))
    out = transform_service.spread_transport(sop2)
    assert out.payload.shape == TreeShape(2, 3)
    assert out.ok


def test_run_transform_by_name(transform_service, pattern_service):
    assert 'inp-halving' in TRANSFORM_NAMES
    sct = pattern_service.canonical_witness(PatternKind.SCT, TreeShape(2, 5))
    out = run_transform(transform_service, 'sctk_to_cdt2_step', sct, {'m': 2})
    assert out.provenance.case_fired == 'elongate'
    with pytest.raises(ValidationError):
        run_transform(transform_service, 'sctk-to-cdt2-step', sct, {})
    with pytest.raises(ValidationError):
        run_transform(transform_service, 'unknown', sct, {})
