import pytest

from core.exceptions import OracleError, ValidationError
from models.pfc import FinRelStructure, PfcStructure, is_embedding
from services.oracles import EquivalenceOracle, GraphOracle, fresh_name, get_oracle, glue
from services.pfc_service import (
    cover_projection,
    imaginary_cover,
    in_class,
    pasting1_build,
    pasting2_build,
    pfc_amalgamate,
)

GRAPH = (('R', 2),)
EQ = (('E', 2),)


def graph(universe, edges):
    return FinRelStructure.build(universe, GRAPH, {'R': [p for x, y in edges for p in ((x, y), (y, x))]})


def equivalence(universe, classes):
    return FinRelStructure.build(universe, EQ, {'E': [(x, y) for c in classes for x in c for y in c]})


def single(name, s):
    return PfcStructure(s.universe, (name,), s.signature, {name: s})


def test_names():
    assert fresh_name('x', {'x', "x'"}) == "x''"
    assert glue(['a', 'b'], ['a', 'b', 'c'], {'a': 'a'}) == {'a': 'a', 'b': "b'", 'c': 'c'}
    assert isinstance(get_oracle('graphs'), GraphOracle)
    assert isinstance(get_oracle('eq'), EquivalenceOracle)
    with pytest.raises(ValidationError):
        get_oracle('groups')


def test_empty_structure_is_a_member():
    empty = PfcStructure(frozenset(), (), EQ, {})
    assert in_class(empty, EquivalenceOracle())
    assert in_class(empty, GraphOracle())


def test_membership():
    oracle = EquivalenceOracle()
    broken = FinRelStructure.build(
        ['a', 'b', 'c'], EQ,
        {'E': [('a', 'a'), ('b', 'b'), ('c', 'c'), ('a', 'b'), ('b', 'a'), ('b', 'c'), ('c', 'b')]},
    )
    assert not oracle.member(broken)
    assert oracle.member(equivalence(['a', 'b', 'c'], [['a', 'b', 'c']]))
    assert not GraphOracle().member(FinRelStructure.build(['a'], GRAPH, {'R': [('a', 'a')]}))


def test_graph_amalgam_adds_no_edges():
    common = single('p', graph(['a'], []))
    left = single('p', graph(['a', 'b'], [('a', 'b')]))
    right = single('p', graph(['a', 'c'], [('a', 'c')]))
    amalgam = pfc_amalgamate(GraphOracle(), common, left, right)
    s = amalgam.structure.structure('p')
    assert s.universe == {'a', 'b', 'c'}
    assert s.holds('R', ('a', 'b')) and s.holds('R', ('c', 'a'))
    assert not s.holds('R', ('b', 'c'))


def test_amalgam_renames_clashes():
    common = PfcStructure(frozenset({'a'}), ('p',), GRAPH, {'p': graph(['a'], [])})
    left = PfcStructure(frozenset({'a', 'n'}), ('p', 'q'), GRAPH,
                        {'p': graph(['a', 'n'], [('a', 'n')]), 'q': graph(['a', 'n'], [])})
    right = PfcStructure(frozenset({'a', 'n'}), ('p', 'q'), GRAPH,
                         {'p': graph(['a', 'n'], []), 'q': graph(['a', 'n'], [('a', 'n')])})
    amalgam = pfc_amalgamate(GraphOracle(), common, left, right)
    assert amalgam.right_objects == {'a': 'a', 'n': "n'"}
    assert amalgam.right_parameters['q'] == "q'"
    result = amalgam.structure
    assert result.parameters == ('p', 'q', "q'")
    assert result.structure("q'").holds('R', ('a', "n'"))
    assert not result.structure('q').holds('R', ('a', "n'"))
    assert is_embedding(amalgam.right_objects, right.structure('p'), result.structure('p'))


def test_amalgam_ignores_the_order_of_shared_parameters():
    common = PfcStructure(frozenset({'a'}), ('p', 'q'), GRAPH, {'p': graph(['a'], []), 'q': graph(['a'], [])})
    left = PfcStructure(frozenset({'a', 'b'}), ('q', 'p'), GRAPH,
                        {'p': graph(['a', 'b'], [('a', 'b')]), 'q': graph(['a', 'b'], [])})
    right = PfcStructure(frozenset({'a', 'c'}), ('p', 'q'), GRAPH,
                         {'p': graph(['a', 'c'], []), 'q': graph(['a', 'c'], [('a', 'c')])})
    result = pfc_amalgamate(GraphOracle(), common, left, right).structure
    assert set(result.parameters) == {'p', 'q'}
    assert result.objects == {'a', 'b', 'c'}
    assert result.structure('p').holds('R', ('a', 'b'))
    assert result.structure('q').holds('R', ('a', 'c'))
    assert left.restrict({'a'}, ('p', 'q')) == common


def test_equivalence_amalgam_merges_through_the_common_part():
    common = single('p', equivalence(['c'], [['c']]))
    left = single('p', equivalence(['a', 'c'], [['a', 'c']]))
    right = single('p', equivalence(['b', 'c'], [['b', 'c']]))
    s = pfc_amalgamate(EquivalenceOracle(), common, left, right).structure.structure('p')
    assert s.holds('E', ('a', 'b'))


def test_amalgam_rejects_non_members():
    common = single('p', equivalence(['c'], [['c']]))
    left = single('p', FinRelStructure.build(['a', 'c'], EQ, {'E': [('c', 'c')]}))
    right = single('p', equivalence(['b', 'c'], [['b'], ['c']]))
    with pytest.raises(OracleError):
        pfc_amalgamate(EquivalenceOracle(), common, left, right)


def test_amalgam_needs_the_common_part():
    common = single('p', graph(['a'], []))
    left = single('p', graph(['b'], []))
    with pytest.raises(ValidationError):
        pfc_amalgamate(GraphOracle(), common, left, single('p', graph(['a'], [])))


def test_pasting1():
    shared = ['x', 'y']
    c = equivalence(shared, [['x'], ['y']])
    fragments = [
        (c, equivalence(shared + ['d'], [['x', 'd'], ['y']]), 'd'),
        (c, equivalence(shared + ['d'], [['x'], ['y', 'd']]), 'd'),
    ]
    result = pasting1_build(['p0', 'p1'], shared, fragments, base=EquivalenceOracle())
    assert result.objects == {'x', 'y', '*'}
    assert result.structure('p0').holds('E', ('x', '*'))
    assert result.structure('p1').holds('E', ('y', '*'))
    assert not result.structure('p1').holds('E', ('x', '*'))


def test_pasting1_rejects_bad_fragments():
    c = equivalence(['x'], [['x']])
    wide = equivalence(['x', 'd', 'e'], [['x'], ['d'], ['e']])
    with pytest.raises(ValidationError):
        pasting1_build(['p0'], ['x'], [(c, wide, 'd')])
    with pytest.raises(ValidationError):
        pasting1_build(['p0', 'p1'], ['x'], [(c, wide, 'd')])


def test_pasting2_merges_through_c():
    s0 = equivalence(['a', 'b', 'c'], [['a', 'c'], ['b']])
    s1 = equivalence(['a', 'b', 'c'], [['b', 'c'], ['a']])
    m = PfcStructure(frozenset({'a', 'b', 'c'}), ('b0', 'b1'), EQ, {'b0': s0, 'b1': s1})
    result, new = pasting2_build(EquivalenceOracle(), m, ['a'], ['b'], ['c'], 'b0', 'b1')
    assert new == 'b*'
    assert result.parameters == ('b0', 'b1', 'b*')
    assert result.structure('b*').holds('E', ('a', 'b'))


def test_pasting2_needs_a_and_b_to_meet_inside_c():
    s = equivalence(['a', 'c'], [['a'], ['c']])
    m = PfcStructure(frozenset({'a', 'c'}), ('b0', 'b1'), EQ, {'b0': s, 'b1': s})
    with pytest.raises(ValidationError):
        pasting2_build(EquivalenceOracle(), m, ['a'], ['a'], ['c'], 'b0', 'b1')


def test_imaginary_cover():
    m = graph(['x', 'y'], [('x', 'y')])
    cover = imaginary_cover(m, 2)
    assert len(cover.universe) == 4
    assert len(cover.relations['R']) == 8
    assert cover.holds('E', ('x/0', 'x/1'))
    assert not cover.holds('E', ('x/0', 'y/0'))
    assert cover_projection(cover)['y/1'] == 'y'

    trivial = imaginary_cover(m, 1)
    assert trivial.relations['E'] == {('x/0', 'x/0'), ('y/0', 'y/0')}
    with pytest.raises(ValidationError):
        imaginary_cover(m, 2, relation='R')


@pytest.mark.parametrize('rows, cols', [(1, 2), (2, 2), (3, 3)])
def test_tp2_demo(pfc_service, rows, cols):
    certificate, structure = pfc_service.tp2_demo(rows, cols)
    assert certificate.ok
    assert certificate.payload.domain_size == cols ** rows
    assert len(structure.objects) == cols + cols ** rows
    assert in_class(structure, EquivalenceOracle())
