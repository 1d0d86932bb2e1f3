import pytest
from hypothesis import given, strategies as st

from core.exceptions import ValidationError
from models.tree import Lang, TreeShape, node_to_str, parse_node
from services.treeidx import (
    comparable,
    enumerate_shape,
    is_distant_siblings,
    lex_lt,
    meet,
    meet_closure,
    meet_closure_fixpoint,
    path_prefixes,
    qftp,
    tree_le,
    tree_lt,
)

nodes = st.lists(st.integers(min_value=0, max_value=3), max_size=4).map(tuple)


def test_meet():
    assert meet((0, 1), (0, 2)) == (0,)
    assert meet((1, 0, 3), (1, 0, 3, 5)) == (1, 0, 3)
    assert meet((), (2, 2)) == ()


def test_tree_order():
    assert tree_le((), (4, 1))
    assert tree_le((1, 0), (1, 0))
    assert not tree_lt((1, 0), (1, 0))
    assert not tree_le((0,), (1, 0))
    assert comparable((1,), (1, 0, 2))
    assert not comparable((0, 1), (0, 2))


def test_lex_order():
    assert lex_lt((), (0,))
    assert lex_lt((0, 5), (1,))
    assert not lex_lt((1,), (0, 9))


def test_meet_closure():
    assert meet_closure([(0, 0), (0, 1), (1,)]) == ((), (0,), (0, 0), (0, 1), (1,))
    assert meet_closure([]) == ()


@given(st.lists(nodes, max_size=6))
def test_meet_closure_matches_fixpoint(t):
    assert meet_closure(t) == meet_closure_fixpoint(t)


@given(nodes, nodes)
def test_meet_is_the_longest_common_prefix(a, b):
    m = meet(a, b)
    assert m == meet(b, a)
    assert tree_le(m, a) and tree_le(m, b)
    if len(m) < min(len(a), len(b)):
        assert a[len(m)] != b[len(m)]


@given(nodes, nodes)
def test_lex_decided_at_the_meet(a, b):
    if a == b:
        assert not lex_lt(a, b)
    elif tree_lt(a, b):
        assert lex_lt(a, b)
    elif not comparable(a, b):
        level = len(meet(a, b))
        assert lex_lt(a, b) == (a[level] < b[level])


def test_qftp_incomparable_pairs_share_a_type():
    assert qftp(((0,), (1,)), Lang.L0) == qftp(((0,), (2,)), Lang.L0)
    assert qftp(((0,), (1,)), Lang.L0) != qftp(((1,), (0,)), Lang.L0)


def test_qftp_levels_only_in_ls():
    assert qftp(((0, 0), (1,)), Lang.L0) == qftp(((0,), (1,)), Lang.L0)
    assert qftp(((0, 0), (1,)), Lang.LS) != qftp(((0,), (1,)), Lang.LS)
    assert qftp(((0,),), 'Ls').levels == (1,)


def test_qftp_records_equal_terms():
    t = qftp(((0, 1), (0, 1)), Lang.L0)
    # terms: t0, meet(t0, t1), t1 all coincide
    assert t.eq == ((0, 1, 2),)


def test_qftp_empty_tuple():
    t = qftp((), Lang.L0)
    assert t.arity == 0
    assert t.eq == ()


def test_distant_siblings():
    assert is_distant_siblings([(0,), (1,), (2,)])
    assert is_distant_siblings([(0, 1), (0, 2)])
    assert is_distant_siblings([(0, 0, 1), (1, 2), (2,)])
    assert not is_distant_siblings([(0, 0), (0, 1), (1,)])
    assert not is_distant_siblings([(0,), (0, 1)])


def test_distant_siblings_needs_two_nodes():
    with pytest.raises(ValidationError):
        is_distant_siblings([(0,), (0,)])


def test_shape_enumeration():
    shape = TreeShape(2, 3)
    assert shape.node_count == 7
    assert len(shape.nodes) == 7
    assert shape.paths == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert shape.nodes[:3] == ((), (0,), (1,))
    assert TreeShape(3, 3).node_count == 13
    assert TreeShape(2, 0).nodes == ()
    assert TreeShape(2, 1).nodes == ((),)

    nodes, paths, children = enumerate_shape(shape)
    assert nodes == shape.nodes and paths == shape.paths
    assert children((0,)) == ((0, 0), (0, 1))
    assert children((0, 1)) == ()


def test_shape_parse():
    assert TreeShape.parse('3x4') == TreeShape(3, 4)
    with pytest.raises(ValidationError):
        TreeShape.parse('3-4')
    with pytest.raises(ValidationError):
        TreeShape(0, 2)


def test_node_text():
    assert node_to_str(()) == 'e'
    assert node_to_str((0, 12, 3)) == '0.12.3'
    assert parse_node('e') == ()
    assert parse_node('0.12.3') == (0, 12, 3)
    with pytest.raises(ValidationError):
        parse_node('0.x')


def test_path_prefixes():
    assert path_prefixes((1, 0)) == ((), (1,), (1, 0))
