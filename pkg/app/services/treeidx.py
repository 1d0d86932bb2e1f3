"""
Index algebra on finite trees of sequences.

Nodes are plain tuples, so the prefix-first lexicographic order is Python's
own tuple order and most operations are a few comparisons.
"""
from itertools import combinations
from typing import Callable, Iterable, Sequence

from core.exceptions import ValidationError
from models.tree import Lang, Node, QfType, TreeShape


def meet(a: Node, b: Node) -> Node:
    """
    Longest common prefix of two nodes.

    Examples
    --------
    >>> meet((0, 1), (0, 2))
    (0,)
    >>> meet((1, 0, 3), (1, 0, 3, 5))
    (1, 0, 3)
    """
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return a[:n]


def tree_le(a: Node, b: Node) -> bool:
    """True iff ``a`` is a (not necessarily proper) prefix of ``b``."""
    return len(a) <= len(b) and b[:len(a)] == a


def tree_lt(a: Node, b: Node) -> bool:
    """Strict prefix relation."""
    return len(a) < len(b) and b[:len(a)] == a


def comparable(a: Node, b: Node) -> bool:
    return tree_le(a, b) or tree_le(b, a)


def lex_lt(a: Node, b: Node) -> bool:
    """
    Lexicographic order: a proper prefix precedes, otherwise the entries at
    the level of the meet decide.
    """
    return a < b


def meet_closure(t: Sequence[Node]) -> tuple[Node, ...]:
    """
    Closure of a tuple under meets, deduplicated, in lex order.

    Every meet of a nonempty subfamily equals a pairwise meet, so the closure
    is the set of pairwise meets.

    Examples
    --------
    >>> meet_closure([(0, 0), (0, 1), (1,)])
    ((), (0,), (0, 0), (0, 1), (1,))
    """
    closed = {meet(a, b) for i, a in enumerate(t) for b in t[i:]}
    return tuple(sorted(closed))


def meet_closure_fixpoint(t: Sequence[Node]) -> tuple[Node, ...]:
    """Closure by iterating meets until nothing new appears."""
    closed = set(t)
    frontier = set(t)
    while frontier:
        fresh = {meet(a, b) for a in frontier for b in closed} - closed
        closed |= fresh
        frontier = fresh
    return tuple(sorted(closed))


def qftp(t: Sequence[Node], lang: Lang | str = Lang.L0) -> QfType:
    """
    Canonical quantifier-free type of a tuple.

    Parameters
    ----------
    t : sequence of Node
        The tuple; may be empty.
    lang : Lang or str
        ``L0`` (order, meet, lex) or ``Ls`` (adds exact levels).

    Returns
    -------
    QfType
        Canonical form over the pairwise-meet terms.
    """
    lang = Lang(lang)
    n = len(t)
    terms = [t[i] if i == j else meet(t[i], t[j]) for i in range(n) for j in range(i, n)]

    first: dict[Node, int] = {}
    classes: dict[int, list[int]] = {}
    for index, term in enumerate(terms):
        leader = first.setdefault(term, index)
        classes.setdefault(leader, []).append(index)

    le = tuple(tuple(tree_le(a, b) for b in terms) for a in terms)
    lex = tuple(tuple(a < b for b in terms) for a in terms)
    levels = tuple(len(term) for term in terms) if lang is Lang.LS else None
    return QfType(
        lang=lang,
        arity=n,
        eq=tuple(tuple(members) for members in classes.values()),
        le=le,
        lex=lex,
        levels=levels,
        terms=tuple(terms),
    )


def is_distant_siblings(s: Iterable[Node]) -> bool:
    """
    Check that all pairwise meets of distinct members coincide and that the
    members are pairwise incomparable.

    Raises
    ------
    ValidationError
        If fewer than two distinct nodes are given.
    """
    members = sorted(set(s))
    if len(members) < 2:
        raise ValidationError({'nodes': 'Distant siblings need at least two nodes'})
    common = meet(members[0], members[1])
    for a, b in combinations(members, 2):
        if comparable(a, b) or meet(a, b) != common:
            return False
    return True


def enumerate_shape(shape: TreeShape) -> tuple[tuple[Node, ...], tuple[Node, ...], Callable[[Node], tuple[Node, ...]]]:
    """
    Canonical enumerations of a shape.

    Returns
    -------
    tuple
        ``(nodes, paths, children)``: nodes in (length, lex) order, maximal
        nodes in lex order, and the children function (empty on maximal
        nodes).
    """
    return shape.nodes, shape.paths, shape.children


def path_prefixes(node: Node) -> tuple[Node, ...]:
    """Nodes on the path from the root to ``node``, both included."""
    return tuple(node[:i] for i in range(len(node) + 1))
