from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import product
from typing import Iterator

from core.exceptions import ValidationError

Node = tuple[int, ...]
"""A tree index: a finite sequence of naturals. The root is the empty tuple."""

ROOT: Node = ()
ROOT_TEXT = 'e'


def node_to_str(node: Node) -> str:
    """
    Encode a node as text.

    Parameters
    ----------
    node : Node
        The node to encode.

    Returns
    -------
    str
        ``'e'`` for the root, otherwise dot-separated decimal entries.

    Examples
    --------
    >>> node_to_str((0, 12, 3))
    '0.12.3'
    >>> node_to_str(())
    'e'
    """
    if not node:
        return ROOT_TEXT
    return '.'.join(str(entry) for entry in node)


def parse_node(text: str) -> Node:
    """
    Decode the text form produced by :func:`node_to_str`.

    Raises
    ------
    ValidationError
        If the text is not a root marker or a dot-separated list of naturals.
    """
    text = text.strip()
    if text in (ROOT_TEXT, ''):
        return ROOT
    try:
        entries = tuple(int(part) for part in text.split('.'))
    except ValueError as e:
        raise ValidationError({'node': f"Invalid node text '{text}'"}) from e
    if any(entry < 0 for entry in entries):
        raise ValidationError({'node': f"Negative entry in node '{text}'"})
    return entries


class Lang(str, Enum):
    """Index languages: L0 has order, meet and lex; Ls adds level predicates."""

    L0 = 'L0'
    LS = 'Ls'


@dataclass(frozen=True)
class TreeShape:
    """
    A finite truncation of the tree of sequences.

    Nodes are sequences over ``{0, ..., branching-1}`` of length at most
    ``depth - 1``; the maximal nodes (length ``depth - 1``) double as paths.

    Attributes
    ----------
    branching : int
        Number of children of every non-maximal node (at least 1).
    depth : int
        Number of levels; 0 gives the empty shape, 1 gives the root alone.

    Examples
    --------
    >>> TreeShape(2, 3).node_count
    7
    >>> str(TreeShape(3, 4))
    '3x4'
    """

    branching: int
    depth: int

    def __post_init__(self):
        if self.branching < 1:
            raise ValidationError({'branching': f'Branching must be at least 1, got {self.branching}'})
        if self.depth < 0:
            raise ValidationError({'depth': f'Depth must be non-negative, got {self.depth}'})

    def __str__(self) -> str:
        return f'{self.branching}x{self.depth}'

    @classmethod
    def parse(cls, text: str) -> 'TreeShape':
        """Parse ``'BxD'`` (for instance ``'2x3'``)."""
        try:
            branching, depth = (int(part) for part in text.lower().split('x'))
        except ValueError as e:
            raise ValidationError({'shape': f"Expected 'BxD', got '{text}'"}) from e
        return cls(branching, depth)

    @property
    def max_level(self) -> int:
        return self.depth - 1

    @property
    def is_binary(self) -> bool:
        return self.branching == 2

    @cached_property
    def nodes(self) -> tuple[Node, ...]:
        """All nodes in canonical (length, lex) order."""
        return tuple(node for level in range(self.depth) for node in self.level_nodes(level))

    @property
    def node_count(self) -> int:
        return sum(self.branching ** level for level in range(self.depth))

    @cached_property
    def labeled_nodes(self) -> tuple[Node, ...]:
        """Nodes of level at least 1, in canonical order."""
        return tuple(node for node in self.nodes if node)

    @property
    def paths(self) -> tuple[Node, ...]:
        """Maximal nodes, in lex order."""
        if self.depth == 0:
            return ()
        return self.level_nodes(self.depth - 1)

    def level_nodes(self, level: int) -> tuple[Node, ...]:
        if level < 0 or level >= self.depth:
            return ()
        return tuple(product(range(self.branching), repeat=level))

    def contains(self, node: Node) -> bool:
        return len(node) < self.depth and all(0 <= entry < self.branching for entry in node)

    def children(self, node: Node) -> tuple[Node, ...]:
        """Children of ``node``; empty for maximal nodes."""
        if len(node) >= self.depth - 1:
            return ()
        return tuple(node + (i,) for i in range(self.branching))

    def subtree(self, node: Node) -> Iterator[Node]:
        """Nodes of the shape extending ``node`` (including it), canonical order."""
        for level in range(len(node), self.depth):
            for suffix in product(range(self.branching), repeat=level - len(node)):
                yield node + suffix

    def covers(self, other: 'TreeShape') -> bool:
        """True when every node of ``other`` is a node of this shape."""
        if other.depth <= 1:
            return self.depth >= other.depth
        return self.branching >= other.branching and self.depth >= other.depth


@dataclass(frozen=True)
class QfType:
    """
    Canonical quantifier-free type of a tuple of nodes.

    The terms are the pairwise meets ``m_ij`` (``i <= j``, with ``m_ii`` the
    i-th node) listed row by row. Two tuples have the same type iff the
    canonical components below coincide; ``terms`` keeps the actual nodes
    for display and is excluded from comparison.

    Attributes
    ----------
    lang : Lang
        Language the type is taken in.
    arity : int
        Length of the tuple.
    eq : tuple of tuple of int
        Partition of term indices by node equality, classes sorted by least
        member.
    le : tuple of tuple of bool
        ``le[a][b]`` is True when term a is a prefix of term b.
    lex : tuple of tuple of bool
        ``lex[a][b]`` is True when term a precedes term b strictly in lex order.
    levels : tuple of int or None
        Exact level of each term (Ls only).
    """

    lang: Lang
    arity: int
    eq: tuple[tuple[int, ...], ...]
    le: tuple[tuple[bool, ...], ...]
    lex: tuple[tuple[bool, ...], ...]
    levels: tuple[int, ...] | None = None
    terms: tuple[Node, ...] = field(default=(), compare=False)
