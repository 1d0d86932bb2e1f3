"""
Tree operations as node maps.

Every constructor computes the minimal source shape itself; an explicit
``source`` may be larger (for instance the shape of the tree the map will be
applied to) but never smaller.
"""
import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Sequence

from core.exceptions import ShapeInsufficiencyError, ShapeMismatchError, ValidationError, InternalInvariantError
from models.nodemap import NodeMap
from models.patterns import LabeledTree, TupleLabeledTree
from models.tree import Node, TreeShape, node_to_str
from services.treeidx import meet, tree_le

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OpDescriptor:
    """
    Name and parameters of a node-map constructor.

    Examples
    --------
    >>> OpDescriptor('widening', {'k': 2, 'n': 1})
    OpDescriptor(op='widening', params={'k': 2, 'n': 1})
    """

    op: str
    params: dict[str, Any] = field(default_factory=dict)


def _required_depth(images: dict[Node, tuple[Node, ...]]) -> int:
    longest = max((len(node) for nodes in images.values() for node in nodes), default=-1)
    return longest + 1


def _resolve_source(op: str, required: TreeShape, source: TreeShape | None, binary: bool = False) -> TreeShape:
    if source is None:
        return required
    if binary and source.branching != 2 and source.depth > 1:
        raise ShapeInsufficiencyError(f'{op}: source must be binary, got {source}')
    if not source.covers(required):
        raise ShapeInsufficiencyError(f'{op}: source {source} is smaller than the required {required}')
    return source


def _check_positive(name: str, value: int, minimum: int = 1) -> None:
    if value < minimum:
        raise ValidationError({name: f'{name} must be at least {minimum}, got {value}'})


def widening(k: int, n: int, target: TreeShape, source: TreeShape | None = None) -> NodeMap:
    """
    k-fold widening at level n.

    Nodes below level n map to themselves; a node ``nu + (i,) + xi`` with
    ``len(nu) == n - 1`` maps to the k nodes ``nu + (k*i + j,) + xi``.

    Parameters
    ----------
    k : int
        Widening factor, at least 1.
    n : int
        First affected level, at least 1.
    target : TreeShape
        Shape of the widened tree.
    source : TreeShape, optional
        Shape of the tree being widened; defaults to the minimal one.

    Returns
    -------
    NodeMap
        The widening.

    Examples
    --------
    >>> widening(2, 1, TreeShape(2, 2)).image[(1,)]
    ((2,), (3,))
    """
    _check_positive('k', k)
    _check_positive('n', n)
    image: dict[Node, tuple[Node, ...]] = {}
    for node in target.nodes:
        if len(node) < n:
            image[node] = (node,)
        else:
            head, i, tail = node[:n - 1], node[n - 1], node[n:]
            image[node] = tuple(head + (k * i + j,) + tail for j in range(k))
    branching = k * target.branching if target.depth > n else target.branching
    required = TreeShape(branching, target.depth)
    return NodeMap('widening', {'k': k, 'n': n}, _resolve_source('widening', required, source), target, image)


def stretching(k: int, n: int, target: TreeShape, source: TreeShape | None = None) -> NodeMap:
    """
    k-fold stretch at level n: a level-n node picks up its first k-1
    descendants along the 0-spine, deeper nodes shift down by k-1 levels.

    Examples
    --------
    >>> stretching(2, 1, TreeShape(2, 2)).image[(1,)]
    ((1,), (1, 0))
    >>> stretching(2, 0, TreeShape(2, 2)).image[(1,)]
    ((0, 1),)
    """
    _check_positive('k', k)
    _check_positive('n', n, minimum=0)
    pad = (0,) * (k - 1)
    image: dict[Node, tuple[Node, ...]] = {}
    for node in target.nodes:
        if len(node) < n:
            image[node] = (node,)
        elif len(node) == n:
            image[node] = tuple(node + (0,) * j for j in range(k))
        else:
            image[node] = (node[:n] + pad + node[n:],)
    required = TreeShape(target.branching, max(_required_depth(image), target.depth))
    return NodeMap('stretching', {'k': k, 'n': n}, _resolve_source('stretching', required, source), target, image)


def fattening_stump(k: int) -> tuple[Node, ...]:
    """The nodes of the binary tree of height k, canonical order."""
    return TreeShape(2, k).nodes


def fattening(k: int, target: TreeShape, source: TreeShape | None = None) -> tuple[NodeMap, tuple[Node, ...]]:
    """
    k-fold fattening of a binary tree and the stump below it.

    A node maps to its copies under every binary prefix of length k, the
    prefixes taken in lex order.

    Returns
    -------
    tuple
        ``(NodeMap, stump)``.

    Examples
    --------
    >>> m, stump = fattening(1, TreeShape(2, 2))
    >>> m.image[()], stump
    (((0,), (1,)), ((),))
    """
    _check_positive('k', k, minimum=0)
    if target.depth > 1 and target.branching != 2:
        raise ValidationError({'target': f'fattening needs a binary target, got {target}'})
    prefixes = list(product((0, 1), repeat=k))
    image = {node: tuple(prefix + node for prefix in prefixes) for node in target.nodes}
    required = TreeShape(2, max(_required_depth(image), k))
    nodemap = NodeMap('fattening', {'k': k}, _resolve_source('fattening', required, source, binary=True), target, image)
    return nodemap, fattening_stump(k)


def restriction(levels: Sequence[int], source: TreeShape) -> NodeMap:
    """
    Restriction to a set of levels W.

    The kept nodes are those whose length lies in W and whose entries at
    coordinates outside W are 0. A target node of length j sits at source
    level ``W[j]``, with its entries written at the coordinates of W.

    Raises
    ------
    ValidationError
        If W leaves the source levels.
    InternalInvariantError
        If the identification fails to preserve prefix order, meets or lex
        order.

    Examples
    --------
    >>> restriction([1, 2], TreeShape(2, 4)).image[(1,)]
    ((0, 1),)
    """
    w = sorted(set(levels))
    if any(level < 0 or level >= source.depth for level in w):
        raise ValidationError({'levels': f'Levels {w} must lie in 0..{source.depth - 1}'})
    target = TreeShape(source.branching, len(w))

    def place(node: Node) -> Node:
        entries = [0] * w[len(node)]
        for position, entry in enumerate(node):
            entries[w[position]] = entry
        return tuple(entries)

    image = {node: (place(node),) for node in target.nodes}
    nodes = target.nodes
    for a in nodes:
        sa = image[a][0]
        for b in nodes:
            sb = image[b][0]
            if tree_le(a, b) != tree_le(sa, sb) or (a < b) != (sa < sb) or image[meet(a, b)][0] != meet(sa, sb):
                raise InternalInvariantError(
                    f'restriction to {w}: identification of {node_to_str(a)}, {node_to_str(b)} is not an isomorphism'
                )
    return NodeMap('restriction', {'levels': w}, source, target, image)


def elongation_tilde(k: int, node: Node) -> Node:
    """
    Spread the entries of ``node`` k apart, padding with zeros.

    Examples
    --------
    >>> elongation_tilde(2, (3, 4))
    (3, 0, 4)
    """
    if not node:
        return ()
    entries = [0] * (k * (len(node) - 1) + 1)
    for position, entry in enumerate(node):
        entries[k * position] = entry
    return tuple(entries)


def elongation(k: int, target: TreeShape, source: TreeShape | None = None) -> NodeMap:
    """
    k-fold elongation: a node maps to its spread-out copy followed by the
    next k-1 nodes on the 0-spine below it. The root spreads to itself.

    Examples
    --------
    >>> elongation(2, TreeShape(5, 3)).image[(3, 4)]
    ((3, 0, 4), (3, 0, 4, 0))
    """
    _check_positive('k', k)
    image: dict[Node, tuple[Node, ...]] = {}
    for node in target.nodes:
        base = elongation_tilde(k, node)
        image[node] = tuple(base + (0,) * j for j in range(k))
    required = TreeShape(target.branching, _required_depth(image))
    return NodeMap('elongation', {'k': k}, _resolve_source('elongation', required, source), target, image)


def comb_node(node: Node) -> Node:
    """
    The comb embedding: each entry i becomes i ones followed by a zero.

    Examples
    --------
    >>> comb_node((1, 2))
    (1, 0, 1, 1, 0)
    """
    out: list[int] = []
    for entry in node:
        out.extend([1] * entry)
        out.append(0)
    return tuple(out)


def comb_embedding(target: TreeShape, source: TreeShape | None = None) -> NodeMap:
    """Embed a tree of any branching into the binary tree along combs."""
    image = {node: (comb_node(node),) for node in target.nodes}
    required = TreeShape(2, _required_depth(image))
    return NodeMap('comb', {}, _resolve_source('comb', required, source, binary=True), target, image)


def spread_node(node: Node, n: int | None = None) -> Node:
    """
    Insert a 0 before every entry; with ``n`` given, only before the first n.

    Examples
    --------
    >>> spread_node((1, 0))
    (0, 1, 0, 0)
    >>> spread_node((1, 0, 1), n=1)
    (0, 1, 0, 1)
    """
    cut = len(node) if n is None else min(n, len(node))
    out: list[int] = []
    for entry in node[:cut]:
        out.extend((0, entry))
    return tuple(out) + node[cut:]


def spread_embedding(target: TreeShape, source: TreeShape | None = None) -> NodeMap:
    return _spread(target, None, source)


def spread_embedding_at(n: int, target: TreeShape, source: TreeShape | None = None) -> NodeMap:
    _check_positive('n', n, minimum=0)
    return _spread(target, n, source)


def _spread(target: TreeShape, n: int | None, source: TreeShape | None) -> NodeMap:
    if target.depth > 1 and target.branching != 2:
        raise ValidationError({'target': f'spread embedding needs a binary target, got {target}'})
    image = {node: (spread_node(node, n),) for node in target.nodes}
    required = TreeShape(2, _required_depth(image))
    params = {} if n is None else {'n': n}
    op = 'spread' if n is None else 'spread_at'
    return NodeMap(op, params, _resolve_source(op, required, source, binary=True), target, image)


def binary_restriction(target: TreeShape, source: TreeShape) -> NodeMap:
    """Inclusion of a binary tree into a tree of branching at least 2."""
    if target.depth > 1 and target.branching != 2:
        raise ValidationError({'target': f'binary restriction needs a binary target, got {target}'})
    if source.depth > 1 and source.branching < 2:
        raise ShapeInsufficiencyError(f'binary_restriction: source branching must be at least 2, got {source}')
    if source.depth < target.depth:
        raise ShapeInsufficiencyError(f'binary_restriction: source {source} is shallower than {target}')
    image = {node: (node,) for node in target.nodes}
    return NodeMap('binary_restriction', {}, source, target, image)


def interleave_node(node: Node) -> Node:
    """
    Follow every entry by a 0.

    Examples
    --------
    >>> interleave_node((2, 1))
    (2, 0, 1, 0)
    """
    out: list[int] = []
    for entry in node:
        out.extend((entry, 0))
    return tuple(out)


def interleaving(target: TreeShape, source: TreeShape | None = None) -> NodeMap:
    image = {node: (interleave_node(node),) for node in target.nodes}
    required = TreeShape(target.branching, _required_depth(image))
    return NodeMap('interleaving', {}, _resolve_source('interleaving', required, source), target, image)


def _int_param(params: dict[str, Any], name: str) -> int:
    if name not in params:
        raise ValidationError({name: f"Missing parameter '{name}'"})
    try:
        return int(params[name])
    except (TypeError, ValueError) as e:
        raise ValidationError({name: f"Parameter '{name}' must be an integer"}) from e


_BUILDERS: dict[str, Callable[[dict[str, Any], TreeShape, TreeShape | None], NodeMap]] = {
    'widening': lambda p, t, s: widening(_int_param(p, 'k'), _int_param(p, 'n'), t, s),
    'stretching': lambda p, t, s: stretching(_int_param(p, 'k'), _int_param(p, 'n'), t, s),
    'fattening': lambda p, t, s: fattening(_int_param(p, 'k'), t, s)[0],
    'elongation': lambda p, t, s: elongation(_int_param(p, 'k'), t, s),
    'comb': lambda p, t, s: comb_embedding(t, s),
    'spread': lambda p, t, s: spread_embedding(t, s),
    'spread_at': lambda p, t, s: spread_embedding_at(_int_param(p, 'n'), t, s),
    'interleaving': lambda p, t, s: interleaving(t, s),
}

OP_NAMES = tuple(sorted([*_BUILDERS, 'restriction', 'binary_restriction']))


def build_op(descriptor: OpDescriptor, target: TreeShape | None = None, source: TreeShape | None = None) -> NodeMap:
    """
    Build any node map from its descriptor.

    ``restriction`` is driven by its source and levels; ``binary_restriction``
    needs both shapes; every other operation needs the target.
    """
    op = descriptor.op.replace('-', '_').lower()
    if op == 'restriction':
        if source is None:
            raise ValidationError({'source': 'restriction needs a source shape'})
        levels = descriptor.params.get('levels')
        if levels is None:
            raise ValidationError({'levels': "Missing parameter 'levels'"})
        return restriction([int(x) for x in levels], source)
    if target is None:
        raise ValidationError({'target': f'{op} needs a target shape'})
    if op == 'binary_restriction':
        if source is None:
            raise ValidationError({'source': 'binary_restriction needs a source shape'})
        return binary_restriction(target, source)
    if op not in _BUILDERS:
        raise ValidationError({'op': f"Unknown operation '{descriptor.op}', expected one of {list(OP_NAMES)}"})
    return _BUILDERS[op](descriptor.params, target, source)


def required_source_shape(descriptor: OpDescriptor, target: TreeShape) -> TreeShape:
    """
    Minimal source shape for which the operation is total on ``target``.

    Examples
    --------
    >>> str(required_source_shape(OpDescriptor('widening', {'k': 2, 'n': 1}), TreeShape(2, 3)))
    '4x3'
    >>> str(required_source_shape(OpDescriptor('elongation', {'k': 2}), TreeShape(2, 3)))
    '2x5'
    """
    op = descriptor.op.replace('-', '_').lower()
    if op == 'restriction':
        levels = sorted({int(x) for x in descriptor.params.get('levels', [])})
        if len(levels) != target.depth:
            raise ValidationError({'levels': f'restriction to {levels} yields depth {len(levels)}, not {target.depth}'})
        return TreeShape(target.branching, (levels[-1] + 1) if levels else 0)
    if op == 'binary_restriction':
        return TreeShape(2, target.depth)
    return build_op(descriptor, target).source


def apply_tuplewise(m: NodeMap, t: LabeledTree) -> TupleLabeledTree:
    """
    Relabel the target of ``m`` with the tuples of source labels.

    Raises
    ------
    ShapeMismatchError
        If ``t`` does not live on the source shape of ``m``.
    """
    _check_shape(m, t)
    labels = {node: tuple(t.label(s) for s in m(node)) for node in m.target.labeled_nodes}
    return TupleLabeledTree(m.target, t.domain_size, labels)


def apply_intersect(m: NodeMap, t: LabeledTree) -> LabeledTree:
    """
    Relabel the target of ``m`` with the intersection of its source labels.

    Raises
    ------
    ShapeMismatchError
        If ``t`` does not live on the source shape of ``m``.
    """
    _check_shape(m, t)
    labels = {}
    for node in m.target.labeled_nodes:
        sources = m(node)
        label = t.label(sources[0])
        for s in sources[1:]:
            label = label & t.label(s)
        labels[node] = label
    logger.debug(f'Applied {m.op} {m.params}: {t.shape} -> {m.target}')
    return LabeledTree(m.target, t.domain_size, labels)


def _check_shape(m: NodeMap, t: LabeledTree) -> None:
    if t.shape != m.source:
        raise ShapeMismatchError(f'{m.op} expects a tree of shape {m.source}, got {t.shape}')
