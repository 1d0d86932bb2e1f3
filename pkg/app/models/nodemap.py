from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from core.exceptions import ShapeInsufficiencyError, ShapeMismatchError, ValidationError
from models.tree import Node, TreeShape, node_to_str


@dataclass(frozen=True)
class NodeMap:
    """
    A tree operation as data: every target node is sent to a nonempty,
    ordered tuple of source nodes.

    Attributes
    ----------
    op : str
        Name of the operation (``widening``, ``stretching``, ...).
    params : dict
        Parameters the operation was built with.
    source : TreeShape
        Shape the images live in.
    target : TreeShape
        Shape of the new tree.
    image : Mapping[Node, tuple of Node]
        Total on ``target.nodes``.

    Examples
    --------
    >>> m = NodeMap.identity(TreeShape(2, 2))
    >>> m.map_tuple([(0,), (1,)])
    ((0,), (1,))
    """

    op: str
    params: dict[str, Any]
    source: TreeShape
    target: TreeShape
    image: Mapping[Node, tuple[Node, ...]] = field(repr=False)

    def __post_init__(self):
        for node in self.target.nodes:
            images = self.image.get(node)
            if not images:
                raise ValidationError({'image': f'{self.op}: no image for target node {node_to_str(node)}'})
            for source_node in images:
                if not self.source.contains(source_node):
                    raise ShapeInsufficiencyError(
                        f'{self.op}: image node {node_to_str(source_node)} of {node_to_str(node)} '
                        f'is outside the source shape {self.source}'
                    )

    @classmethod
    def identity(cls, shape: TreeShape) -> 'NodeMap':
        return cls('identity', {}, shape, shape, {node: (node,) for node in shape.nodes})

    def __call__(self, node: Node) -> tuple[Node, ...]:
        try:
            return self.image[node]
        except KeyError as e:
            raise ValidationError({'node': f'{node_to_str(node)} is not in target shape {self.target}'}) from e

    def arity(self, node: Node) -> int:
        return len(self(node))

    def map_tuple(self, t: Sequence[Node]) -> tuple[Node, ...]:
        """Concatenate the images of ``t`` in input order."""
        return tuple(source_node for node in t for source_node in self(node))

    def compose(self, inner: 'NodeMap') -> 'NodeMap':
        """
        Follow this map with ``inner``.

        ``self`` must land in ``inner.target``; the result goes from
        ``self.target`` straight into ``inner.source``.

        Raises
        ------
        ShapeMismatchError
            If the shapes do not chain.
        """
        if not inner.target.covers(self.source):
            raise ShapeMismatchError(f'Cannot compose {self.op} (source {self.source}) with {inner.op} (target {inner.target})')
        image = {node: tuple(s for mid in images for s in inner(mid)) for node, images in self.image.items()}
        return NodeMap(
            op=f'{self.op}+{inner.op}',
            params={'outer': {'op': self.op, **self.params}, 'inner': {'op': inner.op, **inner.params}},
            source=inner.source,
            target=self.target,
            image=image,
        )

    def ref(self) -> dict[str, Any]:
        """Short reference used in provenance records."""
        return {'op': self.op, 'params': self.params, 'source': str(self.source), 'target': str(self.target)}
