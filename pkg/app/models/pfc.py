from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping

from core.exceptions import ValidationError

Signature = tuple[tuple[str, int], ...]
Relation = frozenset[tuple[str, ...]]


@dataclass(frozen=True)
class FinRelStructure:
    """
    A finite structure in a finite relational signature.

    Attributes
    ----------
    universe : frozenset of str
        Element names.
    signature : tuple of (str, int)
        Relation names with their arities, in declaration order.
    relations : Mapping[str, frozenset of tuple]
        The interpretation of every relation symbol.

    Examples
    --------
    >>> s = FinRelStructure.build(['a', 'b'], [('R', 2)], {'R': [('a', 'b')]})
    >>> s.holds('R', ('a', 'b')), s.holds('R', ('b', 'a'))
    (True, False)
    """

    universe: frozenset[str]
    signature: Signature
    relations: Mapping[str, Relation] = field(repr=False)

    def __post_init__(self):
        names = [name for name, _ in self.signature]
        if len(set(names)) != len(names):
            raise ValidationError({'signature': f'Duplicate relation names in {names}'})
        if set(self.relations) != set(names):
            raise ValidationError({'relations': f'Relations {sorted(self.relations)} do not match signature {names}'})
        for name, arity in self.signature:
            if arity < 1:
                raise ValidationError({'signature': f"Relation '{name}' must have positive arity"})
            for t in self.relations[name]:
                if len(t) != arity:
                    raise ValidationError({'relations': f"Tuple {t} of '{name}' should have arity {arity}"})
                if any(x not in self.universe for x in t):
                    raise ValidationError({'relations': f"Tuple {t} of '{name}' leaves the universe"})

    @classmethod
    def build(cls, universe: Iterable[str], signature: Iterable[tuple[str, int]],
              relations: Mapping[str, Iterable[Iterable[str]]] | None = None) -> 'FinRelStructure':
        """Normalizing constructor; relations missing from ``relations`` are empty."""
        signature = tuple((str(name), int(arity)) for name, arity in signature)
        relations = relations or {}
        return cls(
            universe=frozenset(universe),
            signature=signature,
            relations={name: frozenset(tuple(t) for t in relations.get(name, ())) for name, _ in signature},
        )

    def arity(self, name: str) -> int:
        return dict(self.signature)[name]

    def holds(self, name: str, t: tuple[str, ...]) -> bool:
        return tuple(t) in self.relations[name]

    def restrict(self, subset: Iterable[str]) -> 'FinRelStructure':
        """Induced substructure on ``subset``."""
        keep = frozenset(subset)
        if not keep <= self.universe:
            raise ValidationError({'subset': f'{sorted(keep - self.universe)} are not in the universe'})
        return FinRelStructure(
            keep,
            self.signature,
            {name: frozenset(t for t in tuples if all(x in keep for x in t)) for name, tuples in self.relations.items()},
        )

    def rename(self, mapping: Mapping[str, str]) -> 'FinRelStructure':
        """Image under an injective renaming; unmapped elements keep their names."""
        image = {x: mapping.get(x, x) for x in self.universe}
        if len(set(image.values())) != len(image):
            raise ValidationError({'mapping': 'Renaming is not injective'})
        return FinRelStructure(
            frozenset(image.values()),
            self.signature,
            {name: frozenset(tuple(image[x] for x in t) for t in tuples) for name, tuples in self.relations.items()},
        )

    def with_points(self, points: Iterable[str]) -> 'FinRelStructure':
        """Same relations on a larger universe."""
        return FinRelStructure(self.universe | frozenset(points), self.signature, self.relations)


def is_embedding(mapping: Mapping[str, str], source: FinRelStructure, target: FinRelStructure) -> bool:
    """
    Injective map preserving every relation and its negation.

    Examples
    --------
    >>> a = FinRelStructure.build(['x'], [('R', 1)], {'R': [('x',)]})
    >>> b = FinRelStructure.build(['x', 'y'], [('R', 1)], {'R': [('x',)]})
    >>> is_embedding({'x': 'x'}, a, b), is_embedding({'x': 'y'}, a, b)
    (True, False)
    """
    if source.signature != target.signature:
        return False
    if set(mapping) != set(source.universe) or not set(mapping.values()) <= target.universe:
        return False
    if len(set(mapping.values())) != len(mapping):
        return False
    elements = sorted(source.universe)
    for name, arity in source.signature:
        for t in product(elements, repeat=arity):
            if source.holds(name, t) != target.holds(name, tuple(mapping[x] for x in t)):
                return False
    return True


@dataclass(frozen=True)
class PfcStructure:
    """
    A two-sorted structure: objects, parameters, and one structure on the
    objects for every parameter.

    Attributes
    ----------
    objects : frozenset of str
        The object sort.
    parameters : tuple of str
        The parameter sort, in a fixed order.
    signature : tuple of (str, int)
        Signature shared by every per-parameter structure.
    structures : Mapping[str, FinRelStructure]
        The structure attached to each parameter, on universe ``objects``.
    """

    objects: frozenset[str]
    parameters: tuple[str, ...]
    signature: Signature
    structures: Mapping[str, FinRelStructure] = field(repr=False)

    def __post_init__(self):
        if len(set(self.parameters)) != len(self.parameters):
            raise ValidationError({'parameters': f'Duplicate parameters in {list(self.parameters)}'})
        if set(self.structures) != set(self.parameters):
            raise ValidationError({'structures': 'Structures must be given for exactly the parameters'})
        for b, s in self.structures.items():
            if s.universe != self.objects:
                raise ValidationError({'structures': f"Structure of '{b}' is not on the object set"})
            if s.signature != self.signature:
                raise ValidationError({'signature': f"Structure of '{b}' has signature {s.signature}, expected {self.signature}"})

    def structure(self, b: str) -> FinRelStructure:
        try:
            return self.structures[b]
        except KeyError as e:
            raise ValidationError({'parameter': f"Unknown parameter '{b}'"}) from e

    def restrict(self, objects: Iterable[str], parameters: Iterable[str]) -> 'PfcStructure':
        """Induced part on ``objects``; parameters come out in the order requested."""
        keep = frozenset(objects)
        params = tuple(p for p in dict.fromkeys(parameters) if p in self.structures)
        return PfcStructure(keep, params, self.signature, {b: self.structures[b].restrict(keep) for b in params})


@dataclass(frozen=True)
class PfcAmalgam:
    """
    Result of amalgamating two extensions of a common part.

    Attributes
    ----------
    structure : PfcStructure
        The amalgam.
    left_objects, right_objects : Mapping[str, str]
        Object embeddings of the left and right sides.
    right_parameters : Mapping[str, str]
        Parameter names of the right side in the amalgam (the left side's
        parameters keep their names).
    """

    structure: PfcStructure
    left_objects: Mapping[str, str]
    right_objects: Mapping[str, str]
    right_parameters: Mapping[str, str]
