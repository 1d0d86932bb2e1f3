"""
Base classes for parametrized Fraisse constructions.

An oracle decides membership in an isomorphism-closed class of finite
structures, produces strong amalgams and extends structures by new points.
"""
import logging
from abc import ABC, abstractmethod
from typing import Iterable, Mapping

import networkx as nx

from core.exceptions import OracleError, ValidationError
from models.pfc import FinRelStructure, Signature

logger = logging.getLogger(__name__)


def fresh_name(name: str, taken: set[str] | frozenset[str]) -> str:
    """
    Append primes until the name is free.

    Examples
    --------
    >>> fresh_name('x', {'x', "x'"})
    "x''"
    """
    while name in taken:
        name = name + "'"
    return name


def glue(left: Iterable[str], right: Iterable[str], shared: Mapping[str, str]) -> dict[str, str]:
    """
    Place the right universe next to the left one.

    ``shared`` sends the right elements that come from the common part to
    their left counterparts; every other right element keeps its name
    unless the name is taken on the left.
    """
    taken = set(left)
    placed = {}
    for x in sorted(right):
        if x in shared:
            placed[x] = shared[x]
        else:
            name = fresh_name(x, taken)
            taken.add(name)
            placed[x] = name
    return placed


class BaseClassOracle(ABC):
    """
    Contract of a base class K with strong amalgamation.

    Subclasses must be isomorphism-closed: membership may only depend on the
    isomorphism type of the structure.
    """

    name: str = 'base'

    @abstractmethod
    def accepts_signature(self, signature: Signature) -> bool:
        ...

    @abstractmethod
    def member(self, s: FinRelStructure) -> bool:
        ...

    @abstractmethod
    def _amalgam_relations(self, universe: frozenset[str], left: FinRelStructure,
                           right: FinRelStructure) -> dict[str, frozenset[tuple[str, ...]]]:
        ...

    @abstractmethod
    def extend(self, s: FinRelStructure, points: Iterable[str]) -> FinRelStructure:
        """A member of K on ``s.universe`` plus ``points`` inducing ``s``."""

    def check_signature(self, signature: Signature) -> None:
        if not self.accepts_signature(signature):
            raise ValidationError({'signature': f'{self.name} oracle does not accept signature {list(signature)}'})

    def strong_amalgamate(self, a: FinRelStructure, b: FinRelStructure, c: FinRelStructure,
                          e: Mapping[str, str], f: Mapping[str, str]) -> tuple[FinRelStructure, dict[str, str], dict[str, str]]:
        """
        Strong amalgam of ``e: a -> b`` and ``f: a -> c``.

        The amalgam keeps the names of ``b``; elements of ``c`` outside
        ``f(a)`` keep theirs unless they clash.

        Returns
        -------
        tuple
            ``(d, g, h)`` with ``g: b -> d`` and ``h: c -> d``.

        Raises
        ------
        OracleError
            If an input is not in the class or the amalgam breaks the
            strong amalgamation conditions.
        """
        for label, s in (('common', a), ('left', b), ('right', c)):
            if not self.member(s):
                raise OracleError(f'{self.name}: {label} structure is not in the class')
        g = {x: x for x in b.universe}
        shared = {f[x]: e[x] for x in a.universe}
        h = glue(b.universe, c.universe, shared)
        universe = frozenset(g.values()) | frozenset(h.values())
        d = FinRelStructure(universe, b.signature, self._amalgam_relations(universe, b, c.rename(h)))
        logger.debug(f'{self.name} amalgam: |A|={len(a.universe)}, |B|={len(b.universe)}, |C|={len(c.universe)} -> |D|={len(universe)}')

        if any(g[e[x]] != h[f[x]] for x in a.universe):
            raise OracleError(f'{self.name}: amalgam square does not commute')
        if set(g.values()) & set(h.values()) != {g[e[x]] for x in a.universe}:
            raise OracleError(f'{self.name}: images meet outside the common part')
        if not self.member(d):
            raise OracleError(f'{self.name}: amalgam is not in the class')
        return d, g, h


class GraphOracle(BaseClassOracle):
    """
    Edge-coloured simple graphs: every relation is binary, symmetric and
    irreflexive. The free amalgam adds no edges.
    """

    name = 'graph'

    def accepts_signature(self, signature: Signature) -> bool:
        return all(arity == 2 for _, arity in signature)

    def member(self, s: FinRelStructure) -> bool:
        if not self.accepts_signature(s.signature):
            return False
        for tuples in s.relations.values():
            for x, y in tuples:
                if x == y or (y, x) not in tuples:
                    return False
        return True

    def _amalgam_relations(self, universe, left, right):
        relations = {}
        for name, _ in left.signature:
            graph = nx.Graph()
            graph.add_nodes_from(universe)
            graph.add_edges_from(left.relations[name])
            graph.add_edges_from(right.relations[name])
            relations[name] = frozenset(pair for u, v in graph.edges() for pair in ((u, v), (v, u)))
        return relations

    def extend(self, s: FinRelStructure, points: Iterable[str]) -> FinRelStructure:
        return s.with_points(points)


class EquivalenceOracle(BaseClassOracle):
    """
    Sets with equivalence relations. The amalgam takes the union of both
    sides and closes it transitively, merging classes through the common
    part.
    """

    name = 'equivalence'

    def accepts_signature(self, signature: Signature) -> bool:
        return all(arity == 2 for _, arity in signature)

    def member(self, s: FinRelStructure) -> bool:
        if not self.accepts_signature(s.signature):
            return False
        for tuples in s.relations.values():
            if any((x, x) not in tuples for x in s.universe):
                return False
            if any((y, x) not in tuples for x, y in tuples):
                return False
            successors: dict[str, set[str]] = {}
            for x, y in tuples:
                successors.setdefault(x, set()).add(y)
            for x, y in tuples:
                if not successors.get(y, set()) <= successors[x]:
                    return False
        return True

    def _amalgam_relations(self, universe, left, right):
        relations = {}
        for name, _ in left.signature:
            graph = nx.Graph()
            graph.add_nodes_from(universe)
            graph.add_edges_from(left.relations[name])
            graph.add_edges_from(right.relations[name])
            relations[name] = frozenset(
                (x, y) for component in nx.connected_components(graph) for x in component for y in component
            )
        return relations

    def extend(self, s: FinRelStructure, points: Iterable[str]) -> FinRelStructure:
        new = frozenset(points) - s.universe
        grown = s.with_points(new)
        return FinRelStructure(
            grown.universe,
            s.signature,
            {name: tuples | frozenset((x, x) for x in new) for name, tuples in s.relations.items()},
        )


ORACLES: dict[str, type[BaseClassOracle]] = {
    GraphOracle.name: GraphOracle,
    EquivalenceOracle.name: EquivalenceOracle,
}


def get_oracle(name: str) -> BaseClassOracle:
    """
    Built-in oracle by name.

    Raises
    ------
    ValidationError
        For unknown names.
    """
    key = name.lower()
    if key in ('graphs', 'eq', 'equiv', 'equivalences'):
        key = {'graphs': 'graph'}.get(key, 'equivalence')
    if key not in ORACLES:
        raise ValidationError({'base': f"Unknown base class '{name}', expected one of {sorted(ORACLES)}"})
    return ORACLES[key]()
