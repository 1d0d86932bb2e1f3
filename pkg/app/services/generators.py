"""
Random inputs for fuzzing and tests.

Block trees and block arrays label nodes (cells) by coordinate blocks: a
path is in the label of a node when it agrees with the node blockwise on
every coordinate the node fixes. Their patterns are uniform enough that
every transform postcondition holds on them.
"""
import random
from itertools import product
from math import prod
from typing import Sequence

from core.exceptions import ValidationError
from models.patterns import Certificate, InpArray, LabeledTree, PatternKind, SetSystem
from models.pfc import FinRelStructure, PfcStructure
from models.tree import TreeShape
from services.oracles import BaseClassOracle, EquivalenceOracle, GraphOracle


def random_set_system(rng: random.Random, domain_size: int, family_size: int, density: float = 0.5) -> SetSystem:
    """Named sets ``s0, s1, ...`` with each element included with probability ``density``."""
    sets = {
        f's{i}': frozenset(x for x in range(domain_size) if rng.random() < density)
        for i in range(family_size)
    }
    return SetSystem(domain_size, sets)


def _check_widths(branching: int, widths: Sequence[int]) -> None:
    for w in widths:
        if w < 1 or branching % w:
            raise ValidationError({'widths': f'Block width {w} must divide the branching {branching}'})


def block_tree(branching: int, widths: Sequence[int]) -> LabeledTree:
    """
    Block-labeled tree on ``(branching, len(widths) + 1)``.

    The domain is the set of maximal paths in lex order; a node of length l
    is labeled by the paths p with ``p[c] // widths[c] == node[c] // widths[c]``
    for every ``c < l``.

    Examples
    --------
    >>> t = block_tree(2, [2])
    >>> t.label((0,)) == t.label((1,))
    True
    """
    _check_widths(branching, widths)
    shape = TreeShape(branching, len(widths) + 1)
    paths = shape.paths
    blocks = [tuple(p[c] // widths[c] for c in range(len(widths))) for p in paths]
    labels = {
        node: frozenset(i for i, key in enumerate(blocks)
                        if all(key[c] == node[c] // widths[c] for c in range(len(node))))
        for node in shape.labeled_nodes
    }
    return LabeledTree(shape, len(paths), labels)


def block_sibling_bounds(widths: Sequence[int]) -> list[int]:
    """Sibling families at level ``c + 1`` are ``(widths[c] + 1)``-inconsistent."""
    return [w + 1 for w in widths]


def block_level_bound(widths: Sequence[int]) -> int:
    """Every level of a block tree is k-inconsistent for this k."""
    return max((prod(widths[:level]) for level in range(1, len(widths) + 1)), default=1) + 1


def block_cdt(branching: int, widths: Sequence[int]) -> Certificate:
    """CDT certificate on :func:`block_tree` with the sibling bounds of :func:`block_sibling_bounds`."""
    return Certificate(PatternKind.CDT, {'bounds': block_sibling_bounds(widths)}, block_tree(branching, widths))


def block_level_cdt(branching: int, widths: Sequence[int]) -> Certificate:
    """CDT_LEVEL certificate on :func:`block_tree` with k from :func:`block_level_bound`."""
    return Certificate(PatternKind.CDT_LEVEL, {'k': block_level_bound(widths)}, block_tree(branching, widths))


def block_array(cols: int, widths: Sequence[int]) -> InpArray:
    """
    Block array with one row per width.

    The domain is every function from rows to columns (product order);
    cell ``(i, j)`` holds the functions f with ``f[i] // widths[i] == j // widths[i]``.
    """
    _check_widths(cols, widths)
    functions = list(product(range(cols), repeat=len(widths)))
    cells = tuple(
        tuple(frozenset(index for index, f in enumerate(functions) if f[i] // w == j // w) for j in range(cols))
        for i, w in enumerate(widths)
    )
    return InpArray(len(widths), cols, len(functions), cells)


def block_inp(cols: int, widths: Sequence[int]) -> Certificate:
    """INP certificate with the uniform bound ``max(widths) + 1``."""
    k = max(widths, default=1) + 1
    return Certificate(PatternKind.INP, {'bounds': [k] * len(widths)}, block_array(cols, widths))


def random_widths(rng: random.Random, count: int, branching: int, choices: Sequence[int] = (1, 2, 4)) -> list[int]:
    """
    Draw ``count`` block widths for :func:`block_tree`.

    Parameters
    ----------
    rng : random.Random
        Source of randomness.
    count : int
        Number of widths (labeled levels or rows).
    branching : int
        Only widths dividing it are drawn.
    choices : sequence of int
        Candidate widths.

    Returns
    -------
    list of int
        Widths valid for ``branching``.
    """
    allowed = [w for w in choices if w <= branching and branching % w == 0]
    return [rng.choice(allowed) for _ in range(count)]


# ------------------------------------------------------------------ pfc


def random_member(rng: random.Random, base: BaseClassOracle, universe: Sequence[str],
                  signature: tuple[tuple[str, int], ...]) -> FinRelStructure:
    """A random member of the class on ``universe``."""
    empty = FinRelStructure.build([], signature)
    return random_extension(rng, base, empty, universe)


def random_extension(rng: random.Random, base: BaseClassOracle, s: FinRelStructure,
                     points: Sequence[str]) -> FinRelStructure:
    """A random member of the class on ``s`` plus ``points`` that induces ``s`` on the old elements."""
    new = [x for x in points if x not in s.universe]
    universe = s.universe | frozenset(new)
    relations = {}
    for name, _ in s.signature:
        tuples = set(s.relations[name])
        if isinstance(base, EquivalenceOracle):
            classes = _classes(s.universe, tuples)
            for x in new:
                if classes and rng.random() < 0.6:
                    target = rng.choice(classes)
                    target.append(x)
                else:
                    classes.append([x])
            tuples = {(x, y) for members in classes for x in members for y in members}
        elif isinstance(base, GraphOracle):
            ordered = sorted(universe)
            for x in new:
                for y in ordered:
                    if y != x and rng.random() < 0.4:
                        tuples |= {(x, y), (y, x)}
        else:
            tuples = set(base.extend(s, new).relations[name])
        relations[name] = tuples
    return FinRelStructure.build(universe, s.signature, relations)


def _classes(universe: frozenset[str], tuples: set[tuple[str, str]]) -> list[list[str]]:
    classes: list[list[str]] = []
    seen: set[str] = set()
    for x in sorted(universe):
        if x in seen:
            continue
        members = sorted(y for y in universe if (x, y) in tuples)
        seen.update(members)
        classes.append(members)
    return classes


def random_amalgamation_problem(rng: random.Random, base: BaseClassOracle, max_objects: int = 6,
                                max_parameters: int = 4) -> tuple[PfcStructure, PfcStructure, PfcStructure]:
    """
    A common part (A, D) with two random extensions (B, E) and (C, F).

    Object and parameter names on the two sides may clash outside the
    common part, which the amalgam has to rename.
    """
    signature = (('R', 2),)
    n_common = rng.randint(0, max_objects // 2)
    common_objects = [f'a{i}' for i in range(n_common)]
    left_objects = common_objects + [f'n{i}' for i in range(rng.randint(0, max_objects - n_common))]
    right_objects = common_objects + [f'n{i}' for i in range(rng.randint(0, max_objects - n_common))]

    n_shared = rng.randint(0, max_parameters)
    shared = [f'd{i}' for i in range(n_shared)]
    left_params = shared + [f'q{i}' for i in range(rng.randint(0, max_parameters - n_shared))]
    right_params = shared + [f'q{i}' for i in range(rng.randint(0, max_parameters - n_shared))]

    common_structures = {d: random_member(rng, base, common_objects, signature) for d in shared}
    common = PfcStructure(frozenset(common_objects), tuple(shared), signature, common_structures)

    def side(objects: list[str], params: list[str]) -> PfcStructure:
        structures = {}
        for p in params:
            if p in common_structures:
                structures[p] = random_extension(rng, base, common_structures[p], objects)
            else:
                structures[p] = random_member(rng, base, objects, signature)
        return PfcStructure(frozenset(objects), tuple(params), signature, structures)

    return common, side(left_objects, left_params), side(right_objects, right_params)


def random_fragments(rng: random.Random, base: BaseClassOracle, shared: Sequence[str], count: int,
                     new: str = 'd') -> list[tuple[FinRelStructure, FinRelStructure, str]]:
    """
    Fragments for pasting one new object.

    Each fragment is a random member ``c`` on ``shared`` together with a
    random one-point extension of it by ``new``, in the graph signature.

    Returns
    -------
    list of (FinRelStructure, FinRelStructure, str)
        ``(c, d, new)`` triples.
    """
    signature = (('R', 2),)
    fragments = []
    for _ in range(count):
        c = random_member(rng, base, shared, signature)
        fragments.append((c, random_extension(rng, base, c, [new]), new))
    return fragments
