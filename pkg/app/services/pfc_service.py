import logging
from itertools import product
from typing import Iterable, Sequence

from core.config import EngineSettings, settings as default_settings
from core.exceptions import BudgetExceededError, InternalInvariantError, OracleError, ValidationError
from models.patterns import Certificate, InpArray, PatternKind
from models.pfc import FinRelStructure, PfcAmalgam, PfcStructure, Signature, is_embedding
from services.oracles import BaseClassOracle, EquivalenceOracle, fresh_name, glue
from services.pattern_service import PatternService

logger = logging.getLogger(__name__)


def in_class(s: PfcStructure, base: BaseClassOracle) -> bool:
    """
    Membership in the parametrized class: every per-parameter structure
    belongs to the base class. The empty structure is a member.

    Raises
    ------
    ValidationError
        If the oracle does not accept the signature.
    """
    base.check_signature(s.signature)
    return all(base.member(s.structures[b]) for b in s.parameters)


def pfc_amalgamate(base: BaseClassOracle, common: PfcStructure, left: PfcStructure, right: PfcStructure) -> PfcAmalgam:
    """
    Strong amalgam of two extensions of ``common``.

    Both sides must contain ``common`` literally (same names, same induced
    structures). Right-hand objects and parameters outside the common part
    are renamed when they clash with the left. The object maps are fixed
    once and every shared parameter is amalgamated along them; one-sided
    parameters are extended to the whole object set by the oracle.

    Parameters
    ----------
    base : BaseClassOracle
        The base class.
    common : PfcStructure
        The common part (A, D).
    left, right : PfcStructure
        Extensions (B, E) and (C, F).

    Returns
    -------
    PfcAmalgam
        The amalgam (G, E u F) with its embeddings.

    Raises
    ------
    ValidationError
        If a side does not extend ``common``.
    OracleError
        If the oracle rejects an input or misbehaves.
    InternalInvariantError
        If the per-parameter amalgams disagree on the object maps.
    """
    for s in (common, left, right):
        base.check_signature(s.signature)
    if not (left.signature == right.signature == common.signature):
        raise ValidationError({'signature': 'All sides must share one signature'})
    for label, side in (('left', left), ('right', right)):
        if not common.objects <= side.objects or not set(common.parameters) <= set(side.parameters):
            raise ValidationError({label: f'{label} side does not contain the common part'})
        if side.restrict(common.objects, common.parameters) != common:
            raise ValidationError({label: f'{label} side does not induce the common structures'})
    for label, side in (('common', common), ('left', left), ('right', right)):
        if not in_class(side, base):
            raise OracleError(f'{base.name}: {label} structure is not in the class')

    g = {x: x for x in left.objects}
    h = glue(left.objects, right.objects, {x: x for x in common.objects})
    objects = frozenset(g.values()) | frozenset(h.values())
    renamed = glue(left.parameters, right.parameters, {p: p for p in common.parameters})

    structures: dict[str, FinRelStructure] = {}
    identity = {x: x for x in common.objects}
    for d in common.parameters:
        amalgam, gd, hd = base.strong_amalgamate(
            common.structure(d), left.structure(d), right.structure(d), identity, identity
        )
        if gd != g or hd != h:
            raise InternalInvariantError(f'{base.name}: amalgam over parameter {d!r} uses different object maps')
        structures[d] = amalgam
    for a in left.parameters:
        if a not in structures:
            structures[a] = base.extend(left.structure(a), objects - frozenset(g.values()))
    for a in right.parameters:
        if a not in common.parameters:
            image = right.structure(a).rename(h)
            structures[renamed[a]] = base.extend(image, objects - frozenset(h.values()))

    parameters = tuple(left.parameters) + tuple(renamed[a] for a in right.parameters if a not in common.parameters)
    result = PfcStructure(objects, parameters, common.signature, structures)

    if any(g[x] != h[x] for x in common.objects):
        raise InternalInvariantError('Amalgam square does not commute')
    if set(g.values()) & set(h.values()) != set(common.objects):
        raise InternalInvariantError('Object images meet outside the common part')
    for a in left.parameters:
        if not is_embedding(g, left.structure(a), result.structure(a)):
            raise OracleError(f"{base.name}: left side does not embed under parameter '{a}'")
    for a in right.parameters:
        if not is_embedding(h, right.structure(a), result.structure(renamed[a])):
            raise OracleError(f"{base.name}: right side does not embed under parameter '{renamed[a]}'")
    if not in_class(result, base):
        raise OracleError(f'{base.name}: amalgam is not in the class')
    logger.info(f'Amalgamated {len(left.objects)}+{len(right.objects)} objects over {len(common.objects)} '
                f'with {len(common.parameters)} shared parameters -> {len(objects)} objects, {len(parameters)} parameters')
    return PfcAmalgam(result, g, h, renamed)


def pasting1_build(parameters: Sequence[str], shared: Iterable[str],
                   fragments: Sequence[tuple[FinRelStructure, FinRelStructure, str]],
                   base: BaseClassOracle | None = None, star: str = '*',
                   signature: Signature | None = None) -> PfcStructure:
    """
    Realize one new object over several parameters at once.

    Fragment i is ``(C_i, D_i, d_i)``: ``D_i`` extends ``C_i`` (a structure
    on the shared objects) by the single new object ``d_i``. The result has
    objects ``shared`` plus a star, and under parameter ``p_i`` the star
    plays the part of ``d_i``.

    Raises
    ------
    ValidationError
        If a fragment is not of the stated form or its ``C_i`` is not the
        reduct of ``D_i``.
    """
    shared = frozenset(shared)
    if len(parameters) != len(fragments):
        raise ValidationError({'fragments': f'{len(parameters)} parameters but {len(fragments)} fragments'})
    if len(set(parameters)) != len(parameters):
        raise ValidationError({'parameters': 'Parameters must be distinct'})
    star = fresh_name(star, shared)
    signatures = {d.signature for _, d, _ in fragments}
    if len(signatures) > 1:
        raise ValidationError({'fragments': 'Fragments use different signatures'})
    signature = signatures.pop() if signatures else (signature or ())

    structures = {}
    for p, (c, d, new) in zip(parameters, fragments):
        if new in shared or c.universe != shared or d.universe != shared | {new}:
            raise ValidationError({'fragments': f"Fragment for '{p}' must add exactly one new object to the shared set"})
        if d.restrict(shared) != c:
            raise ValidationError({'fragments': f"Fragment for '{p}': C is not the reduct of D"})
        if base is not None and not base.member(d):
            raise ValidationError({'fragments': f"Fragment for '{p}' is not in the {base.name} class"})
        structures[p] = d.rename({new: star})

    result = PfcStructure(shared | {star}, tuple(parameters), signature, structures)
    for p, (_, d, new) in zip(parameters, fragments):
        mapping = {x: x for x in shared} | {new: star}
        if not is_embedding(mapping, d, result.structure(p)):
            raise InternalInvariantError(f"Pasted structure under '{p}' is not isomorphic to its fragment")
    return result


def pasting2_build(base: BaseClassOracle, m: PfcStructure, a: Iterable[str], b: Iterable[str], c: Iterable[str],
                   b0: str, b1: str, name: str = 'b*') -> tuple[PfcStructure, str]:
    """
    Add a parameter agreeing with ``b0`` on ``A u C`` and with ``b1`` on
    ``B u C``.

    The new structure on ``A u B u C`` is the strong amalgam of the two
    restrictions over ``C``; the remaining objects are added by the oracle.

    Returns
    -------
    tuple
        The extended structure and the name of the new parameter.

    Raises
    ------
    ValidationError
        If ``A n B`` is not inside ``C`` or the two restrictions to ``C``
        differ.
    OracleError
        If the amalgam does not restrict back to both sides.
    """
    a, b, c = frozenset(a), frozenset(b), frozenset(c)
    if not (a & b) <= c:
        raise ValidationError({'objects': f'A and B meet outside C in {sorted((a & b) - c)}'})
    if not (a | b | c) <= m.objects:
        raise ValidationError({'objects': 'A, B and C must be objects of the structure'})
    base.check_signature(m.signature)
    ac = m.structure(b0).restrict(a | c)
    bc = m.structure(b1).restrict(b | c)
    core = m.structure(b0).restrict(c)
    if core != m.structure(b1).restrict(c):
        raise ValidationError({'parameters': f"'{b0}' and '{b1}' disagree on C"})

    identity = {x: x for x in c}
    amalgam, _, h = base.strong_amalgamate(core, ac, bc, identity, identity)
    if any(h[x] != x for x in bc.universe):
        raise InternalInvariantError('Amalgam renamed objects of B although A and B meet inside C')
    full = base.extend(amalgam, m.objects - amalgam.universe)

    new = fresh_name(name, set(m.parameters))
    result = PfcStructure(m.objects, m.parameters + (new,), m.signature, {**m.structures, new: full})
    if full.restrict(a | c) != ac or full.restrict(b | c) != bc:
        raise OracleError(f'{base.name}: new parameter does not restrict to both sides')
    logger.info(f"Pasted parameter '{new}' from '{b0}' on {len(a | c)} objects and '{b1}' on {len(b | c)} objects")
    return result, new


def imaginary_cover(m: FinRelStructure, class_size: int, relation: str = 'E') -> FinRelStructure:
    """
    Replace every element by a class of ``class_size`` copies.

    Copies are named ``x/i``; ``relation`` holds between copies of the same
    element and every relation of ``m`` is lifted through the first
    coordinate.

    Examples
    --------
    >>> m = FinRelStructure.build(['a'], [('R', 1)], {'R': [('a',)]})
    >>> sorted(imaginary_cover(m, 2).universe)
    ['a/0', 'a/1']
    """
    if class_size < 1:
        raise ValidationError({'class_size': f'Class size must be at least 1, got {class_size}'})
    if relation in dict(m.signature):
        raise ValidationError({'relation': f"Relation '{relation}' is already in the signature"})
    copies = {x: [f'{x}/{i}' for i in range(class_size)] for x in m.universe}
    relations = {
        name: frozenset(lifted for t in tuples for lifted in product(*(copies[x] for x in t)))
        for name, tuples in m.relations.items()
    }
    relations[relation] = frozenset((u, v) for x in m.universe for u in copies[x] for v in copies[x])
    universe = frozenset(u for members in copies.values() for u in members)
    return FinRelStructure(universe, m.signature + ((relation, 2),), relations)


def _pasted_name(f: tuple[int, ...]) -> str:
    return "x" + ".".join(str(j) for j in f)


def cover_projection(cover: FinRelStructure) -> dict[str, str]:
    """The quotient map ``x/i -> x`` of an imaginary cover."""
    return {u: u.rsplit('/', 1)[0] for u in cover.universe}


class PfcService:
    """
    Finite constructions over a base class.

    Attributes
    ----------
    settings : EngineSettings
        Size budget for the demo array.
    patterns : PatternService
        Verifier for the demo certificate.
    """

    def __init__(self, settings: EngineSettings | None = None, patterns: PatternService | None = None):
        self.settings = settings or default_settings
        self.patterns = patterns or PatternService(self.settings)

    def tp2_demo(self, rows: int, cols: int) -> tuple[Certificate, PfcStructure]:
        """
        A TP2 array read off an amalgam over equivalence relations.

        Objects ``a_0 .. a_{cols-1}`` are pairwise inequivalent under every
        parameter ``p_0 .. p_{rows-1}``. For every function f from rows to
        columns a new object ``x_f`` is pasted in, joining the class of
        ``a_f(i)`` under ``p_i``; all pastings are amalgamated over the
        common part. Cell (i, j) holds the functions f whose ``x_f`` is
        equivalent to ``a_j`` under ``p_i``.

        Returns
        -------
        tuple
            A verified TP2 certificate with k = 2 and the structure it was
            read from.

        Raises
        ------
        BudgetExceededError
            If ``cols ** rows`` exceeds the canonical cell budget.
        """
        if rows < 0 or cols < 1:
            raise ValidationError({'dims': f'Invalid dimensions {rows}x{cols}'})
        if cols ** rows > self.settings.canonical_cell_budget:
            raise BudgetExceededError(
                f'{rows}x{cols} needs {cols ** rows} pasted objects, budget is {self.settings.canonical_cell_budget}',
                space_size=cols ** rows,
            )
        base = EquivalenceOracle()
        signature = (('E', 2),)
        points = [f'a{j}' for j in range(cols)]
        params = tuple(f'p{i}' for i in range(rows))
        discrete = FinRelStructure.build(points, signature, {'E': [(x, x) for x in points]})
        current = PfcStructure(frozenset(points), params, signature, {p: discrete for p in params})
        common = current

        functions = list(product(range(cols), repeat=rows))
        for f in functions:
            new = _pasted_name(f)
            fragments = []
            for i in range(rows):
                joined = [(new, new), (new, points[f[i]]), (points[f[i]], new)]
                d = FinRelStructure.build(points + [new], signature, {'E': [(x, x) for x in points] + joined})
                fragments.append((discrete, d, new))
            pasted = pasting1_build(params, points, fragments, base=base, star=new, signature=signature)
            current = pfc_amalgamate(base, common, current, pasted).structure

        cells = tuple(
            tuple(
                frozenset(index for index, f in enumerate(functions)
                          if current.structure(params[i]).holds('E', (_pasted_name(f), points[col])))
                for col in range(cols)
            )
            for i in range(rows)
        )
        array = InpArray(rows, cols, len(functions), cells)
        certificate = self.patterns.verify(Certificate(PatternKind.TP2, {'k': 2}, array))
        logger.info(f'tp2_demo {rows}x{cols}: {len(current.objects)} objects, ok={certificate.ok}')
        return certificate, current

