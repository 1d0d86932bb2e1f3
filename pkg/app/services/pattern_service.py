import logging
from itertools import product
from typing import Any, Iterator, Sequence

from core.config import EngineSettings, settings as default_settings
from core.exceptions import BudgetExceededError, MalformedPayloadError, ValidationError
from models.patterns import (
    Certificate,
    InpArray,
    Label,
    LabeledTree,
    PatternKind,
    Verdict,
    Violation,
)
from models.tree import Node, TreeShape
from services.treeidx import comparable

logger = logging.getLogger(__name__)


def is_consistent(sets: Sequence[Label]) -> bool:
    """
    Nonempty intersection; the empty family is consistent.

    Examples
    --------
    >>> is_consistent([])
    True
    >>> is_consistent([frozenset({0, 1}), frozenset({1})])
    True
    """
    if not sets:
        return True
    running = sets[0]
    for members in sets[1:]:
        running = running & members
        if not running:
            return False
    return bool(running)


def consistent_subfamilies(sets: Sequence[Label], k: int, start: Label | None = None) -> Iterator[tuple[int, ...]]:
    """
    Yield, in lex order of index tuples, every k-element subfamily with a
    nonempty intersection.

    Parameters
    ----------
    sets : sequence of frozenset
        The family, indexed by position.
    k : int
        Size of the subfamilies.
    start : frozenset, optional
        Every intersection is taken together with this set as well.
    """
    n = len(sets)

    def extend(first: int, chosen: list[int], running: Label | None) -> Iterator[tuple[int, ...]]:
        if len(chosen) == k:
            yield tuple(chosen)
            return
        for i in range(first, n - (k - len(chosen)) + 1):
            inter = sets[i] if running is None else running & sets[i]
            if inter:
                chosen.append(i)
                yield from extend(i + 1, chosen, inter)
                chosen.pop()

    yield from extend(0, [], start)


def is_k_inconsistent(sets: Sequence[Label], k: int) -> bool:
    """
    Every k-element subfamily has an empty intersection.

    Raises
    ------
    ValidationError
        If ``k < 2``.

    Examples
    --------
    >>> family = [frozenset({0, 1}), frozenset({1, 2}), frozenset({0, 2})]
    >>> is_k_inconsistent(family, 2), is_k_inconsistent(family, 3)
    (False, True)
    """
    if k < 2:
        raise ValidationError({'k': f'k-inconsistency needs k >= 2, got {k}'})
    return next(consistent_subfamilies(sets, k), None) is None


def inconsistency_degree(sets: Sequence[Label]) -> int:
    """Least k >= 2 for which the family is k-inconsistent."""
    for k in range(2, len(sets) + 1):
        if is_k_inconsistent(sets, k):
            return k
    return max(2, len(sets) + 1)


class _CapReached(Exception):
    pass


class _Collector:
    def __init__(self, cap: int):
        self.cap = cap
        self.violations: list[Violation] = []
        self.failed = False
        self.truncated = False

    def add(self, violation: Violation) -> None:
        self.failed = True
        if len(self.violations) >= self.cap:
            self.truncated = True
            raise _CapReached()
        self.violations.append(violation)

    def verdict(self) -> Verdict:
        return Verdict(ok=not self.failed, violations=tuple(self.violations), truncated=self.truncated)


class PatternService:
    """
    Verification of pattern certificates in set semantics.

    A label is a subset of a finite domain; a family is consistent when its
    intersection is nonempty.

    Attributes
    ----------
    settings : EngineSettings
        Violation cap and canonical witness budgets.
    """

    def __init__(self, settings: EngineSettings | None = None):
        """
        Initialize PatternService.

        Parameters
        ----------
        settings : EngineSettings, optional
            Defaults to the process-wide settings.
        """
        self.settings = settings or default_settings

    # ------------------------------------------------------------------ params

    def check_params(self, kind: PatternKind, params: dict[str, Any], payload: LabeledTree | InpArray) -> dict[str, Any]:
        """
        Validate the payload type and parameters claimed for ``kind``.

        Returns
        -------
        dict
            Normalized parameters.

        Raises
        ------
        MalformedPayloadError
            If the payload or the parameters do not fit the kind.
        """
        if kind.uses_array and not isinstance(payload, InpArray):
            raise MalformedPayloadError(f'{kind.value} needs an array payload')
        if not kind.uses_array and not isinstance(payload, LabeledTree):
            raise MalformedPayloadError(f'{kind.value} needs a tree payload')
        if kind.needs_binary and payload.shape.depth > 1 and payload.shape.branching != 2:
            raise MalformedPayloadError(f'{kind.value} needs a binary tree, got {payload.shape}')

        name = kind.param_name
        if name is None:
            return {}
        if name not in params:
            raise MalformedPayloadError(f"{kind.value} needs parameter '{name}'")
        if name == 'bounds':
            try:
                bounds = [int(x) for x in params['bounds']]
            except (TypeError, ValueError) as e:
                raise MalformedPayloadError(f'{kind.value} bounds must be a list of integers') from e
            expected = payload.rows if isinstance(payload, InpArray) else max(0, payload.shape.depth - 1)
            if len(bounds) != expected:
                raise MalformedPayloadError(f'{kind.value} needs {expected} bounds, got {len(bounds)}')
            if any(b < 2 for b in bounds):
                raise MalformedPayloadError(f'{kind.value} bounds must be at least 2')
            return {'bounds': bounds}
        try:
            value = int(params[name])
        except (TypeError, ValueError) as e:
            raise MalformedPayloadError(f"{kind.value} parameter '{name}' must be an integer") from e
        if value < 2:
            raise MalformedPayloadError(f"{kind.value} parameter '{name}' must be at least 2")
        return {name: value}

    @staticmethod
    def level_bounds(c: Certificate) -> list[int]:
        """Per-level sibling bounds of a CDT-like certificate (levels 1, 2, ...)."""
        depth = c.payload.shape.depth
        if c.kind is PatternKind.CDT:
            return list(c.params['bounds'])
        if c.kind is PatternKind.CDT_N:
            return [int(c.params['n'])] * max(0, depth - 1)
        if c.kind is PatternKind.CDT_LEVEL:
            return [int(c.params['k'])] * max(0, depth - 1)
        if c.kind in (PatternKind.SCT, PatternKind.TP1, PatternKind.SOP2):
            return [2] * max(0, depth - 1)
        if c.kind in (PatternKind.SCT_K, PatternKind.TP, PatternKind.KTP1):
            return [int(c.params['k'])] * max(0, depth - 1)
        raise ValidationError({'kind': f'{c.kind.value} carries no per-level bounds'})

    # ------------------------------------------------------------------ verify

    def verify(self, c: Certificate, cap: int | None = None) -> Certificate:
        """
        Check every defining condition of ``c.kind`` on the payload.

        Parameters
        ----------
        c : Certificate
            The claimed witness.
        cap : int, optional
            Maximum number of violations listed; defaults to the settings.
            The verdict itself is exact whatever the cap.

        Returns
        -------
        Certificate
            A copy with the verdict filled in.

        Raises
        ------
        MalformedPayloadError
            If the payload does not fit the kind.
        """
        params = self.check_params(c.kind, c.params, c.payload)
        collector = _Collector(self.settings.violation_cap if cap is None else cap)
        try:
            if isinstance(c.payload, InpArray):
                self._verify_array(c.kind, params, c.payload, collector)
            else:
                self._verify_tree(c.kind, params, c.payload, collector)
        except _CapReached:
            pass
        verdict = collector.verdict()
        logger.debug(f'Verified {c.kind.value} {params}: ok={verdict.ok}, violations={len(verdict.violations)}')
        return Certificate(kind=c.kind, params=params, payload=c.payload, verdict=verdict, provenance=c.provenance)

    def violations(self, c: Certificate, cap: int) -> list[Violation]:
        return list(self.verify(c, cap=cap).verdict.violations)

    def _verify_tree(self, kind: PatternKind, params: dict[str, Any], tree: LabeledTree, out: _Collector) -> None:
        self._check_paths(tree, out)
        if kind is PatternKind.TP:
            self._check_siblings(tree, lambda level: params['k'], out)
        elif kind in (PatternKind.TP1, PatternKind.SOP2, PatternKind.SCT):
            self._check_antichains(tree, 2, out)
        elif kind in (PatternKind.KTP1, PatternKind.SCT_K):
            self._check_antichains(tree, params['k'], out)
        elif kind is PatternKind.WEAK_KTP1:
            self._check_distant_siblings(tree, params['k'], out)
        elif kind is PatternKind.SOP1:
            self._check_sop1(tree, out)
        elif kind is PatternKind.CDT:
            self._check_siblings(tree, lambda level: params['bounds'][level - 1], out)
        elif kind is PatternKind.CDT_N:
            self._check_siblings(tree, lambda level: params['n'], out)
        elif kind is PatternKind.CDT_LEVEL:
            self._check_levels(tree, params['k'], out)

    def _verify_array(self, kind: PatternKind, params: dict[str, Any], array: InpArray, out: _Collector) -> None:
        bounds = params['bounds'] if kind is PatternKind.INP else [params['k']] * array.rows
        for i in range(array.rows):
            for subset in consistent_subfamilies(array.row(i), bounds[i]):
                out.add(Violation('row', cells=tuple((i, j) for j in subset)))
        for f in product(range(array.cols), repeat=array.rows):
            if not is_consistent([array.cell(i, j) for i, j in enumerate(f)]):
                out.add(Violation('transversal', cells=tuple(enumerate(f))))

    @staticmethod
    def _check_paths(tree: LabeledTree, out: _Collector) -> None:
        inter = tree.path_intersections
        for path in tree.shape.paths:
            if path and not inter[path]:
                out.add(Violation('path', nodes=(path,)))

    @staticmethod
    def _check_siblings(tree: LabeledTree, bound, out: _Collector) -> None:
        shape = tree.shape
        for parent in shape.nodes:
            children = shape.children(parent)
            if not children:
                continue
            family = [tree.labels[child] for child in children]
            for subset in consistent_subfamilies(family, bound(len(parent) + 1)):
                out.add(Violation('siblings', nodes=tuple(children[i] for i in subset)))

    @staticmethod
    def _check_levels(tree: LabeledTree, k: int, out: _Collector) -> None:
        for level in range(1, tree.shape.depth):
            nodes = tree.shape.level_nodes(level)
            for subset in consistent_subfamilies([tree.labels[node] for node in nodes], k):
                out.add(Violation('level', nodes=tuple(nodes[i] for i in subset)))

    @staticmethod
    def _check_antichains(tree: LabeledTree, k: int, out: _Collector) -> None:
        nodes = tree.shape.labeled_nodes
        labels = tree.labels
        rule = 'incomparable' if k == 2 else 'antichain'

        def extend(first: int, chosen: list[Node], running: Label | None) -> None:
            if len(chosen) == k:
                out.add(Violation(rule, nodes=tuple(chosen)))
                return
            for i in range(first, len(nodes)):
                node = nodes[i]
                if any(comparable(node, other) for other in chosen):
                    continue
                inter = labels[node] if running is None else running & labels[node]
                if inter:
                    chosen.append(node)
                    extend(i + 1, chosen, inter)
                    chosen.pop()

        extend(0, [], None)

    @staticmethod
    def _check_distant_siblings(tree: LabeledTree, k: int, out: _Collector) -> None:
        shape = tree.shape
        labels = tree.labels

        def extend(branches: tuple[Node, ...], first: int, chosen: list[Node], running: Label | None) -> None:
            if len(chosen) == k:
                out.add(Violation('distant-siblings', nodes=tuple(chosen)))
                return
            for b in range(first, len(branches) - (k - len(chosen)) + 1):
                for node in shape.subtree(branches[b]):
                    inter = labels[node] if running is None else running & labels[node]
                    if inter:
                        chosen.append(node)
                        extend(branches, b + 1, chosen, inter)
                        chosen.pop()

        for top in shape.nodes:
            branches = shape.children(top)
            if len(branches) >= k:
                extend(branches, 0, [], None)

    @staticmethod
    def _check_sop1(tree: LabeledTree, out: _Collector) -> None:
        shape = tree.shape
        for parent in shape.nodes:
            if not shape.children(parent):
                continue
            right = tree.labels[parent + (1,)]
            for node in shape.subtree(parent + (0,)):
                if right & tree.labels[node]:
                    out.add(Violation('sop1', nodes=(parent + (1,), node)))

    # ---------------------------------------------------------- constructions

    def canonical_witness(self, kind: PatternKind, shape: TreeShape | None = None,
                          dims: tuple[int, int] | None = None) -> Certificate:
        """
        Standard witnesses.

        SOP2, TP1 and SCT take the maximal paths as domain and label a node
        by the paths through it. TP2 and INP take all transversals as domain
        and put into cell (i, j) the transversals choosing j in row i.

        Raises
        ------
        ValidationError
            For unsupported kinds or missing dimensions.
        BudgetExceededError
            If the witness would exceed the configured size budget.
        """
        if kind in (PatternKind.SOP2, PatternKind.TP1, PatternKind.SCT):
            if shape is None:
                raise ValidationError({'shape': f'{kind.value} witness needs a tree shape'})
            if kind is PatternKind.SOP2 and shape.depth > 1 and shape.branching != 2:
                raise ValidationError({'shape': f'SOP2 witness needs a binary shape, got {shape}'})
            if shape.node_count > self.settings.canonical_node_budget:
                raise BudgetExceededError(
                    f'{shape} has {shape.node_count} nodes, budget is {self.settings.canonical_node_budget}',
                    space_size=shape.node_count,
                )
            return self.verify(Certificate(kind, {}, self.path_tree(shape)))

        if kind in (PatternKind.TP2, PatternKind.INP):
            if dims is None:
                raise ValidationError({'dims': f'{kind.value} witness needs array dimensions'})
            rows, cols = dims
            if rows < 0 or cols < 1:
                raise ValidationError({'dims': f'Invalid dimensions {rows}x{cols}'})
            if cols ** rows > self.settings.canonical_cell_budget:
                raise BudgetExceededError(
                    f'{rows}x{cols} needs {cols ** rows} transversals, budget is {self.settings.canonical_cell_budget}',
                    space_size=cols ** rows,
                )
            array = self.transversal_array(rows, cols)
            params = {'k': 2} if kind is PatternKind.TP2 else {'bounds': [2] * rows}
            return self.verify(Certificate(kind, params, array))

        raise ValidationError({'kind': f'No canonical witness for {kind.value}'})

    @staticmethod
    def path_tree(shape: TreeShape) -> LabeledTree:
        """Domain = maximal paths, label = paths through the node."""
        paths = shape.paths
        labels: dict[Node, set[int]] = {node: set() for node in shape.labeled_nodes}
        for index, path in enumerate(paths):
            for level in range(1, len(path) + 1):
                labels[path[:level]].add(index)
        return LabeledTree(shape, len(paths), {node: frozenset(members) for node, members in labels.items()})

    @staticmethod
    def transversal_array(rows: int, cols: int) -> InpArray:
        """Domain = all row-to-column functions; cell (i, j) = those choosing j at i."""
        functions = list(product(range(cols), repeat=rows))
        cells = tuple(
            tuple(frozenset(index for index, f in enumerate(functions) if f[i] == j) for j in range(cols))
            for i in range(rows)
        )
        return InpArray(rows, cols, len(functions), cells)

    def cdt_from_inp(self, source: InpArray | Certificate, bounds: list[int] | None = None,
                     branching: int | None = None) -> Certificate:
        """
        Read an array as a tree: a node of level l gets the cell of row l-1
        in the column given by its last entry.

        Parameters
        ----------
        source : InpArray or Certificate
            The array, or an INP/TP2 certificate carrying its row bounds.
        bounds : list of int, optional
            Row bounds; defaults to the certificate's bounds, else the least
            bound each row satisfies.
        branching : int, optional
            Number of columns used; defaults to all of them.

        Returns
        -------
        Certificate
            A verified CDT certificate on shape ``(branching, rows + 1)``.

        Raises
        ------
        ValidationError
            If ``branching`` exceeds the number of columns.
        """
        if isinstance(source, Certificate):
            array = source.payload
            if not isinstance(array, InpArray):
                raise ValidationError({'payload': 'cdt_from_inp needs an array certificate'})
            if bounds is None and source.kind is PatternKind.INP:
                bounds = list(source.params['bounds'])
            elif bounds is None and source.kind is PatternKind.TP2:
                bounds = [int(source.params['k'])] * array.rows
        else:
            array = source
        width = array.cols if branching is None else branching
        if width < 1 or width > array.cols:
            raise ValidationError({'branching': f'Branching {width} must lie in 1..{array.cols}'})
        if bounds is None:
            bounds = [inconsistency_degree(array.row(i)[:width]) for i in range(array.rows)]
        if len(bounds) != array.rows:
            raise ValidationError({'bounds': f'Expected {array.rows} bounds, got {len(bounds)}'})

        shape = TreeShape(width, array.rows + 1)
        labels = {node: array.cell(len(node) - 1, node[-1]) for node in shape.labeled_nodes}
        tree = LabeledTree(shape, array.domain_size, labels)
        return self.verify(Certificate(PatternKind.CDT, {'bounds': list(bounds)}, tree))
