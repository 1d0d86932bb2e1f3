import logging
from math import ceil, isqrt
from typing import Any

from core.config import EngineSettings, settings as default_settings
from core.exceptions import (
    InternalInvariantError,
    InvalidInputError,
    NoMinimalKError,
    ShapeInsufficiencyError,
    TransformPostconditionError,
    ValidationError,
)
from models.patterns import Certificate, InpArray, Label, LabeledTree, PatternKind, Provenance
from models.tree import Node, TreeShape, node_to_str
from services.pattern_service import PatternService
from services.search_service import SearchService
from services.treeops import (
    apply_intersect,
    binary_restriction,
    comb_embedding,
    elongation,
    interleave_node,
    interleaving,
    restriction,
    spread_embedding,
    spread_embedding_at,
    stretching,
    widening,
)

logger = logging.getLogger(__name__)

# Kinds whose sibling families carry per-level bounds (see PatternService.level_bounds).
CDT_LIKE = (
    PatternKind.CDT,
    PatternKind.CDT_N,
    PatternKind.CDT_LEVEL,
    PatternKind.SCT,
    PatternKind.SCT_K,
    PatternKind.TP,
    PatternKind.TP1,
    PatternKind.SOP2,
    PatternKind.KTP1,
)


def _intersection(labels: list[Label], domain: Label) -> Label:
    running = domain
    for label in labels:
        running = running & label
    return running


class TransformService:
    """
    Constructive pattern transformations over set semantics.

    Every transform checks its input certificate, builds the output through
    node maps and label intersections, and re-verifies the result. Outputs
    carry a provenance record naming the maps applied and the case that
    fired.

    Attributes
    ----------
    settings : EngineSettings
        Violation caps.
    patterns : PatternService
        Verifier.
    search : SearchService
        Used by the dichotomy to extract inp-patterns.
    """

    def __init__(self, settings: EngineSettings | None = None, patterns: PatternService | None = None,
                 search: SearchService | None = None):
        self.settings = settings or default_settings
        self.patterns = patterns or PatternService(self.settings)
        self.search = search or SearchService(self.settings, self.patterns)

    # ----------------------------------------------------------------- helpers

    def _require(self, c: Certificate, kinds: tuple[PatternKind, ...], transform: str) -> Certificate:
        if c.kind not in kinds:
            raise ValidationError({'kind': f"{transform} accepts {[k.value for k in kinds]}, got {c.kind.value}"})
        checked = self.patterns.verify(c)
        if not checked.ok:
            raise InvalidInputError(
                f'{transform}: input does not verify {c.kind.value} {checked.params}',
                violations=[v.describe() for v in checked.verdict.violations],
            )
        return checked

    def _finish(self, c: Certificate, provenance: Provenance) -> Certificate:
        checked = self.patterns.verify(c)
        if not checked.ok:
            case = f' ({provenance.case_fired})' if provenance.case_fired else ''
            raise TransformPostconditionError(
                f'{provenance.transform}{case}: output does not verify {c.kind.value} {checked.params}',
                violations=[v.describe() for v in checked.verdict.violations],
            )
        return checked.with_provenance(provenance)

    @staticmethod
    def _tree(c: Certificate) -> LabeledTree:
        if not isinstance(c.payload, LabeledTree):
            raise ValidationError({'payload': f'{c.kind.value} certificate does not carry a tree'})
        return c.payload

    # ----------------------------------------------------- path normalization

    def path_normalize(self, c: Certificate) -> Certificate:
        """
        Replace every label by the intersection of the labels along its path.

        Labels only shrink and path intersections are unchanged, so the
        output verifies the same kind with the same parameters.
        """
        tree_kinds = tuple(kind for kind in PatternKind if not kind.uses_array)
        c = self._require(c, tree_kinds, 'path_normalize')
        tree = self._tree(c)
        inter = tree.path_intersections
        out = tree.with_labels({node: inter[node] for node in tree.shape.labeled_nodes})
        provenance = Provenance('path_normalize')
        return self._finish(Certificate(c.kind, c.params, out), provenance)

    def cdt2_to_sct(self, c: Certificate) -> Certificate:
        """
        Turn a cdt-pattern with 2-inconsistent sibling families into an
        sct-pattern on the same shape.

        Raises
        ------
        ValidationError
            If some sibling bound is not 2.
        InvalidInputError
            If the input does not verify.
        """
        c = self._require(c, CDT_LIKE, 'cdt2_to_sct')
        bounds = self.patterns.level_bounds(c)
        if any(b != 2 for b in bounds):
            raise ValidationError({'bounds': f'cdt2_to_sct needs sibling bound 2 at every level, got {bounds}'})
        tree = self._tree(c)
        inter = tree.path_intersections
        out = tree.with_labels({node: inter[node] for node in tree.shape.labeled_nodes})
        logger.info(f'cdt2_to_sct on {tree.shape}')
        return self._finish(Certificate(PatternKind.SCT, {}, out), Provenance('cdt2_to_sct'))

    # ------------------------------------------------------ sct,k -> cdt,2

    def sctk_to_cdt2_step(self, c: Certificate, m: int) -> Certificate:
        """
        One round of the level-halving case split.

        The input is an sct-pattern (or a tree whose levels are
        k-inconsistent) with at least ``m * m`` labeled levels. For each
        block ``i < m`` of m levels the test set is the intersection of the
        labels on the two spines starting at ``0^(im)+(0,)`` and
        ``0^(im)+(1,)``.

        Widen-restrict (least i whose test set is nonempty): widen 2-fold at level
        ``im + 1``, restrict to levels ``im .. im + m``, intersect. The
        output has k-inconsistent levels with k halved (at least 2). The
        output branching is half the input branching, so this case needs
        branching at least 4.

        Elongate (every test set empty): m-fold elongation with intersected
        labels; the output has 2-inconsistent sibling families.

        Parameters
        ----------
        c : Certificate
            SCT, SCT_K or CDT_LEVEL certificate.
        m : int
            Block size; the output has m labeled levels.

        Returns
        -------
        Certificate
            CDT_LEVEL after widen-restrict, CDT_N with n = 2 after elongate.

        Raises
        ------
        InvalidInputError
            If the input does not verify.
        ShapeInsufficiencyError
            If the tree is too shallow or not branching, or if a block is
            consistent and the branching is below 4.
        TransformPostconditionError
            If the output does not verify.
        """
        c = self._require(c, (PatternKind.SCT, PatternKind.SCT_K, PatternKind.CDT_LEVEL), 'sctk_to_cdt2_step')
        tree = self._tree(c)
        shape = tree.shape
        k = 2 if c.kind is PatternKind.SCT else int(c.params['k'])
        if m < 1:
            raise ValidationError({'m': f'Block size must be at least 1, got {m}'})
        if shape.depth - 1 < m * m:
            raise ShapeInsufficiencyError(f'sctk_to_cdt2_step: {shape} has {shape.depth - 1} labeled levels, needs {m * m}')
        if shape.branching < 2:
            raise ShapeInsufficiencyError(f'sctk_to_cdt2_step: needs branching at least 2, got {shape}')

        tests = []
        for i in range(m):
            stem = (0,) * (i * m)
            nodes = [stem + (e,) + (0,) * (l - 1) for l in range(1, m + 1) for e in (0, 1)]
            tests.append(_intersection([tree.label(node) for node in nodes], tree.domain))
        fired = next((i for i, test in enumerate(tests) if test), None)
        if fired is not None and shape.branching < 4:
            raise ShapeInsufficiencyError(
                f'sctk_to_cdt2_step: block {fired} is consistent and widening it needs branching at least 4, got {shape}'
            )

        if fired is not None:
            half = shape.branching // 2
            levels = list(range(fired * m, fired * m + m + 1))
            widened = TreeShape(half, m * m + 1)
            restrict = restriction(levels, widened)
            widen = widening(2, fired * m + 1, widened, source=shape)
            nodemap = restrict.compose(widen)
            bound = max(2, ceil(k / 2))
            out = Certificate(PatternKind.CDT_LEVEL, {'k': bound}, apply_intersect(nodemap, tree))
            case = f'widen-restrict(i={fired})'
        else:
            nodemap = elongation(m, TreeShape(shape.branching, m + 1), source=shape)
            out = Certificate(PatternKind.CDT_N, {'n': 2}, apply_intersect(nodemap, tree))
            case = 'elongate'
        logger.info(f'sctk_to_cdt2_step on {shape} with m={m}, k={k}: {case}')
        provenance = Provenance(
            'sctk_to_cdt2_step',
            case_fired=case,
            ops_applied=(nodemap.ref(),),
            notes={'m': m, 'k_in': k, 'consistent_blocks': [i for i, test in enumerate(tests) if test]},
        )
        return self._finish(out, provenance)

    def sctk_to_cdt2(self, c: Certificate) -> Certificate:
        """
        Repeat :meth:`sctk_to_cdt2_step` until siblings are 2-inconsistent.

        Each round uses the largest m with ``m * m`` not exceeding the current
        number of labeled levels; the bound halves on every widen-restrict round, so at most
        ``ceil(log2 k)`` rounds run after the first.
        """
        current = c
        steps: list[dict[str, Any]] = []
        ops: list[dict[str, Any]] = []
        while True:
            levels = self._tree(current).shape.depth - 1
            m = isqrt(levels) if levels > 0 else 0
            if m < 1:
                raise ShapeInsufficiencyError(f'sctk_to_cdt2: no labeled level left in {self._tree(current).shape}')
            current = self.sctk_to_cdt2_step(current, m)
            steps.append({'m': m, 'case': current.provenance.case_fired})
            ops.extend(current.provenance.ops_applied)
            if current.kind is PatternKind.CDT_N or int(current.params['k']) <= 2:
                break
        if current.kind is PatternKind.CDT_LEVEL:
            current = current.as_kind(PatternKind.CDT_N, {'n': 2})
        provenance = Provenance(
            'sctk_to_cdt2',
            case_fired=steps[-1]['case'],
            ops_applied=tuple(ops),
            notes={'steps': steps},
        )
        return self._finish(current, provenance)

    # ------------------------------------------------ cdt -> sct,k or inp

    def cdt_to_sctk_or_inp(self, c: Certificate, k: int, m: int, path_intersect: bool = False) -> Certificate:
        """
        Either an sct-pattern with k-inconsistent antichains or an
        inp-pattern with k rows.

        The candidate lives on ``(b, m + 1)``: node ``nu`` takes the label of
        ``nu*`` (every entry followed by a 0) in the input. When the
        candidate fails, each violating antichain ``nu_0 .. nu_{k-1}``
        yields k rows: the sibling family of ``nu_i*`` at input level
        ``2 len(nu_i)``. The widest column choice whose transversals are
        consistent wins; width 1 is never accepted.

        Parameters
        ----------
        c : Certificate
            A cdt-like certificate with at least ``2m`` labeled levels.
        k : int
            Antichain size, at least 2.
        m : int
            Labeled levels of the candidate.
        path_intersect : bool
            Use path intersections instead of raw labels for the candidate.

        Returns
        -------
        Certificate
            SCT_K(k) (case ``sct``) or INP with k rows (case ``inp``).

        Raises
        ------
        InternalInvariantError
            If the candidate fails and no violating antichain yields an
            inp-pattern of width at least 2.
        """
        c = self._require(c, CDT_LIKE, 'cdt_to_sctk_or_inp')
        if k < 2:
            raise ValidationError({'k': f'k must be at least 2, got {k}'})
        if m < 0:
            raise ValidationError({'m': f'm must be non-negative, got {m}'})
        tree = self._tree(c)
        shape = tree.shape
        if shape.depth - 1 < 2 * m:
            raise ShapeInsufficiencyError(f'cdt_to_sctk_or_inp: {shape} has {shape.depth - 1} labeled levels, needs {2 * m}')
        bounds = self.patterns.level_bounds(c)

        nodemap = interleaving(TreeShape(shape.branching, m + 1), source=shape)
        if path_intersect:
            inter = tree.path_intersections
            labels = {node: inter[nodemap(node)[0]] for node in nodemap.target.labeled_nodes}
            candidate_tree = LabeledTree(nodemap.target, tree.domain_size, labels)
        else:
            candidate_tree = apply_intersect(nodemap, tree)
        candidate = self.patterns.verify(
            Certificate(PatternKind.SCT_K, {'k': k}, candidate_tree), cap=self.settings.violation_scan_cap
        )

        if candidate.ok:
            minimal = next(
                k2 for k2 in range(2, k + 1)
                if self.patterns.verify(Certificate(PatternKind.SCT_K, {'k': k2}, candidate_tree), cap=0).ok
            )
            logger.info(f'cdt_to_sctk_or_inp on {shape}: sct branch, minimal k {minimal}')
            provenance = Provenance('cdt_to_sctk_or_inp', case_fired='sct', minimal_k=minimal,
                                    ops_applied=(nodemap.ref(),), notes={'m': m})
            return self._finish(candidate, provenance)

        antichains = [v.nodes for v in candidate.verdict.violations if v.rule in ('antichain', 'incomparable')]
        if not antichains:
            raise TransformPostconditionError(
                'cdt_to_sctk_or_inp: candidate fails on paths',
                violations=[v.describe() for v in candidate.verdict.violations],
            )

        best: tuple[int, tuple[Node, ...], Certificate] | None = None
        for nodes in antichains:
            stars = [interleave_node(node) for node in nodes]
            rows = [[tree.label(star[:-1] + (j,)) for j in range(shape.branching)] for star in stars]
            row_bounds = [bounds[len(star) - 1] for star in stars]
            floor = best[0] + 1 if best else 2
            for width in range(shape.branching, floor - 1, -1):
                found = self.search.exists_inp_of_depth(rows, len(rows), width=width, bounds=row_bounds,
                                                        domain_size=tree.domain_size)
                if found is not None:
                    best = (width, nodes, found)
                    break
            if best and best[0] == shape.branching:
                break

        if best is None:
            raise InternalInvariantError(
                f'cdt_to_sctk_or_inp: no inp-pattern of width 2 or more under the consistent antichain '
                f'{[node_to_str(n) for n in antichains[0]]} ({len(antichains)} violations scanned)'
            )

        width, nodes, found = best
        logger.info(f'cdt_to_sctk_or_inp on {shape}: inp branch of width {width} from {[node_to_str(n) for n in nodes]}')
        provenance = Provenance(
            'cdt_to_sctk_or_inp',
            case_fired='inp',
            ops_applied=(nodemap.ref(),),
            notes={
                'm': m,
                'violation': [node_to_str(n) for n in nodes],
                'width': width,
                'violations_scanned': len(antichains),
            },
        )
        return self._finish(found.as_kind(PatternKind.INP, found.params), provenance)

    # --------------------------------------------------------- inp halving

    def inp_halving_step(self, c: Certificate, m: int) -> Certificate:
        """
        Halve the row bound of an inp-pattern with at least ``m * m`` rows.

        With ``k`` the largest row bound, block ``i < m`` is tested on the
        intersection of the first two cells of rows ``im .. im + m - 1``.

        Pair-columns (least consistent block i): row l of the output pairs up the
        cells of input row ``im + l``, bound ``max(2, ceil(k / 2))``.

        Merge-rows (no consistent block): cell ``(l, j)`` of the output intersects column j of input
        rows ``lm .. lm + m - 1``, bound 2.
        """
        c = self._require(c, (PatternKind.INP, PatternKind.TP2), 'inp_halving_step')
        array = c.payload
        bounds = list(c.params['bounds']) if c.kind is PatternKind.INP else [int(c.params['k'])] * array.rows
        k = max(bounds, default=2)
        if m < 1:
            raise ValidationError({'m': f'Block size must be at least 1, got {m}'})
        if array.rows < m * m:
            raise ShapeInsufficiencyError(f'inp_halving_step: {array.rows} rows, needs {m * m}')
        if array.cols < 2:
            raise ShapeInsufficiencyError(f'inp_halving_step: needs at least 2 columns, got {array.cols}')

        tests = []
        for i in range(m):
            cells = [array.cell(i * m + l, e) for l in range(m) for e in (0, 1)]
            tests.append(_intersection(cells, array.domain))
        fired = next((i for i, test in enumerate(tests) if test), None)

        if fired is not None:
            width = array.cols // 2
            cells = tuple(
                tuple(array.cell(fired * m + l, 2 * j) & array.cell(fired * m + l, 2 * j + 1) for j in range(width))
                for l in range(m)
            )
            bound = max(2, ceil(k / 2))
            out = InpArray(m, width, array.domain_size, cells)
            case = f'pair-columns(i={fired})'
        else:
            cells = tuple(
                tuple(_intersection([array.cell(l * m + r, j) for r in range(m)], array.domain) for j in range(array.cols))
                for l in range(m)
            )
            bound = 2
            out = InpArray(m, array.cols, array.domain_size, cells)
            case = 'merge-rows'
        logger.info(f'inp_halving_step on {array.rows}x{array.cols} with m={m}, k={k}: {case}')
        provenance = Provenance('inp_halving_step', case_fired=case, minimal_k=bound,
                                notes={'m': m, 'k_in': k, 'consistent_blocks': [i for i, t in enumerate(tests) if t]})
        return self._finish(Certificate(PatternKind.INP, {'bounds': [bound] * m}, out), provenance)

    def inp_halving(self, c: Certificate) -> Certificate:
        """Repeat :meth:`inp_halving_step` until every row bound is 2."""
        current = c
        steps: list[dict[str, Any]] = []
        while True:
            array = current.payload
            if steps and array.cols < 2:
                # one column: every row is 2-inconsistent vacuously
                current = current.as_kind(PatternKind.INP, {'bounds': [2] * array.rows})
                steps.append({'m': None, 'case': 'single-column'})
                break
            m = isqrt(array.rows)
            current = self.inp_halving_step(current, m)
            steps.append({'m': m, 'case': current.provenance.case_fired})
            if max(current.params['bounds'], default=2) <= 2:
                break
        provenance = Provenance('inp_halving', case_fired=steps[-1]['case'], minimal_k=2, notes={'steps': steps})
        return self._finish(current, provenance)

    # ------------------------------------------------------------ aleph_1

    def aleph1_stage(self, c: Certificate, n: int) -> Certificate:
        """
        Make the spine siblings at level ``n + 1`` pairwise inconsistent.

        After path normalization, k is the least integer with ``2**k`` at
        most the branching such that the labels on the 0-spines below the
        first ``2**k`` children of ``0^n`` have empty intersection, and N the
        least spine length that already gives an empty intersection. The
        tree is stretched N-fold at level ``n + 1``, then widened
        ``2**(k-1)``-fold at the same level, with intersected labels.

        Returns
        -------
        Certificate
            CDT on ``(b // 2**(k-1), depth - N + 1)``; the provenance notes
            list the spine pairs checked.

        Raises
        ------
        NoMinimalKError
            If no k fits the branching.
        TransformPostconditionError
            If the output fails CDT or a spine pair intersects.
        """
        c = self._require(c, CDT_LIKE, 'aleph1_stage')
        bounds = self.patterns.level_bounds(c)
        tree = self._tree(self.path_normalize(c))
        shape = tree.shape
        if n < 0 or n > shape.depth - 2:
            raise ValidationError({'n': f'Level {n} must lie in 0..{shape.depth - 2} for {shape}'})
        remaining = shape.depth - 1 - n
        stem = (0,) * n

        def spine_meet(width: int, length: int) -> Label:
            nodes = [stem + (i,) + (0,) * j for i in range(width) for j in range(length)]
            return _intersection([tree.label(node) for node in nodes], tree.domain)

        k = 1
        while 2 ** k <= shape.branching and spine_meet(2 ** k, remaining):
            k += 1
        if 2 ** k > shape.branching:
            raise NoMinimalKError(
                f'aleph1_stage: spine labels below {node_to_str(stem)} stay consistent for every 2**k <= {shape.branching}'
            )
        big_n = next(length for length in range(1, remaining + 1) if not spine_meet(2 ** k, length))
        factor = 2 ** (k - 1)
        out_shape = TreeShape(shape.branching // factor, shape.depth - big_n + 1)

        stretch = stretching(big_n, n + 1, TreeShape(shape.branching, out_shape.depth), source=shape)
        widen = widening(factor, n + 1, out_shape, source=stretch.target)
        nodemap = widen.compose(stretch)
        out_tree = apply_intersect(nodemap, tree)

        out_bounds = []
        for level in range(1, out_shape.depth):
            if level <= n:
                out_bounds.append(bounds[level - 1])
            elif level == n + 1:
                out_bounds.append(max(2, ceil(bounds[n] / factor)))
            else:
                out_bounds.append(bounds[level + big_n - 2])

        siblings = [stem + (i,) for i in range(out_shape.branching)]
        pairs = [(a, b) for x, a in enumerate(siblings) for b in siblings[x + 1:]]
        overlapping = [(a, b) for a, b in pairs if out_tree.label(a) & out_tree.label(b)]
        logger.info(f'aleph1_stage at level {n} of {shape}: k={k}, N={big_n}, output {out_shape}')
        provenance = Provenance(
            'aleph1_stage',
            case_fired=f'level {n + 1}',
            minimal_k=k,
            n_levels=big_n,
            ops_applied=(nodemap.ref(),),
            notes={
                'level': n + 1,
                'spine_pairs': [[node_to_str(a), node_to_str(b)] for a, b in pairs],
                'spine_pairwise_inconsistent': not overlapping,
            },
        )
        if overlapping:
            raise TransformPostconditionError(
                f'aleph1_stage at level {n}: spine siblings intersect',
                violations=[f'spine: {node_to_str(a)}, {node_to_str(b)}' for a, b in overlapping],
            )
        return self._finish(Certificate(PatternKind.CDT, {'bounds': out_bounds}, out_tree), provenance)

    def aleph1_stages(self, c: Certificate) -> Certificate:
        """
        Run :meth:`aleph1_stage` at levels 0, 1, ... while levels remain.

        Later stages stop quietly when no k fits the narrowed tree; the
        first stage raises.
        """
        current = c
        stages: list[dict[str, Any]] = []
        ops: list[dict[str, Any]] = []
        stopped = None
        n = 0
        while n <= self._tree(current).shape.depth - 2:
            try:
                current = self.aleph1_stage(current, n)
            except NoMinimalKError as e:
                if not stages:
                    raise
                stopped = e.message
                break
            stages.append({'n': n, 'k': current.provenance.minimal_k, 'N': current.provenance.n_levels})
            ops.extend(current.provenance.ops_applied)
            n += 1
        provenance = Provenance(
            'aleph1_stages',
            case_fired=f'{len(stages)} stages',
            ops_applied=tuple(ops),
            notes={'stages': stages, 'stopped': stopped},
        )
        return self._finish(current, provenance)

    # ------------------------------------------------------- transports

    def comb_transport(self, c: Certificate, target: TreeShape) -> Certificate:
        """
        Pull a binary SOP2 witness back along the comb embedding.

        Raises
        ------
        ShapeInsufficiencyError
            If the witness is too shallow for ``target``.
        """
        c = self._require(c, (PatternKind.SOP2,), 'comb_transport')
        tree = self._tree(c)
        nodemap = comb_embedding(target, source=tree.shape)
        out = Certificate(PatternKind.TP1, {}, apply_intersect(nodemap, tree))
        return self._finish(out, Provenance('comb_transport', ops_applied=(nodemap.ref(),)))

    def tp1_to_sop2(self, c: Certificate) -> Certificate:
        """Restrict a TP1 witness to its binary subtree."""
        c = self._require(c, (PatternKind.TP1, PatternKind.SCT, PatternKind.SOP2), 'tp1_to_sop2')
        tree = self._tree(c)
        nodemap = binary_restriction(TreeShape(2, tree.shape.depth), tree.shape)
        out = Certificate(PatternKind.SOP2, {}, apply_intersect(nodemap, tree))
        return self._finish(out, Provenance('tp1_to_sop2', ops_applied=(nodemap.ref(),)))

    def spread_transport(self, c: Certificate, n: int | None = None) -> Certificate:
        """
        Pull an SOP2 witness back along the spread embedding, onto the
        deepest binary shape the witness can host.
        """
        c = self._require(c, (PatternKind.SOP2,), 'spread_transport')
        tree = self._tree(c)
        levels = tree.shape.depth - 1
        if n is None:
            target_levels = levels // 2
            nodemap = spread_embedding(TreeShape(2, target_levels + 1), source=tree.shape)
        else:
            target_levels = max(d for d in range(levels + 1) if d + min(n, d) <= levels)
            nodemap = spread_embedding_at(n, TreeShape(2, target_levels + 1), source=tree.shape)
        out = Certificate(PatternKind.SOP2, {}, apply_intersect(nodemap, tree))
        return self._finish(out, Provenance('spread_transport', ops_applied=(nodemap.ref(),), notes={'n': n}))


TRANSFORM_NAMES = (
    'path-normalize',
    'cdt2-to-sct',
    'sctk-to-cdt2-step',
    'sctk-to-cdt2',
    'cdt-to-sctk-or-inp',
    'inp-halving-step',
    'inp-halving',
    'aleph1-stage',
    'aleph1-stages',
    'comb-transport',
    'tp1-to-sop2',
    'spread-transport',
)


def run_transform(service: TransformService, name: str, c: Certificate, params: dict[str, Any]) -> Certificate:
    """
    Dispatch a transform by its command-line name.

    Raises
    ------
    ValidationError
        For unknown names or missing parameters.
    """
    key = name.replace('_', '-').lower()

    def need(param: str) -> Any:
        if params.get(param) is None:
            raise ValidationError({param: f"Transform '{key}' needs parameter '{param}'"})
        return params[param]

    if key == 'path-normalize':
        return service.path_normalize(c)
    if key == 'cdt2-to-sct':
        return service.cdt2_to_sct(c)
    if key == 'sctk-to-cdt2-step':
        return service.sctk_to_cdt2_step(c, int(need('m')))
    if key == 'sctk-to-cdt2':
        return service.sctk_to_cdt2(c)
    if key == 'cdt-to-sctk-or-inp':
        return service.cdt_to_sctk_or_inp(c, int(need('k')), int(need('m')),
                                          path_intersect=bool(params.get('path_intersect', False)))
    if key == 'inp-halving-step':
        return service.inp_halving_step(c, int(need('m')))
    if key == 'inp-halving':
        return service.inp_halving(c)
    if key == 'aleph1-stage':
        return service.aleph1_stage(c, int(need('n')))
    if key == 'aleph1-stages':
        return service.aleph1_stages(c)
    if key == 'comb-transport':
        target = need('target')
        return service.comb_transport(c, target if isinstance(target, TreeShape) else TreeShape.parse(str(target)))
    if key == 'tp1-to-sop2':
        return service.tp1_to_sop2(c)
    if key == 'spread-transport':
        n = params.get('n')
        return service.spread_transport(c, None if n is None else int(n))
    raise ValidationError({'name': f"Unknown transform '{name}', expected one of {list(TRANSFORM_NAMES)}"})
