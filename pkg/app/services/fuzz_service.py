"""
Property suites behind the ``fuzz`` command.

Each suite draws its cases from a seeded ``random.Random`` so a failure can
be replayed with the same seed.
"""
import logging
import random
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Any, Callable, Sequence

from core.config import EngineSettings, settings as default_settings
from core.exceptions import AppBaseException, BudgetExceededError, ValidationError
from models.nodemap import NodeMap
from models.patterns import Certificate, InpArray, LabeledTree, PatternKind, SetSystem
from models.pfc import PfcStructure
from models.search import SearchSpec, SearchStatus
from models.tree import Lang, Node, TreeShape, node_to_str
from services import generators
from services.oracles import EquivalenceOracle, GraphOracle
from services.pattern_service import PatternService
from services.pfc_service import PfcService, in_class, pasting1_build, pasting2_build, pfc_amalgamate
from services.search_service import SearchService
from services.transform_service import TransformService
from services.treeidx import comparable, is_distant_siblings, path_prefixes, qftp
from services.treeops import (
    binary_restriction,
    elongation,
    fattening,
    restriction,
    spread_embedding,
    spread_embedding_at,
    stretching,
    widening,
)

logger = logging.getLogger(__name__)

SAMPLE_LIMIT = 4000


def check_preservation(nodemap: NodeMap, lang: Lang | str, arity: int, stump: Sequence[Node] = (),
                       tuples: Sequence[tuple[Node, ...]] | None = None) -> list[tuple[tuple[Node, ...], tuple[Node, ...]]]:
    """
    Pairs of tuples with the same type whose images have different types.

    The image of a tuple is the concatenation of the images of its members,
    prefixed by ``stump`` when given.

    Parameters
    ----------
    nodemap : NodeMap
        The operation.
    lang : Lang or str
        Language of the types.
    arity : int
        Tuple length.
    stump : sequence of Node
        Nodes prepended to every image tuple.
    tuples : sequence of tuple, optional
        Tuples to check; all tuples of target nodes by default.

    Returns
    -------
    list of pairs
        One counterexample per type class that splits.
    """
    if tuples is None:
        tuples = list(product(nodemap.target.nodes, repeat=arity))
    stump = tuple(stump)
    seen: dict[Any, tuple[Any, tuple[Node, ...]]] = {}
    counterexamples = []
    split = set()
    for t in tuples:
        key = qftp(t, lang)
        image = qftp(stump + nodemap.map_tuple(t), lang)
        if key not in seen:
            seen[key] = (image, t)
        elif seen[key][0] != image and key not in split:
            split.add(key)
            counterexamples.append((seen[key][1], t))
    return counterexamples


def naive_search(patterns: PatternService, spec: SearchSpec, system: SetSystem) -> tuple[SearchStatus, tuple[int, ...] | None]:
    """
    Least satisfying assignment by plain enumeration.

    Runs through the space backwards and keeps the minimum, so it shares no
    code path with :class:`SearchService` beyond the verifier.
    """
    family = system.family(list(spec.family) if spec.family is not None else None)
    if spec.kind.uses_array:
        rows, cols = spec.dims
        slots = rows * cols
    else:
        slots = len(spec.shape.labeled_nodes)
    if len(family) ** slots > (spec.budget_assignments or patterns.settings.budget_assignments):
        raise BudgetExceededError(f'Naive space {len(family) ** slots} over budget', space_size=len(family) ** slots)
    best = None
    for assignment in product(range(len(family) - 1, -1, -1), repeat=slots):
        labels = [family[v] for v in assignment]
        if spec.kind.uses_array:
            payload = InpArray(rows, cols, system.domain_size,
                               tuple(tuple(labels[i * cols:(i + 1) * cols]) for i in range(rows)))
        else:
            payload = LabeledTree(spec.shape, system.domain_size, dict(zip(spec.shape.labeled_nodes, labels)))
        if patterns.verify(Certificate(spec.kind, spec.params, payload), cap=0).ok:
            if best is None or assignment < best:
                best = assignment
    return (SearchStatus.FOUND, best) if best is not None else (SearchStatus.NONE, None)


@dataclass
class FuzzReport:
    suite: str
    seed: int
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    notes: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, message: str) -> None:
        self.failures.append(message)


def _ls_ops(rng: random.Random) -> tuple[NodeMap, tuple[Node, ...]]:
    op = rng.choice(['widening', 'stretching', 'fattening', 'restriction', 'elongation'])
    k = rng.randint(1, 2)
    if op == 'widening':
        return widening(k, rng.randint(1, 2), TreeShape(rng.randint(2, 3), rng.randint(2, 3))), ()
    if op == 'stretching':
        return stretching(k, rng.randint(1, 2), TreeShape(rng.randint(2, 3), rng.randint(2, 3))), ()
    if op == 'fattening':
        return fattening(k, TreeShape(2, rng.randint(2, 3)))[0], ()
    if op == 'restriction':
        return _random_restriction(rng), ()
    return elongation(k, TreeShape(rng.randint(2, 3), rng.randint(2, 3))), ()


def _l0_ops(rng: random.Random) -> tuple[NodeMap, tuple[Node, ...]]:
    op = rng.choice(['restriction', 'fattening', 'fattening-stump', 'elongation', 'spread', 'spread_at',
                     'binary_restriction'])
    k = rng.randint(1, 2)
    target = TreeShape(2, rng.randint(2, 3))
    if op == 'restriction':
        return _random_restriction(rng), ()
    if op == 'fattening':
        return fattening(k, target)[0], ()
    if op == 'fattening-stump':
        return fattening(k, target)
    if op == 'elongation':
        return elongation(k, TreeShape(rng.randint(2, 3), rng.randint(2, 3))), ()
    if op == 'spread':
        return spread_embedding(target), ()
    if op == 'spread_at':
        return spread_embedding_at(rng.randint(0, 2), target), ()
    return binary_restriction(target, TreeShape(3, target.depth + 1)), ()


def _random_restriction(rng: random.Random) -> NodeMap:
    source = TreeShape(rng.randint(2, 3), rng.randint(2, 4))
    size = rng.randint(1, source.depth)
    return restriction(sorted(rng.sample(range(source.depth), size)), source)


class FuzzService:
    """
    Seeded property suites over the whole engine.

    Attributes
    ----------
    settings : EngineSettings
        Budgets used by the suites.
    """

    SUITES = ('preservation', 'index', 'comb', 'transforms', 'aleph1', 'search', 'pfc', 'canonical')

    def __init__(self, settings: EngineSettings | None = None):
        self.settings = settings or default_settings
        self.patterns = PatternService(self.settings)
        self.search = SearchService(self.settings, self.patterns)
        self.transforms = TransformService(self.settings, self.patterns, self.search)
        self.pfc = PfcService(self.settings, self.patterns)

    def run(self, suite: str, seed: int = 0, iterations: int = 50) -> FuzzReport:
        """
        Run one suite.

        Raises
        ------
        ValidationError
            For unknown suite names.
        """
        runner: dict[str, Callable[[random.Random, FuzzReport, int], None]] = {
            'preservation': self._preservation,
            'index': self._index,
            'comb': self._comb,
            'transforms': self._transforms,
            'aleph1': self._aleph1,
            'search': self._search,
            'pfc': self._pfc,
            'canonical': self._canonical,
        }
        if suite not in runner:
            raise ValidationError({'suite': f"Unknown suite '{suite}', expected one of {list(self.SUITES)}"})
        report = FuzzReport(suite, seed)
        runner[suite](random.Random(seed), report, iterations)
        logger.info(f'Fuzz suite {suite} (seed {seed}): {report.cases} cases, {len(report.failures)} failures')
        return report

    def run_all(self, seed: int = 0, iterations: int = 50) -> list[FuzzReport]:
        """
        Run every suite with the same seed.

        Returns
        -------
        list of FuzzReport
            One report per suite, in :attr:`SUITES` order.
        """
        return [self.run(suite, seed, iterations) for suite in self.SUITES]

    # ------------------------------------------------------------- suites

    def _preservation(self, rng: random.Random, report: FuzzReport, iterations: int) -> None:
        for _ in range(iterations):
            lang = rng.choice([Lang.LS, Lang.L0])
            nodemap, stump = _ls_ops(rng) if lang is Lang.LS else _l0_ops(rng)
            arity = rng.randint(1, 3)
            nodes = nodemap.target.nodes
            if len(nodes) ** arity <= SAMPLE_LIMIT:
                tuples = None
            else:
                tuples = [tuple(rng.choice(nodes) for _ in range(arity)) for _ in range(SAMPLE_LIMIT)]
            report.cases += 1
            for a, b in check_preservation(nodemap, lang, arity, stump, tuples):
                report.fail(f'{nodemap.op} {nodemap.params} in {lang.value}: '
                            f'{[node_to_str(n) for n in a]} and {[node_to_str(n) for n in b]} split')

    def _index(self, rng: random.Random, report: FuzzReport, iterations: int) -> None:
        shape = TreeShape(3, 4)
        for lang in (Lang.L0, Lang.LS):
            types = {qftp(path_prefixes(p), lang) for p in shape.paths}
            report.cases += len(shape.paths)
            if len(types) != 1:
                report.fail(f'maximal paths have {len(types)} types in {lang.value}')
        pair_type = qftp(((0,), (1,)), Lang.L0)
        for a, b in combinations(shape.labeled_nodes, 2):
            a, b = sorted((a, b))
            if comparable(a, b):
                continue
            report.cases += 1
            if qftp((a, b), Lang.L0) != pair_type:
                report.fail(f'incomparable pair {node_to_str(a)}, {node_to_str(b)} has another type')
        triple_type = qftp(((0,), (1,), (2,)), Lang.L0)
        for family in combinations(shape.labeled_nodes, 3):
            if not is_distant_siblings(family):
                continue
            report.cases += 1
            if qftp(tuple(sorted(family)), Lang.L0) != triple_type:
                report.fail(f'distant siblings {[node_to_str(n) for n in family]} have another type')

    def _comb(self, rng: random.Random, report: FuzzReport, iterations: int) -> None:
        found = 0
        for _ in range(iterations):
            system = generators.random_set_system(rng, rng.randint(2, 8), rng.randint(1, 6))
            spec = SearchSpec(PatternKind.SOP2, {}, shape=TreeShape(2, 3))
            outcome = self.search.search(spec, system)
            if outcome.certificate is None:
                continue
            found += 1
            report.cases += 1
            self._expect(report, 'comb (2,2)', lambda: self.transforms.comb_transport(outcome.certificate, TreeShape(2, 2)))
        for depth in range(4, 6):
            witness = self.patterns.canonical_witness(PatternKind.SOP2, TreeShape(2, depth))
            for target in (TreeShape(2, 2), TreeShape(3, 2)):
                report.cases += 1
                self._expect(report, f'comb {target}', lambda: self.transforms.comb_transport(witness, target))
        report.notes['sop2_found'] = found

    def _transforms(self, rng: random.Random, report: FuzzReport, iterations: int) -> None:
        for _ in range(iterations):
            b = rng.choice([2, 3])
            cdt2 = generators.block_cdt(b, [1] * rng.randint(1, 3))
            report.cases += 1
            self._expect(report, 'cdt2_to_sct', lambda: self.transforms.cdt2_to_sct(cdt2))

            # widening halves the branching, so only the leading level may be wide
            m = rng.randint(1, 2)
            b = rng.choice([2, 4]) if m < 2 else 4
            widths = [rng.choice([1, 2]) if b >= 4 else 1] + [1] * (m * m - 1)
            level = generators.block_level_cdt(b, widths)
            report.cases += 1
            result = self._expect(report, 'sctk_to_cdt2', lambda: self.transforms.sctk_to_cdt2(level))
            if result is not None and (result.kind is not PatternKind.CDT_N or result.params['n'] != 2):
                report.fail(f'sctk_to_cdt2 returned {result.kind.value} {result.params}')

            cols = rng.choice([2, 4])
            m = rng.randint(1, 2)
            inp = generators.block_inp(cols, generators.random_widths(rng, m * m, cols))
            report.cases += 1
            result = self._expect(report, 'inp_halving', lambda: self.transforms.inp_halving(inp))
            if result is not None and max(result.params['bounds']) != 2:
                report.fail(f'inp_halving ended with bounds {result.params["bounds"]}')

            # the inp extraction needs every level to look alike, so widths are uniform
            m = rng.randint(1, 2)
            b = rng.choice([2, 4]) if m < 2 else 2
            cdt = generators.block_cdt(b, generators.random_widths(rng, 1, b) * (2 * m))
            k = rng.randint(2, 3)
            report.cases += 1
            self._expect(report, 'cdt_to_sctk_or_inp', lambda: self.transforms.cdt_to_sctk_or_inp(cdt, k, m))

    def _aleph1(self, rng: random.Random, report: FuzzReport, iterations: int) -> None:
        levels = 0
        for _ in range(iterations):
            cdt = generators.block_cdt(4, generators.random_widths(rng, rng.randint(1, 3), 4, (1, 2)))
            report.cases += 1
            result = self._expect(report, 'aleph1_stages', lambda: self.transforms.aleph1_stages(cdt))
            if result is not None:
                levels += len(result.provenance.notes['stages'])
        report.notes['levels_processed'] = levels

    def _search(self, rng: random.Random, report: FuzzReport, iterations: int) -> None:
        tree_kinds = [
            (PatternKind.TP, {'k': 2}), (PatternKind.TP1, {}), (PatternKind.SOP2, {}), (PatternKind.SOP1, {}),
            (PatternKind.SCT, {}), (PatternKind.CDT_N, {'n': 2}), (PatternKind.CDT_LEVEL, {'k': 2}),
            (PatternKind.KTP1, {'k': 2}), (PatternKind.WEAK_KTP1, {'k': 2}),
        ]
        for _ in range(iterations):
            system = generators.random_set_system(rng, rng.randint(1, 4), rng.randint(1, 4))
            if rng.random() < 0.3:
                kind, params = rng.choice([(PatternKind.TP2, {'k': 2}), (PatternKind.INP, {'bounds': [2, 2]})])
                spec = SearchSpec(kind, params, dims=(2, rng.randint(1, 2)))
            else:
                kind, params = rng.choice(tree_kinds)
                shapes = [TreeShape(2, 2), TreeShape(2, 3)] + ([] if kind.needs_binary else [TreeShape(3, 2)])
                spec = SearchSpec(kind, params, shape=rng.choice(shapes))
            fast = self.search.search(spec, system)
            slow_status, slow_assignment = naive_search(self.patterns, spec, system)
            report.cases += 1
            if fast.status is not slow_status or fast.assignment != slow_assignment:
                report.fail(f'{kind.value} on {spec.shape or spec.dims}: search {fast.status.value} {fast.assignment}, '
                            f'naive {slow_status.value} {slow_assignment}')

    def _pfc(self, rng: random.Random, report: FuzzReport, iterations: int) -> None:
        for base in (GraphOracle(), EquivalenceOracle()):
            for _ in range(iterations):
                common, left, right = generators.random_amalgamation_problem(rng, base)
                report.cases += 1
                amalgam = self._expect(report, f'{base.name} amalgam', lambda: pfc_amalgamate(base, common, left, right))
                if amalgam is not None and not in_class(amalgam.structure, base):
                    report.fail(f'{base.name} amalgam left the class')

                shared = [f'c{i}' for i in range(rng.randint(0, 4))]
                count = rng.randint(1, 4)
                fragments = generators.random_fragments(rng, base, shared, count)
                params = [f'p{i}' for i in range(count)]
                report.cases += 1
                self._expect(report, f'{base.name} pasting1', lambda: pasting1_build(params, shared, fragments, base=base))

                a, b, c = ['x0', 'x1'][:rng.randint(0, 2)], ['y0', 'y1'][:rng.randint(0, 2)], ['z0', 'z1'][:rng.randint(0, 2)]
                objects = a + b + c + ['w0']
                signature = (('R', 2),)
                s0 = generators.random_member(rng, base, objects, signature)
                s1 = generators.random_extension(rng, base, s0.restrict(c), objects)
                m = PfcStructure(frozenset(objects), ('b0', 'b1'), signature, {'b0': s0, 'b1': s1})
                report.cases += 1
                self._expect(report, f'{base.name} pasting2', lambda: pasting2_build(base, m, a, b, c, 'b0', 'b1'))

    def _canonical(self, rng: random.Random, report: FuzzReport, iterations: int) -> None:
        for kind in (PatternKind.SOP2, PatternKind.TP1, PatternKind.SCT):
            for branching in ((2,) if kind is PatternKind.SOP2 else (2, 3, 4)):
                depth = 1
                while TreeShape(branching, depth + 1).node_count <= 500 and depth < 6:
                    depth += 1
                    report.cases += 1
                    c = self.patterns.canonical_witness(kind, TreeShape(branching, depth))
                    if not c.ok:
                        report.fail(f'canonical {kind.value} on {branching}x{depth} does not verify')
        for rows in range(1, 5):
            for cols in range(1, 5):
                report.cases += 1
                if not self.patterns.canonical_witness(PatternKind.TP2, dims=(rows, cols)).ok:
                    report.fail(f'canonical TP2 {rows}x{cols} does not verify')
        report.cases += 1
        certificate, _ = self.pfc.tp2_demo(3, 3)
        if not certificate.ok:
            report.fail('tp2_demo 3x3 does not verify')

    @staticmethod
    def _expect(report: FuzzReport, label: str, action: Callable[[], Any]) -> Any:
        try:
            return action()
        except AppBaseException as e:
            report.fail(f'{label}: {type(e).__name__}: {e}')
            return None
