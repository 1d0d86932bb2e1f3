import logging
import time
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from typing import Any, Sequence

from core.config import EngineSettings, settings as default_settings
from core.exceptions import BudgetExceededError, InternalInvariantError, ValidationError
from models.patterns import Certificate, InpArray, Label, LabeledTree, PatternKind, SetSystem
from models.search import SearchOutcome, SearchSpec, SearchStatus
from models.tree import Node, TreeShape
from services.pattern_service import PatternService, consistent_subfamilies, is_k_inconsistent
from services.treeidx import comparable, meet

logger = logging.getLogger(__name__)


class _DeadlineHit(Exception):
    pass


class _Budget:
    """Exploration counter of a single worker."""

    def __init__(self, limit: int, deadline: float | None, space_size: int):
        self.limit = limit
        self.deadline = deadline
        self.space_size = space_size
        self.explored = 0

    def tick(self) -> None:
        self.explored += 1
        explored = self.explored
        if explored > self.limit:
            raise BudgetExceededError(
                f'Explored more than {self.limit} assignments (space size {self.space_size})',
                space_size=self.space_size,
                explored=explored,
            )
        if self.deadline is not None and explored % 256 == 0 and time.monotonic() > self.deadline:
            raise _DeadlineHit()


class _TreeProblem:
    """Slots are the labeled nodes in canonical order."""

    def __init__(self, kind: PatternKind, params: dict[str, Any], shape: TreeShape, domain: Label):
        self.kind = kind
        self.params = params
        self.shape = shape
        self.domain = domain
        self.slots: tuple[Node, ...] = shape.labeled_nodes
        index = {node: i for i, node in enumerate(self.slots)}
        self.parent = [index.get(node[:-1], -1) for node in self.slots]

        self.siblings: list[list[int]] = []
        self.same_level: list[list[int]] = []
        self.incomparable: list[list[int]] = []
        self.sop1: list[list[int]] = []
        self.distant: list[list[list[list[int]]]] = []
        for i, node in enumerate(self.slots):
            earlier = range(i)
            self.siblings.append([j for j in earlier if self.slots[j][:-1] == node[:-1]])
            self.same_level.append([j for j in earlier if len(self.slots[j]) == len(node)])
            self.incomparable.append([j for j in earlier if not comparable(self.slots[j], node)])
            partners = []
            if node[-1] == 1:
                partners.extend(j for j in earlier if self.slots[j] == node[:-1] + (0,))
            for p in range(len(node) - 1):
                if node[p] == 0:
                    partners.extend(j for j in earlier if self.slots[j] == node[:p] + (1,))
            self.sop1.append(partners)
            groups = []
            for cut in range(len(node)):
                top = node[:cut]
                by_branch: dict[int, list[int]] = {}
                for j in earlier:
                    other = self.slots[j]
                    if len(other) > cut and meet(other, node) == top:
                        by_branch.setdefault(other[cut], []).append(j)
                groups.append([by_branch[b] for b in sorted(by_branch)])
            self.distant.append(groups)

    def admissible(self, i: int, value: Label, labels: list[Label], pis: list[Label]) -> Label | None:
        """Path intersection at slot i when ``value`` fits, else None."""
        parent = self.parent[i]
        pi = (self.domain if parent < 0 else pis[parent]) & value
        if not pi:
            return None
        kind = self.kind
        if kind in (PatternKind.TP, PatternKind.CDT, PatternKind.CDT_N):
            if kind is PatternKind.CDT:
                bound = self.params['bounds'][len(self.slots[i]) - 1]
            else:
                bound = self.params['n' if kind is PatternKind.CDT_N else 'k']
            if self._clique(value, [labels[j] for j in self.siblings[i]], bound):
                return None
        elif kind is PatternKind.CDT_LEVEL:
            if self._clique(value, [labels[j] for j in self.same_level[i]], self.params['k']):
                return None
        elif kind in (PatternKind.TP1, PatternKind.SOP2, PatternKind.SCT):
            if any(value & labels[j] for j in self.incomparable[i]):
                return None
        elif kind in (PatternKind.KTP1, PatternKind.SCT_K):
            if self._antichain(value, self.incomparable[i], labels, self.params['k']):
                return None
        elif kind is PatternKind.WEAK_KTP1:
            k = self.params['k']
            for groups in self.distant[i]:
                if self._across_groups(value, groups, labels, k - 1):
                    return None
        elif kind is PatternKind.SOP1:
            if any(value & labels[j] for j in self.sop1[i]):
                return None
        return pi

    @staticmethod
    def _clique(value: Label, others: list[Label], k: int) -> bool:
        if len(others) < k - 1:
            return False
        return next(consistent_subfamilies(others, k - 1, start=value), None) is not None

    def _antichain(self, value: Label, candidates: list[int], labels: list[Label], k: int) -> bool:
        def extend(first: int, chosen: list[int], running: Label) -> bool:
            if len(chosen) == k - 1:
                return True
            for c in range(first, len(candidates)):
                j = candidates[c]
                if any(comparable(self.slots[j], self.slots[o]) for o in chosen):
                    continue
                inter = running & labels[j]
                if inter:
                    chosen.append(j)
                    if extend(c + 1, chosen, inter):
                        return True
                    chosen.pop()
            return False

        return extend(0, [], value)

    @staticmethod
    def _across_groups(value: Label, groups: list[list[int]], labels: list[Label], need: int) -> bool:
        def extend(first: int, picked: int, running: Label) -> bool:
            if picked == need:
                return True
            for g in range(first, len(groups) - (need - picked) + 1):
                for j in groups[g]:
                    inter = running & labels[j]
                    if inter and extend(g + 1, picked + 1, inter):
                        return True
            return False

        return len(groups) >= need and extend(0, 0, value)

    def payload(self, labels: Sequence[Label], domain_size: int) -> LabeledTree:
        return LabeledTree(self.shape, domain_size, dict(zip(self.slots, labels)))


class _ArrayProblem:
    """Slots are the cells in row-major order."""

    def __init__(self, kind: PatternKind, params: dict[str, Any], rows: int, cols: int, domain: Label):
        self.rows = rows
        self.cols = cols
        self.domain = domain
        self.bounds = params['bounds'] if kind is PatternKind.INP else [params['k']] * rows
        self.slots = [(i, j) for i in range(rows) for j in range(cols)]
        self.partials: list[list[Label]] = [[domain]] + [[] for _ in range(rows)]

    def admissible(self, index: int, value: Label, labels: list[Label], _pis: list[Label]) -> Label | None:
        i, j = self.slots[index]
        if j == 0 and i > 0:
            previous = labels[(i - 1) * self.cols:i * self.cols]
            self.partials[i] = list({t & cell for t in self.partials[i - 1] for cell in previous})
        if not all(t & value for t in self.partials[i]):
            return None
        row_so_far = labels[i * self.cols:index]
        if _TreeProblem._clique(value, row_so_far, self.bounds[i]):
            return None
        return value

    def payload(self, labels: Sequence[Label], domain_size: int) -> InpArray:
        cells = tuple(tuple(labels[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows))
        return InpArray(self.rows, self.cols, domain_size, cells)


class SearchService:
    """
    Exhaustive search for pattern witnesses over a finite family of sets.

    Slots (tree nodes of level at least 1 in canonical order, or array cells
    row by row) receive members of the family; the first complete assignment
    found in lexicographic (slot, family) order is returned, so results do not
    depend on the number of workers.

    Attributes
    ----------
    settings : EngineSettings
        Default budgets and thread count.
    patterns : PatternService
        Used to validate parameters and to verify results.
    """

    def __init__(self, settings: EngineSettings | None = None, patterns: PatternService | None = None):
        self.settings = settings or default_settings
        self.patterns = patterns or PatternService(self.settings)

    def _problem(self, spec: SearchSpec, domain: Label, domain_size: int):
        kind = spec.kind
        if kind.uses_array:
            if spec.dims is None:
                raise ValidationError({'dims': f'{kind.value} search needs array dimensions'})
            rows, cols = spec.dims
            placeholder = InpArray(rows, cols, domain_size, tuple((domain,) * cols for _ in range(rows)))
            params = self.patterns.check_params(kind, spec.params, placeholder)
            return _ArrayProblem(kind, params, rows, cols, domain), params
        if spec.shape is None:
            raise ValidationError({'shape': f'{kind.value} search needs a tree shape'})
        placeholder = LabeledTree(spec.shape, domain_size, {node: domain for node in spec.shape.labeled_nodes})
        params = self.patterns.check_params(kind, spec.params, placeholder)
        return _TreeProblem(kind, params, spec.shape, domain), params

    def search(self, spec: SearchSpec, system: SetSystem) -> SearchOutcome:
        """
        Find the lexicographically least witness.

        Parameters
        ----------
        spec : SearchSpec
            Kind, shape or dims, family and budgets.
        system : SetSystem
            Where the candidate sets come from.

        Returns
        -------
        SearchOutcome
            ``found`` with a verified certificate, ``none`` after covering
            the whole space, or ``unknown`` when the deadline hit.

        Raises
        ------
        BudgetExceededError
            If the space (without pruning) or the exploration (with pruning)
            exceeds the assignment budget.
        """
        family = system.family(list(spec.family) if spec.family is not None else None)
        problem, params = self._problem(spec, system.domain, system.domain_size)
        n_slots = len(problem.slots)
        space_size = len(family) ** n_slots
        limit = spec.budget_assignments or self.settings.budget_assignments
        if not spec.prune and space_size > limit:
            raise BudgetExceededError(
                f'Search space {space_size} exceeds the budget {limit} and pruning is off',
                space_size=space_size,
            )
        deadline = None
        if spec.deadline_seconds is not None:
            if spec.deadline_seconds > 0:
                deadline = time.monotonic() + spec.deadline_seconds
        elif self.settings.deadline_enabled:
            deadline = time.monotonic() + self.settings.budget_seconds
        threads = spec.threads or self.settings.threads
        logger.info(f'Searching {spec.kind.value} {params} over {len(family)} sets, {n_slots} slots, space {space_size}')

        def run(first_values: Sequence[int], budget: _Budget) -> tuple[SearchStatus, tuple[int, ...] | None]:
            worker = problem if threads <= 1 else self._problem(spec, system.domain, system.domain_size)[0]
            try:
                found = self._dfs(worker, family, first_values, spec.prune, spec.kind, params,
                                  system.domain_size, budget)
            except _DeadlineHit:
                return SearchStatus.UNKNOWN, None
            return (SearchStatus.FOUND, found) if found is not None else (SearchStatus.NONE, None)

        if n_slots == 0 or threads <= 1 or len(family) <= 1:
            budget = _Budget(limit, deadline, space_size)
            status, assignment = run(range(len(family)), budget)
            explored = budget.explored
        else:
            status, assignment, explored = self._run_parts(run, len(family), threads, limit, deadline, space_size)
        logger.info(f'Search finished: {status.value}, explored {explored}')

        if status is not SearchStatus.FOUND:
            return SearchOutcome(status, None, space_size, explored)
        payload = problem.payload([family[v] for v in assignment], system.domain_size)
        certificate = self.patterns.verify(Certificate(spec.kind, params, payload))
        if not certificate.ok:
            raise InternalInvariantError(f'Search returned a non-verifying {spec.kind.value} assignment {assignment}')
        return SearchOutcome(status, certificate, space_size, explored, tuple(assignment))

    @staticmethod
    def _run_parts(run, n_values: int, threads: int, limit: int, deadline: float | None,
                   space_size: int) -> tuple[SearchStatus, tuple[int, ...] | None, int]:
        """
        Search one subtree per value of the first slot, each with its own counter.

        The parts are then replayed in order, adding up what each one explored,
        so the budget trips exactly where a single worker would have tripped it
        and a witness in an early part wins over failures in later ones.
        """
        budgets = [_Budget(limit, deadline, space_size) for _ in range(n_values)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(run, [v], budgets[v]) for v in range(n_values)]

        explored = 0
        for future, budget in zip(futures, budgets):
            error = future.exception()
            explored += budget.explored
            if error is not None and not isinstance(error, BudgetExceededError):
                raise error
            if error is not None or explored > limit:
                raise BudgetExceededError(
                    f'Explored more than {limit} assignments (space size {space_size})',
                    space_size=space_size,
                    explored=explored,
                )
            status, assignment = future.result()
            if status is not SearchStatus.NONE:
                return status, assignment, explored
        return SearchStatus.NONE, None, explored

    def _dfs(self, problem, family: list[Label], first_values: Sequence[int], prune: bool,
             kind: PatternKind, params: dict[str, Any], domain_size: int, budget: _Budget) -> tuple[int, ...] | None:
        n_slots = len(problem.slots)
        labels: list[Label] = [frozenset()] * n_slots
        pis: list[Label] = [frozenset()] * n_slots
        chosen: list[int] = [0] * n_slots

        if n_slots == 0:
            payload = problem.payload([], domain_size)
            return () if self.patterns.verify(Certificate(kind, params, payload), cap=0).ok else None

        def assign(i: int) -> bool:
            values = first_values if i == 0 else range(len(family))
            for v in values:
                budget.tick()
                value = family[v]
                if prune:
                    pi = problem.admissible(i, value, labels, pis)
                    if pi is None:
                        continue
                    pis[i] = pi
                labels[i] = value
                chosen[i] = v
                if i + 1 == n_slots:
                    if prune:
                        return True
                    payload = problem.payload(list(labels), domain_size)
                    if self.patterns.verify(Certificate(kind, params, payload), cap=0).ok:
                        return True
                elif assign(i + 1):
                    return True
            return False

        return tuple(chosen) if assign(0) else None

    def exists_inp_of_depth(self, rows: Sequence[Sequence[Label]], k: int, width: int = 2,
                            bounds: Sequence[int] | None = None, domain_size: int | None = None,
                            budget_assignments: int | None = None) -> Certificate | None:
        """
        Look for an inp-pattern with k rows taken from ``rows``.

        Rows are chosen in index order, and each chosen row contributes
        ``width`` of its sets, keeping their order. Every transversal must be
        consistent and each chosen row must satisfy its bound.

        Parameters
        ----------
        rows : sequence of sequence of frozenset
            Candidate row families.
        k : int
            Number of rows of the pattern.
        width : int
            Columns per row.
        bounds : sequence of int, optional
            Inconsistency bound of each candidate row; 2 by default.
        domain_size : int, optional
            Domain of the resulting array; inferred from the sets if omitted.
        budget_assignments : int, optional
            Maximum partial choices explored.

        Returns
        -------
        Certificate or None
            A verified INP certificate, or None when no choice works.

        Raises
        ------
        BudgetExceededError
            If the exploration exceeds the budget.
        """
        if k < 0 or width < 1:
            raise ValidationError({'k': f'Need k >= 0 and width >= 1, got k={k}, width={width}'})
        bounds = list(bounds) if bounds is not None else [2] * len(rows)
        if len(bounds) != len(rows):
            raise ValidationError({'bounds': f'Expected {len(rows)} bounds, got {len(bounds)}'})
        if domain_size is None:
            domain_size = 1 + max((x for row in rows for cell in row for x in cell), default=-1)
        limit = budget_assignments or self.settings.budget_assignments
        budget = _Budget(limit, None, 0)

        for row_ids in combinations(range(len(rows)), k):
            picks = self._pick_columns([rows[r] for r in row_ids], [bounds[r] for r in row_ids], width, budget)
            if picks is None:
                continue
            cells = tuple(tuple(rows[r][c] for c in cols) for r, cols in zip(row_ids, picks))
            array = InpArray(k, width, domain_size, cells)
            certificate = self.patterns.verify(Certificate(PatternKind.INP, {'bounds': [bounds[r] for r in row_ids]}, array))
            if not certificate.ok:
                raise InternalInvariantError(f'Row choice {row_ids} with columns {picks} does not verify')
            logger.debug(f'INP of depth {k} found on rows {row_ids}, columns {picks}')
            return certificate
        return None

    @staticmethod
    def _pick_columns(rows: list[Sequence[Label]], bounds: list[int], width: int,
                      budget: _Budget) -> list[tuple[int, ...]] | None:
        picks: list[tuple[int, ...]] = []

        def choose(r: int, partials: list[Label | None]) -> bool:
            if r == len(rows):
                return True
            row = rows[r]
            for cols in combinations(range(len(row)), width):
                budget.tick()
                cells = [row[c] for c in cols]
                if width >= bounds[r] and not is_k_inconsistent(cells, bounds[r]):
                    continue
                fresh = set()
                ok = True
                for t in partials:
                    for cell in cells:
                        inter = cell if t is None else t & cell
                        if not inter:
                            ok = False
                            break
                        fresh.add(inter)
                    if not ok:
                        break
                if not ok:
                    continue
                picks.append(cols)
                if choose(r + 1, list(fresh)):
                    return True
                picks.pop()
            return False

        return picks if choose(0, [None]) else None
