import random

import pytest

from core.exceptions import BudgetExceededError, ValidationError
from models.patterns import PatternKind, SetSystem
from models.search import SearchSpec, SearchStatus
from models.tree import TreeShape
from services.fuzz_service import naive_search
from services.generators import random_set_system
from services.search_service import SearchService


def system_of(domain_size, **named):
    return SetSystem(domain_size, {name: frozenset(members) for name, members in named.items()})


def test_sop2_witness_found(search_service):
    system = system_of(2, a={0}, b={1}, c={0, 1})
    outcome = search_service.search(SearchSpec(PatternKind.SOP2, shape=TreeShape(2, 2)), system)
    assert outcome.status is SearchStatus.FOUND
    assert outcome.assignment == (0, 1)
    assert outcome.certificate.ok
    assert outcome.certificate.payload.label((0,)) == frozenset({0})
    assert outcome.certificate.payload.label((1,)) == frozenset({1})


def test_no_tp1_witness_from_one_set(search_service):
    system = system_of(2, only={0, 1})
    outcome = search_service.search(SearchSpec(PatternKind.TP1, shape=TreeShape(2, 2)), system)
    assert outcome.status is SearchStatus.NONE
    assert outcome.certificate is None
    assert outcome.space_size == 1


def test_inp_from_transversal_cells(search_service, pattern_service):
    array = pattern_service.transversal_array(2, 2)
    system = SetSystem(4, {f'r{i}c{j}': array.cell(i, j) for i in range(2) for j in range(2)})
    spec = SearchSpec(PatternKind.INP, {'bounds': [2, 2]}, dims=(2, 2))
    outcome = search_service.search(spec, system)
    assert outcome.status is SearchStatus.FOUND
    assert outcome.assignment == (0, 1, 2, 3)
    assert outcome.certificate.payload.cells == array.cells


def test_family_restricts_candidates(search_service):
    system = system_of(2, a={0}, b={1}, c={0, 1})
    spec = SearchSpec(PatternKind.SOP2, shape=TreeShape(2, 2), family=('c', 'b'))
    outcome = search_service.search(spec, system)
    assert outcome.status is SearchStatus.NONE

    with pytest.raises(ValidationError):
        search_service.search(SearchSpec(PatternKind.SOP2, shape=TreeShape(2, 2), family=('z',)), system)


def test_pruning_does_not_change_the_result(search_service):
    system = system_of(4, a={0, 1}, b={2, 3}, c={0}, d={1}, e={2}, f={3})
    for prune in (True, False):
        spec = SearchSpec(PatternKind.TP1, shape=TreeShape(2, 3), prune=prune)
        outcome = search_service.search(spec, system)
        assert outcome.status is SearchStatus.FOUND
        assert outcome.assignment == (0, 1, 2, 3, 4, 5)


def test_budget_without_pruning(search_service):
    system = system_of(2, a={0}, b={1}, c={0, 1})
    spec = SearchSpec(PatternKind.TP1, shape=TreeShape(2, 3), prune=False, budget_assignments=10)
    with pytest.raises(BudgetExceededError) as info:
        search_service.search(spec, system)
    assert info.value.space_size == 3 ** 6


def test_search_needs_a_shape(search_service):
    system = system_of(1, a={0})
    with pytest.raises(ValidationError):
        search_service.search(SearchSpec(PatternKind.TP1), system)
    with pytest.raises(ValidationError):
        search_service.search(SearchSpec(PatternKind.INP, {'bounds': [2]}), system)


def test_threads_give_the_same_witness(test_settings, pattern_service):
    system = system_of(4, a={0, 1}, b={2, 3}, c={0}, d={1}, e={2}, f={3})
    spec = SearchSpec(PatternKind.TP1, shape=TreeShape(2, 3), threads=3)
    outcome = SearchService(test_settings, pattern_service).search(spec, system)
    assert outcome.assignment == (0, 1, 2, 3, 4, 5)


def test_threads_spend_the_budget_like_one_worker(test_settings, pattern_service):
    system = system_of(4, a={0, 1}, b={2, 3}, c={0}, d={1}, e={2}, f={3})
    service = SearchService(test_settings, pattern_service)
    single = service.search(SearchSpec(PatternKind.TP1, shape=TreeShape(2, 3), threads=1), system)

    tight = SearchSpec(PatternKind.TP1, shape=TreeShape(2, 3), threads=4, budget_assignments=single.explored)
    outcome = service.search(tight, system)
    assert outcome.status is SearchStatus.FOUND
    assert outcome.assignment == single.assignment
    assert outcome.explored == single.explored

    too_tight = SearchSpec(PatternKind.TP1, shape=TreeShape(2, 3), threads=4, budget_assignments=single.explored - 1)
    with pytest.raises(BudgetExceededError):
        service.search(too_tight, system)


@pytest.mark.parametrize('seed', range(6))
def test_agrees_with_naive_enumeration(search_service, pattern_service, seed):
    rng = random.Random(seed)
    system = random_set_system(rng, 3, 3)
    for kind, params in ((PatternKind.TP1, {}), (PatternKind.TP, {'k': 2}), (PatternKind.CDT_LEVEL, {'k': 2})):
        spec = SearchSpec(kind, params, shape=TreeShape(2, 3))
        outcome = search_service.search(spec, system)
        status, assignment = naive_search(pattern_service, spec, system)
        assert outcome.status is status
        assert outcome.assignment == assignment


def test_exists_inp_of_depth(search_service):
    rows = [
        [frozenset({0, 1}), frozenset({2, 3})],
        [frozenset({0, 2}), frozenset({1, 3})],
    ]
    found = search_service.exists_inp_of_depth(rows, 2, width=2, domain_size=4)
    assert found is not None and found.ok
    clash = [[frozenset({0}), frozenset({1})], [frozenset({0}), frozenset({1})]]
    assert search_service.exists_inp_of_depth(clash, 2, width=2, domain_size=2) is None
