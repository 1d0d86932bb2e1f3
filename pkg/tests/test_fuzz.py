import random

import pytest

from core.exceptions import ValidationError
from models.tree import TreeShape
from services.fuzz_service import FuzzReport, FuzzService
from services.generators import (
    block_array,
    block_cdt,
    block_level_bound,
    block_level_cdt,
    block_sibling_bounds,
    random_amalgamation_problem,
    random_set_system,
    random_widths,
)
from services.oracles import EquivalenceOracle, GraphOracle
from services.pfc_service import pfc_amalgamate


@pytest.fixture
def fuzz_service(test_settings):
    return FuzzService(test_settings)


def test_report():
    report = FuzzReport('index', 7)
    assert report.ok
    report.fail('boom')
    assert not report.ok
    assert report.failures == ['boom']


def test_unknown_suite(fuzz_service):
    with pytest.raises(ValidationError):
        fuzz_service.run('everything')


@pytest.mark.parametrize('suite', ['index', 'canonical'])
def test_deterministic_suites_pass(fuzz_service, suite):
    report = fuzz_service.run(suite, seed=0, iterations=1)
    assert report.cases > 0
    assert report.ok, report.failures


def test_search_suite_matches_naive_enumeration(fuzz_service):
    report = fuzz_service.run('search', seed=3, iterations=15)
    assert report.cases == 15
    assert report.ok, report.failures


def test_same_seed_same_system():
    a = random_set_system(random.Random(11), 5, 4)
    b = random_set_system(random.Random(11), 5, 4)
    assert a == b
    assert a.names() == ['s0', 's1', 's2', 's3']


def test_block_bounds():
    assert block_sibling_bounds([2, 1]) == [3, 2]
    assert block_level_bound([2, 1, 1]) == 3
    assert block_level_bound([]) == 2
    array = block_array(4, [2, 4])
    assert (array.rows, array.cols, array.domain_size) == (2, 4, 16)
    assert array.cell(1, 0) == array.cell(1, 3)
    with pytest.raises(ValidationError):
        block_array(4, [3])


def test_block_certificates_carry_their_bounds():
    assert block_cdt(2, [2, 1]).params == {'bounds': [3, 2]}
    assert block_cdt(2, [2, 1]).payload.shape == TreeShape(2, 3)
    assert block_level_cdt(4, [2, 1, 1, 1]).params == {'k': 3}


def test_random_widths_divide_the_branching():
    widths = random_widths(random.Random(0), 20, 4)
    assert all(w in (1, 2, 4) for w in widths)
    assert all(w in (1, 2) for w in random_widths(random.Random(0), 20, 6))


@pytest.mark.parametrize('oracle', [GraphOracle(), EquivalenceOracle()])
def test_random_amalgamation_problems_amalgamate(oracle):
    rng = random.Random(5)
    for _ in range(10):
        common, left, right = random_amalgamation_problem(rng, oracle)
        amalgam = pfc_amalgamate(oracle, common, left, right)
        assert set(amalgam.structure.parameters) >= set(left.parameters)
