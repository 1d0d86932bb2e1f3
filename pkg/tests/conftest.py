import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / 'app'))

from core.config import settings  # noqa: E402
from services.pattern_service import PatternService  # noqa: E402
from services.pfc_service import PfcService  # noqa: E402
from services.search_service import SearchService  # noqa: E402
from services.transform_service import TransformService  # noqa: E402


@pytest.fixture
def test_settings():
    return settings.model_copy(update={'budget_seconds': 0.0, 'threads': 1})


@pytest.fixture
def pattern_service(test_settings):
    return PatternService(test_settings)


@pytest.fixture
def search_service(test_settings, pattern_service):
    return SearchService(test_settings, pattern_service)


@pytest.fixture
def transform_service(test_settings, pattern_service, search_service):
    return TransformService(test_settings, pattern_service, search_service)


@pytest.fixture
def pfc_service(test_settings, pattern_service):
    return PfcService(test_settings, pattern_service)
