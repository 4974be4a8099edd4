import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from backlund import BacklundTable  # noqa: E402


@pytest.fixture(scope="session")
def table() -> BacklundTable:
    """A_0..A_12, общая для всех тестов сессии"""
    return BacklundTable.build(12)


@pytest.fixture
def cache_dir(tmp_path) -> str:
    return str(tmp_path / "sg-cache")
