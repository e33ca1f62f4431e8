"""
Shared fixtures: the default DKK instances, a tiny enumeration budget and a
config writer for the runner and CLI tests
"""
import json
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import get_settings  # noqa: E402
from core.bases.schauder import DifferenceBasis  # noqa: E402
from core.dkk.dkk_space import build_dkk_space  # noqa: E402
from core.dkk.partition import partition_from_sizes  # noqa: E402
from core.spaces.sequence_spaces import LpSpace  # noqa: E402


def make_dkk(sizes, p=0.5, q=2.0):
    sigma = partition_from_sizes(sizes)
    return build_dkk_space(LpSpace(p=q, dim=sigma.dim), DifferenceBasis(p=p, dim=len(sizes)), sigma)


@pytest.fixture
def default_space():
    """S = l_2 (dim 15), X = difference system of l_1/2, blocks 1, 2, 4, 8"""
    return make_dkk([1, 2, 4, 8])


@pytest.fixture
def small_space():
    """Blocks 1, 2, 4: every transfer check is exhaustively computable"""
    return make_dkk([1, 2, 4])


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def small_budget(monkeypatch):
    monkeypatch.setenv("GREEDYLAB_BUDGET", "10")
    get_settings.cache_clear()
    yield 10


@pytest.fixture
def write_config(tmp_path):
    def _write(data, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return _write
