"""
Shared test configuration
"""
import json
import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

settings.register_profile('default', deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile('ci', deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv('HYPOTHESIS_PROFILE', 'default'))


@pytest.fixture
def proofs_dir() -> Path:
    return ROOT / 'proofs'


@pytest.fixture
def write_json(tmp_path):
    """Write a JSON document into the test's temporary directory and return its path"""
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding='utf-8')
        return str(path)

    return write
