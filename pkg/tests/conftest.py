import os

import pytest


@pytest.fixture(scope="session")
def workers() -> int:
    env = os.environ.get("HITEMP_WORKERS")
    if env:
        return max(1, int(env))
    return max(1, min(2, os.cpu_count() or 1))
