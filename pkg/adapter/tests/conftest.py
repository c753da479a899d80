from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def fixture_export():
    return DATA_DIR / "fixture_export.jsonl"


@pytest.fixture(scope="session")
def lr_fixture_path():
    return DATA_DIR / "lr_fixture.json"
