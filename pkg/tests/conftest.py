import sys
from pathlib import Path

import pytest

# Add the project root directory to Python path
ROOT = Path(__file__).parent.parent.absolute()
sys.path.insert(0, str(ROOT))


@pytest.fixture
def configs_dir():
    return ROOT / "configs"


@pytest.fixture
def tmp_db(tmp_path, monkeypatch):
    import settings

    path = tmp_path / "polyspec.db"
    monkeypatch.setattr(settings, "DATABASE_PATH", str(path))
    return path
