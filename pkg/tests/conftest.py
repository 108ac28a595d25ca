from pathlib import Path

import pytest

from infowarehouse.transcription import load_manifest, transcribe
from infowarehouse.warehouse import Warehouse

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def campaign_manifest():
    return load_manifest(FIXTURES / "campaign" / "campaign.manifest")


@pytest.fixture
def campaign_warehouse(campaign_manifest):
    """Fixture corpus ingested into a fresh in-memory warehouse."""
    warehouse = Warehouse()
    report = transcribe(campaign_manifest, warehouse)
    return warehouse, report
