import sys
from pathlib import Path

import pytest

from rlfkit.snapshot import load_bundle

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

CORPUS = ("clean", "ep_button", "ec_buttons", "vp_nav", "we_tags", "sr_promo")


def fixture_path(name: str) -> Path:
    path = FIXTURES / name
    if not path.is_dir():
        pytest.skip(f"fixture {name} not generated; run scripts/make_fixtures.py")
    return path


@pytest.fixture(scope="session")
def bundles():
    cache = {}

    def get(name: str):
        if name not in cache:
            cache[name] = load_bundle(fixture_path(name))
        return cache[name]

    return get


@pytest.fixture(scope="session")
def case_study(bundles):
    return bundles("case_study")


@pytest.fixture(scope="session")
def ep_button(bundles):
    return bundles("ep_button")
