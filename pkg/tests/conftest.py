import pytest

import fixtures_data
from termex.treebank import parse_bracketed, unlexicalize


@pytest.fixture
def fixture_paths(tmp_path):
    return fixtures_data.write_all(tmp_path / "data")


@pytest.fixture
def tree():
    """Parse + unlexicalize helper for inline bracket strings."""

    def build(text: str):
        return unlexicalize(parse_bracketed(text))

    return build
