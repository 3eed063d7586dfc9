from pathlib import Path

import pytest

from mixdialog.engine import load_bundle
from mixdialog.grammar import parse_grammar

ROOT = Path(__file__).resolve().parents[1]
BUNDLES = ROOT / "bundles"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def pizza_bundle():
    return load_bundle(BUNDLES / "pizza.dlg")


@pytest.fixture(scope="session")
def pizza_script(pizza_bundle):
    return pizza_bundle[0]


@pytest.fixture(scope="session")
def pizza_grammars(pizza_bundle):
    return pizza_bundle[1]


@pytest.fixture(scope="session")
def order_grammar(pizza_grammars):
    """The permutation-style form grammar (six explicit orderings)."""
    return pizza_grammars["sizetoppingcrust.gram"]


@pytest.fixture(scope="session")
def star_grammar():
    """The word-star form grammar (any number of slot words, any order)."""
    text = (BUNDLES / "alt" / "sizetoppingcrust.gram").read_text(encoding="utf-8")
    return parse_grammar(text)


def caller_lines(name: str) -> list[str]:
    lines = (GOLDEN / f"{name}.input").read_text(encoding="utf-8").splitlines()
    return [line for line in lines if line.strip()]


def expected_transcript(name: str) -> str:
    return (GOLDEN / f"{name}.expected").read_text(encoding="utf-8")
