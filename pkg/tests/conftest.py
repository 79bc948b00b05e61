from pathlib import Path

import pytest

from finrelex import corpus, semvec
from finrelex.deptree import TreeView

DATA_DIR = Path(__file__).parent / "data"

FIXTURE_CORPUS = DATA_DIR / "fixture_corpus.jsonl"
FIXTURE_GOLD = DATA_DIR / "fixture_gold.jsonl"
TOY_EMBEDDINGS = DATA_DIR / "toy_embeddings.txt"


@pytest.fixture(scope="session")
def documents():
    return corpus.load_documents(FIXTURE_CORPUS)


@pytest.fixture(scope="session")
def doc_by_id(documents):
    return {d.id: d for d in documents}


@pytest.fixture(scope="session")
def gold_examples():
    return corpus.load_gold(FIXTURE_GOLD)


@pytest.fixture(scope="session")
def gold_by_id(gold_examples):
    return {g.id: g for g in gold_examples}


@pytest.fixture(scope="session")
def apple_doc(doc_by_id):
    return doc_by_id["apple-income"]


@pytest.fixture()
def apple_view(apple_doc):
    return TreeView.build(apple_doc)


@pytest.fixture(scope="session")
def toy_table():
    return semvec.load_embeddings(TOY_EMBEDDINGS)


@pytest.fixture(scope="session")
def lexicon():
    return semvec.LexiconConfig()
