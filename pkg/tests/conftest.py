import json
from datetime import datetime, timezone
from pathlib import Path

import pytest

from retta.corpus import Corpus, RawDocument
from retta.pipeline import Pipeline, RunConfig
from retta.registry import RegionSpec, load_catalog
from retta.store import MemoryProjectStore

DATA_DIR = Path(__file__).parent / "data"


def ts(hour=12, minute=0, day=1):
    return datetime(2024, 5, day, hour, minute, tzinfo=timezone.utc)


def make_doc(doc_id, text="signal stuck on red", source="twitter", when=None,
             tags=None, geo=None, **meta):
    meta = dict(meta)
    if tags is not None:
        meta["hashtags"] = " ".join(tags)
    return RawDocument(
        id=doc_id,
        source_kind=source,
        text=text,
        timestamp=when or ts(),
        geo=geo,
        meta=meta,
    )


@pytest.fixture(scope="session")
def fixture_corpus_path():
    return DATA_DIR / "tst_fixture.jsonl"


@pytest.fixture(scope="session")
def historical_corpus_path():
    return DATA_DIR / "historical_fixture.jsonl"


@pytest.fixture(scope="session")
def porter_pair():
    voc = (DATA_DIR / "porter" / "voc.txt").read_text().split()
    out = (DATA_DIR / "porter" / "output.txt").read_text().split()
    assert len(voc) == len(out)
    return voc, out


@pytest.fixture(scope="session")
def run_spec():
    return json.loads((DATA_DIR / "run_config.json").read_text())


@pytest.fixture
def region():
    return RegionSpec(
        name="calgary",
        bounding_box=(50.8, -114.4, 51.3, -113.8),
        declared_available_sources=frozenset({"twitter", "historical"}),
    )


@pytest.fixture
def pipeline(fixture_corpus_path, historical_corpus_path):
    return Pipeline(
        MemoryProjectStore(),
        catalog=load_catalog(),
        connectors={
            "twitter": str(fixture_corpus_path),
            "historical": str(historical_corpus_path),
        },
        default_run_config=RunConfig(iterations=50, topics=3),
    )


def corpus_of(*docs):
    return Corpus(documents=list(docs))
