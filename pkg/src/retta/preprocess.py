"""Text normalization, tokenization, stemming, and vocabulary building.

The chain is ``normalize -> tokenize -> stem`` and every stage is a pure
function, so documents can be processed in any order (or in parallel)
with identical results.  Stop-words are removed before stemming so that
stemmed content words can never collide with the stop list.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

from .corpus import RawDocument
from .porter import stem

_TAG_RE = re.compile(r"<[^>]*>")
_URL_RE = re.compile(r"https?://\S+", re.IGNORECASE)
_WS_RE = re.compile(r"\s+")
# word characters minus underscore: underscores are token boundaries
_TOKEN_RE = re.compile(r"[^\W_]+")


@dataclass
class TokenizedDocument:
    """Stemmed token sequence for one raw document."""

    doc_id: str
    tokens: list[str]

    @property
    def token_count(self) -> int:
        return len(self.tokens)


@dataclass
class Vocabulary:
    """Dense bidirectional term <-> index map shared by all models."""

    index_to_term: list[str]
    term_to_index: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.term_to_index = {t: i for i, t in enumerate(self.index_to_term)}
        if len(self.term_to_index) != len(self.index_to_term):
            raise ValueError("vocabulary terms must be distinct")

    @property
    def size(self) -> int:
        return len(self.index_to_term)

    def __len__(self) -> int:
        return len(self.index_to_term)

    def __contains__(self, term: str) -> bool:
        return term in self.term_to_index

    def encode(self, tokens: list[str]) -> list[int]:
        """Map tokens to indices, dropping out-of-vocabulary terms."""
        t2i = self.term_to_index
        return [t2i[t] for t in tokens if t in t2i]


def load_stopwords(path=None) -> frozenset[str]:
    """Read the stop-word list: one term per line, '#'-comments ignored.

    Without a path the list shipped with the package (175 common English
    words) is used.
    """
    if path is None:
        text = resources.files("retta.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    terms = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            terms.add(line)
    return frozenset(terms)


def normalize(text: str) -> str:
    """Strip <...> markup and http(s) URLs, lowercase, collapse whitespace."""
    text = _TAG_RE.sub(" ", text)
    text = _URL_RE.sub(" ", text)
    text = text.lower()
    return _WS_RE.sub(" ", text).strip()


def tokenize(text: str, stopwords: frozenset[str], min_length: int = 2) -> list[str]:
    """Split normalized text into terms.

    Tokens containing digits, tokens shorter than ``min_length`` (single
    characters by default, tweet-noise control), and stop-words are
    dropped; order is preserved.
    """
    out = []
    for tok in _TOKEN_RE.findall(text):
        if len(tok) < min_length or any(ch.isdigit() for ch in tok) or tok in stopwords:
            continue
        out.append(tok)
    return out


def preprocess_document(doc: RawDocument, stopwords: frozenset[str]) -> TokenizedDocument:
    tokens = [stem(t) for t in tokenize(normalize(doc.text), stopwords)]
    return TokenizedDocument(doc_id=doc.id, tokens=tokens)


def build_vocabulary(docs: list[TokenizedDocument], min_frequency: int = 1) -> Vocabulary:
    """Vocabulary of terms whose corpus frequency reaches ``min_frequency``,
    indexed in descending frequency order (lexicographic tie-break)."""
    if min_frequency < 1:
        raise ValueError("min_frequency must be >= 1")
    freq = Counter()
    for doc in docs:
        freq.update(doc.tokens)
    kept = [t for t, n in freq.items() if n >= min_frequency]
    kept.sort(key=lambda t: (-freq[t], t))
    return Vocabulary(index_to_term=kept)
