"""Short-text pooling and LDA topic modeling.

Tweets are too short for LDA's co-occurrence statistics to bite, so
documents are pooled into pseudo-documents before fitting.  The default
strategy pools by hashtag; a whole-corpus single pool is available for
callers who want the literal one-big-document behavior.

Fitting uses collapsed Gibbs sampling (see the engine kernels) and is
fully determined by (pools, K, alpha, beta, iterations, seed).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from . import engine
from .corpus import Corpus, time_bucket
from .errors import EmptyInputError, IntegrityError, ParameterError
from .preprocess import TokenizedDocument, Vocabulary

POOL_STRATEGIES = ("by_hashtag", "by_time_window", "by_query_term", "single_pool")

MODEL_DUMP_VERSION = 1


@dataclass
class PooledDocument:
    """Pseudo-document: concatenated in-vocabulary tokens of its members."""

    pool_key: str
    member_doc_ids: list[str]
    tokens: list[int]
    member_token_counts: list[int]  # per member, aligned with member_doc_ids


@dataclass
class TopicModel:
    """Collapsed Gibbs state plus everything needed to reproduce it."""

    K: int
    alpha: float
    beta: float
    V: int
    vocabulary: Vocabulary
    assignments: np.ndarray  # (total tokens,) int32, pool-major
    pool_offsets: np.ndarray  # (D+1,) int32
    n_dk: np.ndarray  # (D, K) int32
    n_kw: np.ndarray  # (K, V) int32
    n_k: np.ndarray  # (K,) int32
    iterations: int
    seed: int

    @property
    def n_pools(self) -> int:
        return len(self.pool_offsets) - 1

    def check_counts(self):
        """Assert the three count-conservation identities."""
        _check_count_identities(self.pool_offsets, self.assignments, self.n_dk, self.n_kw, self.n_k)

    def theta(self) -> np.ndarray:
        """Document-topic distributions, rows summing to 1."""
        lengths = (self.pool_offsets[1:] - self.pool_offsets[:-1]).astype(np.float64)
        return (self.n_dk + self.alpha) / (lengths[:, None] + self.K * self.alpha)

    def phi(self) -> np.ndarray:
        """Topic-term distributions, rows summing to 1."""
        return (self.n_kw + self.beta) / (
            self.n_k[:, None].astype(np.float64) + self.V * self.beta
        )


def pool(
    docs: list[TokenizedDocument],
    raw: Corpus,
    strategy: str,
    vocab: Vocabulary,
    window_minutes: int = 60,
) -> list[PooledDocument]:
    """Group documents into pseudo-documents, sorted by pool key.

    by_hashtag: one pool per distinct hashtag (docs with several hashtags
    join several pools; hashtag-less docs pool under "_none").
    by_time_window: fixed UTC windows of ``window_minutes``.
    by_query_term: groups by the keyword recorded at filter time.
    single_pool: everything in one pseudo-document.

    Out-of-vocabulary tokens are dropped; pools left with zero tokens are
    dropped too.
    """
    if strategy not in POOL_STRATEGIES:
        raise ParameterError(f"unknown pooling strategy {strategy!r}")
    raw_by_id = {doc.id: doc for doc in raw}
    groups: dict[str, list[tuple[str, list[int]]]] = {}
    for doc in docs:
        raw_doc = raw_by_id.get(doc.doc_id)
        if raw_doc is None:
            raise IntegrityError(f"tokenized document {doc.doc_id!r} not found in corpus")
        encoded = vocab.encode(doc.tokens)
        if strategy == "by_hashtag":
            keys = raw_doc.hashtags or ["_none"]
        elif strategy == "by_time_window":
            start = time_bucket(raw_doc.timestamp, window_minutes)
            keys = [f"{start.strftime('%Y-%m-%dT%H:%M:%SZ')}/{window_minutes}m"]
        elif strategy == "by_query_term":
            keys = [raw_doc.meta.get("query_term", "_none")]
        else:
            keys = ["_all"]
        for key in keys:
            groups.setdefault(key, []).append((doc.doc_id, encoded))

    pools = []
    for key in sorted(groups):
        members = groups[key]
        tokens = [w for _, encoded in members for w in encoded]
        if not tokens:
            continue
        pools.append(
            PooledDocument(
                pool_key=key,
                member_doc_ids=[doc_id for doc_id, _ in members],
                tokens=tokens,
                member_token_counts=[len(encoded) for _, encoded in members],
            )
        )
    return pools


def _check_count_identities(offsets, z, n_dk, n_kw, n_k):
    lengths = np.asarray(offsets[1:]) - np.asarray(offsets[:-1])
    if not np.array_equal(np.asarray(n_dk).sum(axis=1), lengths):
        raise IntegrityError("doc-topic counts do not sum to document lengths")
    if not np.array_equal(np.asarray(n_kw).sum(axis=1), np.asarray(n_k)):
        raise IntegrityError("topic-term counts do not sum to topic totals")
    if int(np.asarray(n_k).sum()) != len(z):
        raise IntegrityError("topic totals do not sum to the token count")


def fit_lda(
    pools: list[PooledDocument],
    k: int,
    alpha: float,
    beta: float,
    iterations: int,
    seed: int,
    vocab: Vocabulary,
    validate_each_sweep: bool | None = None,
) -> TopicModel:
    """Fit by collapsed Gibbs sampling; deterministic for a given seed.

    ``validate_each_sweep`` asserts the count identities after every sweep
    (defaults to on when RETTA_DEBUG=1); the final state is bit-identical
    either way because the kernel resumes from its carried RNG state.
    """
    if k < 1:
        raise ParameterError("topic count must be >= 1")
    if iterations < 1:
        raise ParameterError("iterations must be >= 1")
    if alpha <= 0 or beta <= 0:
        raise ParameterError("alpha and beta must be > 0")
    if vocab.size < 1:
        raise EmptyInputError("empty vocabulary")
    total_tokens = sum(len(p.tokens) for p in pools)
    if total_tokens < 1:
        raise EmptyInputError("no tokens to model")

    tokens = np.fromiter(
        (w for p in pools for w in p.tokens), dtype=np.int32, count=total_tokens
    )
    offsets = np.zeros(len(pools) + 1, dtype=np.int32)
    offsets[1:] = np.cumsum([len(p.tokens) for p in pools])

    if validate_each_sweep is None:
        validate_each_sweep = os.environ.get("RETTA_DEBUG") == "1"
    args = (tokens, offsets, k, vocab.size, float(alpha), float(beta))
    if validate_each_sweep:
        z, n_dk, n_kw, n_k, state = engine.run_gibbs(*args, 0, seed)
        for _ in range(iterations):
            z, n_dk, n_kw, n_k, state = engine.run_gibbs(
                *args, 1, seed, init=(z, n_dk, n_kw, n_k, state)
            )
            _check_count_identities(offsets, z, n_dk, n_kw, n_k)
    else:
        z, n_dk, n_kw, n_k, _ = engine.run_gibbs(*args, iterations, seed)
    model = TopicModel(
        K=k,
        alpha=float(alpha),
        beta=float(beta),
        V=vocab.size,
        vocabulary=vocab,
        assignments=z,
        pool_offsets=offsets,
        n_dk=n_dk,
        n_kw=n_kw,
        n_k=n_k,
        iterations=iterations,
        seed=seed,
    )
    model.check_counts()
    return model


def top_terms(model: TopicModel, topic: int, m: int) -> list[tuple[str, float]]:
    """The m most probable terms of a topic with their probabilities,
    lexicographic tie-break."""
    if not 0 <= topic < model.K:
        raise ParameterError(f"topic {topic} out of range")
    if m < 1:
        raise ParameterError("m must be >= 1")
    phi_k = (model.n_kw[topic].astype(np.float64) + model.beta) / (
        float(model.n_k[topic]) + model.V * model.beta
    )
    terms = model.vocabulary.index_to_term
    ranked = sorted(zip(terms, phi_k.tolist()), key=lambda tp: (-tp[1], tp[0]))
    return ranked[:m]


def _doc_topic_fractions(
    model: TopicModel, pools: list[PooledDocument], topic: int
) -> dict[str, tuple[int, int]]:
    """Per member document: (tokens on `topic`, total tokens), aggregated
    over every pool the document belongs to."""
    fractions: dict[str, tuple[int, int]] = {}
    for d, p in enumerate(pools):
        start = int(model.pool_offsets[d])
        pos = start
        for doc_id, count in zip(p.member_doc_ids, p.member_token_counts):
            segment = model.assignments[pos : pos + count]
            on_topic = int((segment == topic).sum())
            prev_on, prev_total = fractions.get(doc_id, (0, 0))
            fractions[doc_id] = (prev_on + on_topic, prev_total + count)
            pos += count
    return fractions


def representative_docs(
    model: TopicModel, pools: list[PooledDocument], raw: Corpus, topic: int, n: int
) -> list[str]:
    """Member document ids ranked by the fraction of their tokens assigned
    to the topic (ties broken by ascending id), truncated to n."""
    if not 0 <= topic < model.K:
        raise ParameterError(f"topic {topic} out of range")
    if n < 1:
        raise ParameterError("n must be >= 1")
    fractions = _doc_topic_fractions(model, pools, topic)
    for doc_id in fractions:
        raw.by_id(doc_id)  # integrity: provenance must resolve
    ranked = sorted(
        fractions.items(), key=lambda kv: (-(kv[1][0] / kv[1][1]), kv[0])
    )
    return [doc_id for doc_id, _ in ranked[:n]]


def save_model(model: TopicModel, path):
    """Dump the model (hyperparameters, vocabulary, topic-term counts) as
    deterministic JSON for caching and golden comparisons."""
    payload = {
        "version": MODEL_DUMP_VERSION,
        "k": model.K,
        "alpha": model.alpha,
        "beta": model.beta,
        "seed": model.seed,
        "iterations": model.iterations,
        "vocabulary": model.vocabulary.index_to_term,
        "n_kw": model.n_kw.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")


def load_model_dump(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("version") != MODEL_DUMP_VERSION:
        raise IntegrityError(f"unsupported model dump version {payload.get('version')!r}")
    return payload
