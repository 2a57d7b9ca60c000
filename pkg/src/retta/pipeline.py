"""Workflow orchestration: a persisted project advances through the
elicitation activities as an explicit state machine.

States: Created -> ServiceSelected -> SourcesSelected -> ContextSet ->
Running -> Complete | Failed.  Source selection and context setting commit
atomically, so SourcesSelected is never persisted on its own.  A finished
project can only be re-run with an explicit reset, which returns it to
ContextSet.  Every state change is persisted before the next step runs.

A run is fully determined by its inputs and the run-config seed; wall
clock timings are stored next to, not inside, the result record so two
identical runs produce byte-identical result files.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import classify as classify_mod
from . import registry as registry_mod
from . import rules as rules_mod
from . import topics as topics_mod
from .corpus import (
    ContextSpec,
    Corpus,
    RawDocument,
    corpus_stats,
    filter_by_context,
    format_timestamp,
    load_jsonl,
    parse_timestamp,
)
from .errors import (
    EligibilityError,
    EmptyInputError,
    IntegrityError,
    RettaError,
    SchemaError,
    StateError,
    ValidationError,
)
from .preprocess import build_vocabulary, load_stopwords, preprocess_document
from .registry import Catalog, RegionSpec
from .store import FileProjectStore

STATES = (
    "Created",
    "ServiceSelected",
    "SourcesSelected",
    "ContextSet",
    "Running",
    "Complete",
    "Failed",
)

_STATE_ORDER = {name: i for i, name in enumerate(STATES)}


@dataclass(frozen=True)
class RunConfig:
    """Everything that parameterizes a run; the result embeds a snapshot."""

    seed: int = 42
    topics: int = 5
    alpha: float | None = None  # None -> 50 / topics
    beta: float = 0.01
    iterations: int = 1000
    smoothing: float = 1.0
    min_support: float = 0.05
    min_confidence: float = 0.6
    max_itemset_size: int = 4
    pooling: str = "by_hashtag"
    window_minutes: int = 60
    candidate_count: int = 10
    top_term_count: int = 10
    min_frequency: int = 1

    @property
    def effective_alpha(self) -> float:
        return 50.0 / self.topics if self.alpha is None else self.alpha

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "topics": self.topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "iterations": self.iterations,
            "smoothing": self.smoothing,
            "min_support": self.min_support,
            "min_confidence": self.min_confidence,
            "max_itemset_size": self.max_itemset_size,
            "pooling": self.pooling,
            "window_minutes": self.window_minutes,
            "candidate_count": self.candidate_count,
            "top_term_count": self.top_term_count,
            "min_frequency": self.min_frequency,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RunConfig":
        known = {f: obj[f] for f in cls.__dataclass_fields__ if f in obj}
        return cls(**known)


@dataclass
class TopicSummary:
    topic_index: int
    top_terms: list[tuple[str, float]]
    representative_doc_ids: list[str]
    expanded_terms: list[str] = field(default_factory=list)
    coherence_note: float | None = None


@dataclass
class ElicitationResult:
    requirements: list[classify_mod.Requirement]
    topics: list[TopicSummary]
    rules: list[rules_mod.AssociationRule]
    rejected: list[classify_mod.RejectedCandidate]
    run_config: dict
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def functional(self) -> list[classify_mod.Requirement]:
        return [r for r in self.requirements if r.kind == classify_mod.FR]

    @property
    def non_functional(self) -> list[classify_mod.Requirement]:
        return [r for r in self.requirements if r.kind == classify_mod.NFR]


@dataclass
class Project:
    id: str
    region: RegionSpec
    state: str = "Created"
    service_id: str | None = None
    selected_sources: list[str] = field(default_factory=list)
    contexts: dict[str, ContextSpec] = field(default_factory=dict)
    created_at: datetime = field(default_factory=lambda: _now())
    updated_at: datetime = field(default_factory=lambda: _now())
    result: ElicitationResult | None = None
    failure_reason: str | None = None


def _now() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


# ---------------------------------------------------------------------------
# serialization


def region_to_dict(region: RegionSpec) -> dict:
    return {
        "name": region.name,
        "bounding_box": list(region.bounding_box),
        "declared_available_sources": sorted(region.declared_available_sources),
    }


def region_from_dict(obj: dict) -> RegionSpec:
    try:
        return RegionSpec(
            name=obj["name"],
            bounding_box=tuple(obj["bounding_box"]),
            declared_available_sources=frozenset(obj.get("declared_available_sources", [])),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"bad region record: {exc}")


def context_to_dict(spec: ContextSpec) -> dict:
    return {
        "keywords": list(spec.keywords),
        "hashtags": list(spec.hashtags),
        "date_range": (
            [format_timestamp(spec.date_range[0]), format_timestamp(spec.date_range[1])]
            if spec.date_range
            else None
        ),
        "language": spec.language,
        "max_documents": spec.max_documents,
        "geo_filter": list(spec.geo_filter) if spec.geo_filter else None,
    }


def context_from_dict(obj: dict) -> ContextSpec:
    date_range = None
    if obj.get("date_range"):
        start, end = obj["date_range"]
        date_range = (parse_timestamp(start), parse_timestamp(end))
    geo_filter = tuple(obj["geo_filter"]) if obj.get("geo_filter") else None
    spec = ContextSpec(
        keywords=list(obj.get("keywords", [])),
        hashtags=list(obj.get("hashtags", [])),
        date_range=date_range,
        language=obj.get("language", "en"),
        max_documents=int(obj.get("max_documents", 1000)),
        geo_filter=geo_filter,
    )
    spec.validate()
    return spec


def requirement_to_dict(req: classify_mod.Requirement) -> dict:
    return {
        "id": req.id,
        "text": req.text,
        "kind": req.kind,
        "nfr_category": req.nfr_category,
        "confidence": req.confidence,
        "provenance": {
            "doc_ids": list(req.provenance.doc_ids),
            "topic_index": req.provenance.topic_index,
        },
        "service_id": req.service_id,
    }


def requirement_from_dict(obj: dict) -> classify_mod.Requirement:
    req = classify_mod.Requirement(
        id=obj["id"],
        text=obj["text"],
        kind=obj["kind"],
        nfr_category=obj.get("nfr_category"),
        confidence=obj["confidence"],
        provenance=classify_mod.Provenance(
            doc_ids=tuple(obj["provenance"]["doc_ids"]),
            topic_index=obj["provenance"]["topic_index"],
        ),
        service_id=obj["service_id"],
    )
    req.validate()
    return req


def result_to_dict(result: ElicitationResult) -> dict:
    return {
        "requirements": [requirement_to_dict(r) for r in result.requirements],
        "topics": [
            {
                "topic_index": t.topic_index,
                "top_terms": [[term, prob] for term, prob in t.top_terms],
                "representative_doc_ids": list(t.representative_doc_ids),
                "expanded_terms": list(t.expanded_terms),
                "coherence_note": t.coherence_note,
            }
            for t in result.topics
        ],
        "rules": [
            {
                "antecedent": sorted(r.antecedent),
                "consequent": sorted(r.consequent),
                "support": r.support,
                "confidence": r.confidence,
                "lift": r.lift,
            }
            for r in result.rules
        ],
        "rejected": [{"doc_id": r.doc_id, "reason": r.reason} for r in result.rejected],
        "run_config": dict(result.run_config),
    }


def result_from_dict(obj: dict, timings: dict | None = None) -> ElicitationResult:
    return ElicitationResult(
        requirements=[requirement_from_dict(r) for r in obj["requirements"]],
        topics=[
            TopicSummary(
                topic_index=t["topic_index"],
                top_terms=[(term, prob) for term, prob in t["top_terms"]],
                representative_doc_ids=list(t["representative_doc_ids"]),
                expanded_terms=list(t.get("expanded_terms", [])),
                coherence_note=t.get("coherence_note"),
            )
            for t in obj["topics"]
        ],
        rules=[
            rules_mod.AssociationRule(
                antecedent=frozenset(r["antecedent"]),
                consequent=frozenset(r["consequent"]),
                support=r["support"],
                confidence=r["confidence"],
                lift=r["lift"],
            )
            for r in obj["rules"]
        ],
        rejected=[
            classify_mod.RejectedCandidate(doc_id=r["doc_id"], reason=r["reason"])
            for r in obj["rejected"]
        ],
        run_config=dict(obj["run_config"]),
        timings=dict(timings or {}),
    )


def project_to_dict(project: Project) -> dict:
    return {
        "id": project.id,
        "region": region_to_dict(project.region),
        "state": project.state,
        "service_id": project.service_id,
        "selected_sources": list(project.selected_sources),
        "contexts": {kind: context_to_dict(c) for kind, c in project.contexts.items()},
        "created_at": format_timestamp(project.created_at),
        "updated_at": format_timestamp(project.updated_at),
        "failure_reason": project.failure_reason,
    }


def project_from_dict(obj: dict, result: ElicitationResult | None = None) -> Project:
    state = obj["state"]
    if state not in STATES:
        raise IntegrityError(f"project record has unknown state {state!r}")
    return Project(
        id=obj["id"],
        region=region_from_dict(obj["region"]),
        state=state,
        service_id=obj.get("service_id"),
        selected_sources=list(obj.get("selected_sources", [])),
        contexts={k: context_from_dict(v) for k, v in obj.get("contexts", {}).items()},
        created_at=parse_timestamp(obj["created_at"]),
        updated_at=parse_timestamp(obj["updated_at"]),
        result=result,
        failure_reason=obj.get("failure_reason"),
    )


# ---------------------------------------------------------------------------
# orchestration


class Pipeline:
    """Runs the elicitation workflow over a store, a catalog, and a set of
    file-backed source connectors (source kind -> corpus path)."""

    def __init__(
        self,
        store,
        catalog: Catalog | None = None,
        connectors: dict[str, str] | None = None,
        training_path=None,
        boost_rules_path=None,
        stopwords_path=None,
        default_run_config: RunConfig | None = None,
    ):
        self.store = store
        self.catalog = catalog or registry_mod.load_catalog()
        self.connectors = dict(connectors or {})
        self.training_path = training_path
        self.boost_rules_path = boost_rules_path
        self.stopwords = load_stopwords(stopwords_path)
        self.default_run_config = default_run_config or RunConfig()
        self._corpora: dict[str, Corpus] = {}
        self._models: dict[float, tuple] = {}  # smoothing -> trained model pair
        self._boost_rules: list | None = None
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- store plumbing

    def _lock(self, project_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(project_id, threading.Lock())

    def _persist(self, project: Project):
        project.updated_at = _now()
        self.store.save_project(project.id, project_to_dict(project))

    def save_project(self, project: Project):
        self._persist(project)

    def load_project(self, project_id: str) -> Project:
        record = self.store.load_project(project_id)
        result = None
        if record["state"] == "Complete":
            result = result_from_dict(
                self.store.load_result(project_id), self.store.load_timings(project_id)
            )
        return project_from_dict(record, result=result)

    # -- connectors

    def connector_corpus(self, kind: str) -> Corpus:
        if kind not in self.connectors:
            raise EligibilityError(f"no connector configured for source kind {kind!r}")
        if kind not in self._corpora:
            self._corpora[kind] = load_jsonl(self.connectors[kind])
        return self._corpora[kind]

    def source_stats(self) -> dict[str, int]:
        """Per-kind document tallies over every configured connector."""
        totals: dict[str, int] = {}
        for kind in self.connectors:
            for k, n in corpus_stats(self.connector_corpus(kind)).per_source.items():
                totals[k] = totals.get(k, 0) + n
        return totals

    # -- workflow operations

    def create_project(self, region: RegionSpec) -> Project:
        region.validate()
        project = Project(id=f"p{uuid.uuid4().hex[:12]}", region=region)
        self._persist(project)
        return project

    def eligible_services(self, project: Project):
        return registry_mod.eligible_services(self.catalog, project.region, self.source_stats())

    def select_service(self, project: Project, service_id: str) -> Project:
        with self._lock(project.id):
            if project.state != "Created":
                raise StateError(f"cannot select a service in state {project.state}")
            eligible = {svc.id for svc in self.eligible_services(project)}
            if service_id not in eligible:
                raise EligibilityError(
                    f"service {service_id!r} is not offered for region {project.region.name!r}"
                )
            project.service_id = service_id
            project.state = "ServiceSelected"
            self._persist(project)
            return project

    def available_sources(self, project: Project):
        if project.service_id is None:
            raise StateError("no service selected")
        service = self.catalog.service(project.service_id)
        return registry_mod.available_sources(
            self.catalog, project.region, service, self.source_stats()
        )

    def set_sources_and_context(
        self, project: Project, sources: list[str], contexts: dict[str, ContextSpec]
    ) -> Project:
        with self._lock(project.id):
            if project.state != "ServiceSelected":
                raise StateError(f"cannot set sources in state {project.state}")
            if not sources:
                raise EligibilityError("at least one data source must be selected")
            available = {src.kind for src in self.available_sources(project)}
            for kind in sources:
                if kind not in available:
                    raise EligibilityError(f"source {kind!r} is not available for this project")
                if kind not in contexts:
                    raise SchemaError(f"no context given for source {kind!r}", source=kind)
                _check_context_schema(self.catalog, kind, contexts[kind])
            # SourcesSelected is transited atomically inside this call
            project.selected_sources = list(sources)
            project.contexts = {kind: contexts[kind] for kind in sources}
            project.state = "ContextSet"
            self._persist(project)
            return project

    def _prepare_run(self, project: Project, reset: bool):
        """Transition to Running (applying an explicit reset first) and
        persist it.  A reset never deletes the previous result files: they
        are only served while the state is Complete, and a successful new
        run overwrites them."""
        with self._lock(project.id):
            if project.state in ("Complete", "Failed"):
                if not reset:
                    raise StateError(
                        f"project is {project.state}; pass reset to run it again"
                    )
                project.state = "ContextSet"
                project.result = None
                project.failure_reason = None
                self._persist(project)
            if project.state != "ContextSet":
                raise StateError(f"cannot run in state {project.state}")
            project.state = "Running"
            self._persist(project)

    def _finish_run(self, project: Project, config: RunConfig) -> Project:
        with self._lock(project.id):
            try:
                result = self._execute(project, config)
            except RettaError as exc:
                project.state = "Failed"
                project.failure_reason = str(exc)
                self._persist(project)
                return project
            except Exception as exc:  # pragma: no cover - defensive
                project.state = "Failed"
                project.failure_reason = f"internal: {exc}"
                self._persist(project)
                return project
            project.result = result
            project.state = "Complete"
            project.failure_reason = None
            # result before state: Complete must imply a readable result file
            self.store.save_result(project.id, result_to_dict(result), result.timings)
            self._persist(project)
            return project

    def run_elicitation(
        self, project: Project, run_config: RunConfig | None = None, reset: bool = False
    ) -> Project:
        config = run_config or self.default_run_config
        self._prepare_run(project, reset)
        return self._finish_run(project, config)

    def run_async(
        self, project: Project, run_config: RunConfig | None = None, reset: bool = False
    ) -> threading.Thread:
        """Start a run on a worker thread.

        The Running state (and any reset) is persisted before this returns,
        so callers can answer "accepted" knowing polls will see Running.
        """
        config = run_config or self.default_run_config
        self._prepare_run(project, reset)
        thread = threading.Thread(
            target=self._finish_run, args=(project, config), daemon=True
        )
        thread.start()
        return thread

    # -- the seven-activity run itself

    def _execute(self, project: Project, config: RunConfig) -> ElicitationResult:
        timings: dict[str, float] = {}

        def timed(stage):
            class _Timer:
                def __enter__(self_inner):
                    self_inner.t0 = time.perf_counter()

                def __exit__(self_inner, *exc):
                    timings[stage] = time.perf_counter() - self_inner.t0

            return _Timer()

        stage = "load_filter"
        try:
            with timed(stage):
                merged_docs = []
                seen_ids = set()
                for kind in project.selected_sources:
                    source_corpus = self.connector_corpus(kind)
                    filtered = filter_by_context(source_corpus, project.contexts[kind])
                    for doc in filtered:
                        if doc.id in seen_ids:
                            raise IntegrityError(
                                f"duplicate document id {doc.id!r} across sources"
                            )
                        seen_ids.add(doc.id)
                        merged_docs.append(doc)
                merged = Corpus(documents=merged_docs)
            if len(merged) == 0:
                raise EmptyInputError("empty corpus")

            stage = "preprocess"
            with timed(stage):
                tokenized = [preprocess_document(doc, self.stopwords) for doc in merged]
                modeled = [t for t in tokenized if t.tokens]
                vocab = build_vocabulary(modeled, min_frequency=config.min_frequency)
            if vocab.size == 0:
                raise EmptyInputError(f"{stage}: no terms survive preprocessing")

            stage = "pool"
            with timed(stage):
                pools = topics_mod.pool(
                    modeled, merged, config.pooling, vocab, config.window_minutes
                )
                effective_pooling = config.pooling
                if config.pooling == "by_hashtag":
                    hashtag_pools = [p for p in pools if p.pool_key != "_none"]
                    if len(hashtag_pools) < 2:
                        # too few hashtags for pooling to help; fall back to time windows
                        effective_pooling = "by_time_window"
                        pools = topics_mod.pool(
                            modeled, merged, "by_time_window", vocab, config.window_minutes
                        )
            if not pools:
                raise EmptyInputError(f"{stage}: no nonempty pools")

            stage = "fit_lda"
            with timed(stage):
                model = topics_mod.fit_lda(
                    pools,
                    k=config.topics,
                    alpha=config.effective_alpha,
                    beta=config.beta,
                    iterations=config.iterations,
                    seed=config.seed,
                    vocab=vocab,
                )
                artifact_path = getattr(self.store, "artifact_path", None)
                if artifact_path is not None:
                    topics_mod.save_model(model, artifact_path(project.id, "model.json"))

            stage = "candidates"
            with timed(stage):
                tok_by_id = {t.doc_id: t for t in modeled}
                candidate_ids: dict[str, int] = {}
                summaries = []
                for k in range(model.K):
                    rep_ids = topics_mod.representative_docs(
                        model, pools, merged, k, config.candidate_count
                    )
                    summaries.append(
                        TopicSummary(
                            topic_index=k,
                            top_terms=topics_mod.top_terms(model, k, config.top_term_count),
                            representative_doc_ids=rep_ids,
                        )
                    )
                    for doc_id in rep_ids:
                        candidate_ids.setdefault(doc_id, k)
                candidates = [
                    (merged.by_id(doc_id), tok_by_id[doc_id], topic_index)
                    for doc_id, topic_index in candidate_ids.items()
                ]

            stage = "classify"
            with timed(stage):
                fr_nfr_model, nfr_model = self._train_models(config)
                if self._boost_rules is None:
                    self._boost_rules = classify_mod.load_boost_rules(self.boost_rules_path)
                requirements, rejected = classify_mod.classify_candidates(
                    candidates, fr_nfr_model, nfr_model, self._boost_rules, project.service_id
                )

            stage = "mine_rules"
            with timed(stage):
                transactions = [
                    rules_mod.Transaction(doc_id=tok.doc_id, items=frozenset(tok.tokens))
                    for _, tok, _ in candidates
                ]
                mined = rules_mod.mine_rules(
                    transactions,
                    min_support=config.min_support,
                    min_confidence=config.min_confidence,
                    max_itemset_size=config.max_itemset_size,
                )

            stage = "expand_terms"
            with timed(stage):
                for summary in summaries:
                    seeds = {term for term, _ in summary.top_terms}
                    summary.expanded_terms = sorted(rules_mod.expand_terms(mined, seeds))
        except RettaError as exc:
            if str(exc) == "empty corpus":
                raise
            raise type(exc)(f"{stage}: {exc}") if not str(exc).startswith(stage) else exc

        snapshot = config.to_dict()
        snapshot["pooling_effective"] = effective_pooling
        result = ElicitationResult(
            requirements=requirements,
            topics=summaries,
            rules=mined,
            rejected=rejected,
            run_config=snapshot,
            timings=timings,
        )
        _check_provenance_closure(result, merged)
        return result

    def _train_models(self, config: RunConfig):
        # the training artifacts are fixed per pipeline, so cache per smoothing
        cached = self._models.get(config.smoothing)
        if cached is not None:
            return cached
        labeled = classify_mod.load_training_file(self.training_path)
        tokenized = []
        for i, (text, label) in enumerate(labeled):
            doc = preprocess_document(
                _pseudo_doc(f"train{i}", text), self.stopwords
            )
            tokenized.append((doc, label))
        vocab = build_vocabulary([doc for doc, _ in tokenized], min_frequency=1)

        stage1 = []
        stage2 = []
        for doc, label in tokenized:
            kind, category = classify_mod.parse_label(label)
            stage1.append((doc, kind))
            if kind == classify_mod.NFR and category is not None:
                stage2.append((doc, category))
        fr_nfr_model = classify_mod.train_nb(
            stage1, vocab, smoothing=config.smoothing, classes=[classify_mod.FR, classify_mod.NFR]
        )
        present = {label for _, label in stage2}
        categories = [c for c in classify_mod.NFR_CATEGORIES if c in present]
        nfr_model = classify_mod.train_nb(
            stage2, vocab, smoothing=config.smoothing, classes=categories
        )
        self._models[config.smoothing] = (fr_nfr_model, nfr_model)
        return fr_nfr_model, nfr_model


def _pseudo_doc(doc_id: str, text: str):
    return RawDocument(
        id=doc_id,
        source_kind="manual",
        text=text,
        timestamp=datetime(2000, 1, 1, tzinfo=timezone.utc),
    )


def _check_context_schema(catalog: Catalog, kind: str, spec: ContextSpec):
    """Every required field of the source's schema must be populated."""
    spec.validate()
    populated = {
        "keywords": bool(spec.keywords),
        "hashtags": bool(spec.hashtags),
        "date_range": spec.date_range is not None,
        "language": bool(spec.language),
        "max_documents": spec.max_documents >= 1,
        "geo_area": spec.geo_filter is not None,
    }
    for fd in registry_mod.context_schema(catalog, kind):
        if fd.required and not populated.get(fd.name, False):
            raise SchemaError(f"{fd.name} required", field=fd.name, source=kind)


def _check_provenance_closure(result: ElicitationResult, merged: Corpus):
    ids = {doc.id for doc in merged}
    for req in result.requirements:
        for doc_id in req.provenance.doc_ids:
            if doc_id not in ids:
                raise IntegrityError(
                    f"requirement {req.id} references unknown document {doc_id!r}"
                )
    for summary in result.topics:
        for doc_id in summary.representative_doc_ids:
            if doc_id not in ids:
                raise IntegrityError(
                    f"topic {summary.topic_index} references unknown document {doc_id!r}"
                )


def open_store(path=None) -> FileProjectStore:
    """File store at ``path``, RETTA_STORE, or ./retta-store."""
    import os

    root = path or os.environ.get("RETTA_STORE") or "retta-store"
    return FileProjectStore(root)
