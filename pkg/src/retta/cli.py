"""Command-line surface.

Machine-readable output goes to stdout as JSON lines (or fixed-format
rule lines); diagnostics go to stderr.  Exit codes: 0 success, 1 domain
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import classify as classify_mod
from . import pipeline as pl
from . import rules as rules_mod
from . import topics as topics_mod
from .corpus import corpus_stats, format_timestamp, load_jsonl
from .engine import active_engine
from .errors import RettaError
from .porter import stem
from .preprocess import build_vocabulary, load_stopwords, preprocess_document
from .registry import load_catalog
from .store import FileProjectStore


def _emit(obj: dict):
    sys.stdout.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")


def _cmd_ingest(args) -> int:
    corpus = load_jsonl(args.corpus)
    stats = corpus_stats(corpus)
    _emit(
        {
            "documents": len(corpus),
            "by_source": stats.per_source,
            "min_timestamp": format_timestamp(stats.min_timestamp) if stats.min_timestamp else None,
            "max_timestamp": format_timestamp(stats.max_timestamp) if stats.max_timestamp else None,
            "distinct_hashtags": stats.distinct_hashtags,
        }
    )
    return 0


def _cmd_preprocess(args) -> int:
    corpus = load_jsonl(args.corpus)
    stopwords = load_stopwords(args.stopwords)
    for doc in corpus:
        tok = preprocess_document(doc, stopwords)
        _emit({"doc_id": tok.doc_id, "tokens": tok.tokens})
    return 0


def _tokenize_corpus(args):
    corpus = load_jsonl(args.corpus)
    stopwords = load_stopwords(getattr(args, "stopwords", None))
    tokenized = [preprocess_document(doc, stopwords) for doc in corpus]
    modeled = [t for t in tokenized if t.tokens]
    vocab = build_vocabulary(modeled, min_frequency=args.min_frequency)
    return corpus, modeled, vocab


def _cmd_topics(args) -> int:
    corpus, modeled, vocab = _tokenize_corpus(args)
    pools = topics_mod.pool(modeled, corpus, args.strategy, vocab, args.window_minutes)
    alpha = args.alpha if args.alpha is not None else 50.0 / args.k
    model = topics_mod.fit_lda(
        pools, k=args.k, alpha=alpha, beta=args.beta,
        iterations=args.iterations, seed=args.seed, vocab=vocab,
    )
    print(f"engine={active_engine()} pools={len(pools)} vocab={vocab.size}", file=sys.stderr)
    for k in range(model.K):
        terms = topics_mod.top_terms(model, k, args.top)
        _emit({"topic": k, "top_terms": [[t, round(p, 6)] for t, p in terms]})
    if args.dump:
        topics_mod.save_model(model, args.dump)
    return 0


def _cmd_classify(args) -> int:
    stopwords = load_stopwords(args.stopwords)
    labeled = classify_mod.load_training_file(args.train)
    tokenized = []
    for i, (text, label) in enumerate(labeled):
        doc = pl._pseudo_doc(f"train{i}", text)
        tokenized.append((preprocess_document(doc, stopwords), label))
    vocab = build_vocabulary([d for d, _ in tokenized], min_frequency=1)
    stage1 = []
    stage2 = []
    for doc, label in tokenized:
        kind, category = classify_mod.parse_label(label)
        stage1.append((doc, kind))
        if kind == classify_mod.NFR and category:
            stage2.append((doc, category))
    if args.holdout is not None:
        _emit({"stage": "fr_nfr",
               **classify_mod.holdout_report(stage1, fraction=args.holdout, seed=args.seed)})
        _emit({"stage": "nfr_category",
               **classify_mod.holdout_report(stage2, fraction=args.holdout, seed=args.seed)})
        return 0
    if args.predict is None:
        print("error: either --predict or --holdout is required", file=sys.stderr)
        return 2
    fr_nfr = classify_mod.train_nb(
        stage1, vocab, smoothing=args.smoothing, classes=[classify_mod.FR, classify_mod.NFR]
    )
    present = {label for _, label in stage2}
    nfr = classify_mod.train_nb(
        stage2, vocab, smoothing=args.smoothing,
        classes=[c for c in classify_mod.NFR_CATEGORIES if c in present],
    )
    boost_rules = classify_mod.load_boost_rules(args.rules) if args.rules != "none" else []
    corpus = load_jsonl(args.predict)
    candidates = [
        (doc, preprocess_document(doc, stopwords), -1) for doc in corpus
    ]
    requirements, rejected = classify_mod.classify_candidates(
        candidates, fr_nfr, nfr, boost_rules, args.service
    )
    for req in requirements:
        _emit(
            {
                "doc_id": req.provenance.doc_ids[0],
                "kind": req.kind,
                "nfr_category": req.nfr_category,
                "confidence": round(req.confidence, 6),
            }
        )
    for rej in rejected:
        _emit({"doc_id": rej.doc_id, "rejected": rej.reason})
    return 0


def _cmd_rules(args) -> int:
    corpus, modeled, _vocab = _tokenize_corpus(args)
    transactions = [
        rules_mod.Transaction(doc_id=t.doc_id, items=frozenset(t.tokens)) for t in modeled
    ]
    mined = rules_mod.mine_rules(
        transactions,
        min_support=args.min_support,
        min_confidence=args.min_confidence,
        max_itemset_size=args.max_itemset_size,
    )
    for rule in mined:
        sys.stdout.write(rule.format_line() + "\n")
    return 0


def _load_run_spec(path) -> dict:
    import os

    with open(path, encoding="utf-8") as fh:
        spec = json.load(fh)
    base = os.path.dirname(os.path.abspath(path))

    def resolve(p):
        return p if p is None or os.path.isabs(p) else os.path.join(base, p)

    spec["connectors"] = {k: resolve(v) for k, v in spec.get("connectors", {}).items()}
    for key in ("training", "boost_rules", "stopwords", "catalog"):
        if spec.get(key):
            spec[key] = resolve(spec[key])
    return spec


def _cmd_run(args) -> int:
    spec = _load_run_spec(args.config)
    store = FileProjectStore(args.store or spec.get("store") or "retta-store")
    catalog = load_catalog(spec.get("catalog"))
    config = pl.RunConfig.from_dict(spec.get("run_config", {}))
    if args.seed is not None:
        config = pl.RunConfig.from_dict({**config.to_dict(), "seed": args.seed})
    pipeline = pl.Pipeline(
        store,
        catalog=catalog,
        connectors=spec.get("connectors", {}),
        training_path=spec.get("training"),
        boost_rules_path=spec.get("boost_rules"),
        stopwords_path=spec.get("stopwords"),
        default_run_config=config,
    )
    project = pipeline.create_project(pl.region_from_dict(spec["region"]))
    project = pipeline.select_service(project, spec["service_id"])
    contexts = {k: pl.context_from_dict(v) for k, v in spec.get("contexts", {}).items()}
    project = pipeline.set_sources_and_context(project, spec.get("sources", []), contexts)
    project = pipeline.run_elicitation(project, config)
    if project.state != "Complete":
        print(f"run failed: {project.failure_reason}", file=sys.stderr)
        _emit({"project_id": project.id, "state": project.state, "reason": project.failure_reason})
        return 1
    result = project.result
    _emit(
        {
            "project_id": project.id,
            "state": project.state,
            "result_path": str(store.result_path(project.id)),
            "requirements": len(result.requirements),
            "functional": len(result.functional),
            "non_functional": len(result.non_functional),
            "rules": len(result.rules),
            "rejected": len(result.rejected),
        }
    )
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .gateway import create_app

    store = FileProjectStore(args.store) if args.store else pl.open_store()
    catalog = load_catalog(args.catalog)
    connectors = {}
    for item in args.connector or []:
        kind, _, path = item.partition("=")
        if not path:
            raise RettaError(f"bad --connector {item!r}; expected kind=path")
        connectors[kind] = path
    pipeline = pl.Pipeline(store, catalog=catalog, connectors=connectors)
    app = create_app(pipeline, cors_origin=args.cors_origin)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_stem_preview(args) -> int:
    """Boost-rule authoring aid: show the stem each word maps to."""
    words = args.words
    if not words:
        words = sys.stdin.read().split()
    for word in words:
        _emit({"word": word, "stem": stem(word.lower())})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retta",
        description="Requirements elicitation for traffic-management services.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a corpus file and print its stats")
    p.add_argument("corpus")
    p.set_defaults(fn=_cmd_ingest)

    p = sub.add_parser("preprocess", help="emit stemmed tokens per document")
    p.add_argument("corpus")
    p.add_argument("--stopwords", default=None)
    p.set_defaults(fn=_cmd_preprocess)

    p = sub.add_parser("topics", help="fit a topic model and print top terms")
    p.add_argument("corpus")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--strategy", default="by_hashtag", choices=topics_mod.POOL_STRATEGIES)
    p.add_argument("--window-minutes", type=int, default=60)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--min-frequency", type=int, default=1)
    p.add_argument("--stopwords", default=None)
    p.add_argument("--dump", default=None, help="write a model dump file")
    p.set_defaults(fn=_cmd_topics)

    p = sub.add_parser("classify", help="train on labeled data and predict a corpus")
    p.add_argument("--train", default=None, help="labeled JSONL (default: shipped fixture set)")
    p.add_argument("--predict", default=None)
    p.add_argument("--holdout", type=float, default=None,
                   help="report holdout accuracy for this test fraction instead of predicting")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--rules", default=None, help="boost rules JSONL, or 'none'")
    p.add_argument("--service", default="TST")
    p.add_argument("--smoothing", type=float, default=1.0)
    p.add_argument("--stopwords", default=None)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("rules", help="mine association rules from a corpus")
    p.add_argument("corpus")
    p.add_argument("--min-support", type=float, default=0.05)
    p.add_argument("--min-confidence", type=float, default=0.6)
    p.add_argument("--max-itemset-size", type=int, default=4)
    p.add_argument("--min-frequency", type=int, default=1)
    p.add_argument("--stopwords", default=None)
    p.set_defaults(fn=_cmd_rules)

    p = sub.add_parser("run", help="run the full workflow from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--store", default=None)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("serve", help="start the HTTP gateway")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--store", default=None)
    p.add_argument("--catalog", default=None)
    p.add_argument("--connector", action="append", help="kind=path (repeatable)")
    p.add_argument("--cors-origin", default=None)
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("stem-preview", help="show stems for words (rule authoring aid)")
    p.add_argument("words", nargs="*")
    p.set_defaults(fn=_cmd_stem_preview)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except RettaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
