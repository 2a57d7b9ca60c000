"""Multinomial Naive Bayes with regex keyword boosting.

Classification is two-stage: one model separates functional from
non-functional requirements, a second assigns NFR categories.  Boost
rules raise the weight of domain keywords at scoring time: a matched
term's count is multiplied by the largest gamma among matching rules, and
the reweighted bag is scored against every class.  Raising gamma therefore
pulls a document toward the rule's target class exactly when the matched
terms are more likely under that class than under its rivals — which is
what the shipped rule sets are built to guarantee.  Training always uses
raw counts.
"""

from __future__ import annotations

import json
import random
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .corpus import RawDocument
from .errors import ParameterError, TrainingError, ValidationError
from .preprocess import TokenizedDocument, Vocabulary

NFR_CATEGORIES = (
    "reliability",
    "performance",
    "security",
    "usability",
    "maintainability",
    "portability",
    "other",
)

FR = "FR"
NFR = "NFR"


@dataclass(frozen=True)
class BoostRule:
    """Regex over stemmed tokens; matched terms get their counts multiplied
    by gamma when the rule's service is being elicited."""

    id: str
    pattern: str
    target_class: str
    gamma: float
    service_id: str

    def __post_init__(self):
        if self.gamma < 1.0:
            raise ValidationError(f"boost rule {self.id!r}: gamma must be >= 1")
        try:
            compiled = re.compile(self.pattern)
        except re.error as exc:
            raise ValidationError(f"boost rule {self.id!r}: bad pattern: {exc}")
        object.__setattr__(self, "_compiled", compiled)

    def matches(self, term: str) -> bool:
        return self._compiled.fullmatch(term) is not None


def load_boost_rules(path=None) -> list[BoostRule]:
    """Boost-rule JSONL: records with id, pattern, target_class, gamma,
    service.  Without a path the shipped default set is used."""
    if path is None:
        text = resources.files("retta.data").joinpath("boost_rules.jsonl").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    rules = []
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        rules.append(
            BoostRule(
                id=obj["id"],
                pattern=obj["pattern"],
                target_class=obj["target_class"],
                gamma=float(obj["gamma"]),
                service_id=obj["service"],
            )
        )
    return rules


@dataclass
class NBModel:
    """Class priors and Laplace-smoothed term log-likelihoods."""

    classes: list[str]
    log_prior: np.ndarray  # (C,)
    log_likelihood: np.ndarray  # (C, V)
    vocabulary: Vocabulary
    smoothing: float
    trained_on: int

    def class_index(self, label: str) -> int:
        return self.classes.index(label)


@dataclass
class Prediction:
    label: str
    posterior: dict[str, float]
    unclassifiable: bool = False


@dataclass(frozen=True)
class Provenance:
    doc_ids: tuple[str, ...]
    topic_index: int


@dataclass
class Requirement:
    id: str
    text: str
    kind: str  # FR | NFR
    nfr_category: str | None
    confidence: float
    provenance: Provenance
    service_id: str

    def validate(self):
        if self.kind not in (FR, NFR):
            raise ValidationError(f"requirement {self.id!r}: bad kind {self.kind!r}")
        if (self.nfr_category is not None) != (self.kind == NFR):
            raise ValidationError(
                f"requirement {self.id!r}: nfr_category must be present iff kind is NFR"
            )
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(f"requirement {self.id!r}: confidence out of [0, 1]")


@dataclass
class RejectedCandidate:
    doc_id: str
    reason: str


def train_nb(
    labeled: list[tuple[TokenizedDocument, str]],
    vocab: Vocabulary,
    smoothing: float = 1.0,
    classes: list[str] | None = None,
) -> NBModel:
    """Train a multinomial model: priors from document counts, likelihoods
    from smoothed in-class term counts.

    ``classes`` fixes the class order (ties in prediction resolve to the
    first); by default the distinct labels are taken in sorted order.
    Every declared class needs at least one document.
    """
    if smoothing <= 0:
        raise ParameterError("smoothing must be > 0")
    if vocab.size == 0:
        raise TrainingError("empty vocabulary")
    if classes is None:
        classes = sorted({label for _, label in labeled})
    if not classes:
        raise TrainingError("no classes declared")
    for _, label in labeled:
        if label not in classes:
            raise TrainingError(f"label {label!r} is not a declared class")

    C, V = len(classes), vocab.size
    doc_counts = Counter(label for _, label in labeled)
    for cls in classes:
        if doc_counts[cls] == 0:
            raise TrainingError(f"class {cls!r} has no training documents")

    term_counts = np.zeros((C, V), dtype=np.float64)
    for doc, label in labeled:
        ci = classes.index(label)
        for w in vocab.encode(doc.tokens):
            term_counts[ci, w] += 1.0

    total = len(labeled)
    log_prior = np.log(np.array([doc_counts[c] / total for c in classes]))
    class_totals = term_counts.sum(axis=1, keepdims=True)
    log_likelihood = np.log((term_counts + smoothing) / (class_totals + smoothing * V))
    return NBModel(
        classes=list(classes),
        log_prior=log_prior,
        log_likelihood=log_likelihood,
        vocabulary=vocab,
        smoothing=smoothing,
        trained_on=total,
    )


def apply_boosts(
    doc: TokenizedDocument, boost_rules: list[BoostRule], target_class: str
) -> dict[str, float]:
    """Effective per-term counts for one target class: a term matched by
    any rule targeting it takes the largest matching gamma, others stay raw."""
    counts = Counter(doc.tokens)
    out = {}
    for term, raw in counts.items():
        gamma = 1.0
        for rule in boost_rules:
            if rule.target_class == target_class and rule.matches(term):
                gamma = max(gamma, rule.gamma)
        out[term] = raw * gamma
    return out


def _boosted_bag(
    doc: TokenizedDocument, boost_rules: list[BoostRule], classes: list[str]
) -> dict[str, float]:
    """Shared scoring bag: per term, the largest gamma over rules targeting
    any of the model's classes (the per-class maxima of apply_boosts)."""
    relevant = [r for r in boost_rules if r.target_class in classes]
    counts = Counter(doc.tokens)
    out = {}
    for term, raw in counts.items():
        gamma = 1.0
        for rule in relevant:
            if rule.matches(term):
                gamma = max(gamma, rule.gamma)
        out[term] = raw * gamma
    return out


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def predict(
    model: NBModel, doc: TokenizedDocument, boost_rules: list[BoostRule] | None = None
) -> Prediction:
    """Score every class against the (boost-reweighted) token bag.

    A document with no in-vocabulary tokens is flagged unclassifiable and
    falls back to the prior argmax.
    """
    boost_rules = boost_rules or []
    bag = _boosted_bag(doc, boost_rules, model.classes)
    t2i = model.vocabulary.term_to_index
    in_vocab = {t2i[term]: count for term, count in bag.items() if term in t2i}

    scores = model.log_prior.copy()
    for w, count in in_vocab.items():
        scores += count * model.log_likelihood[:, w]
    posterior = _softmax(scores)
    if in_vocab:
        label = model.classes[int(np.argmax(scores))]
        return Prediction(label=label, posterior=dict(zip(model.classes, posterior.tolist())))
    label = model.classes[int(np.argmax(model.log_prior))]
    prior = _softmax(model.log_prior.copy())
    return Prediction(
        label=label,
        posterior=dict(zip(model.classes, prior.tolist())),
        unclassifiable=True,
    )


def classify_candidates(
    candidates: list[tuple[RawDocument, TokenizedDocument, int]],
    fr_nfr_model: NBModel,
    nfr_model: NBModel,
    boost_rules: list[BoostRule],
    service_id: str,
) -> tuple[list[Requirement], list[RejectedCandidate]]:
    """Two-stage labeling of candidate documents.

    Stage one separates FR from NFR; stage two categorizes only the NFRs.
    Confidence is the stage posterior of the chosen label (the product of
    both stages for NFRs).  Candidates with no in-vocabulary tokens land in
    the rejected list instead of becoming requirements.
    """
    service_rules = [r for r in boost_rules if r.service_id == service_id]
    requirements: list[Requirement] = []
    rejected: list[RejectedCandidate] = []
    for seq, (raw_doc, tok_doc, topic_index) in enumerate(candidates, start=1):
        stage1 = predict(fr_nfr_model, tok_doc, service_rules)
        if stage1.unclassifiable:
            rejected.append(
                RejectedCandidate(doc_id=raw_doc.id, reason="no in-vocabulary tokens")
            )
            continue
        provenance = Provenance(doc_ids=(raw_doc.id,), topic_index=topic_index)
        if stage1.label == FR:
            requirement = Requirement(
                id=f"R{seq:04d}",
                text=raw_doc.text,
                kind=FR,
                nfr_category=None,
                confidence=stage1.posterior[FR],
                provenance=provenance,
                service_id=service_id,
            )
        else:
            stage2 = predict(nfr_model, tok_doc, service_rules)
            requirement = Requirement(
                id=f"R{seq:04d}",
                text=raw_doc.text,
                kind=NFR,
                nfr_category=stage2.label,
                confidence=stage1.posterior[NFR] * stage2.posterior[stage2.label],
                provenance=provenance,
                service_id=service_id,
            )
        requirement.validate()
        requirements.append(requirement)
    return requirements, rejected


def holdout_report(
    labeled: list[tuple[TokenizedDocument, str]],
    fraction: float = 0.25,
    seed: int = 42,
    smoothing: float = 1.0,
) -> dict:
    """Simple holdout metric: shuffle, hold out ``fraction``, train on the
    rest, report overall and per-class accuracy on the held-out part.

    The vocabulary comes from the training split only, so the numbers
    reflect what a fresh model would see.
    """
    if not 0.0 < fraction < 1.0:
        raise ParameterError("holdout fraction must be in (0, 1)")
    if len(labeled) < 4:
        raise TrainingError("holdout evaluation needs at least four labeled documents")
    order = list(range(len(labeled)))
    random.Random(seed).shuffle(order)
    n_test = max(1, int(len(labeled) * fraction))
    held = [labeled[i] for i in order[:n_test]]
    train = [labeled[i] for i in order[n_test:]]

    from .preprocess import build_vocabulary

    vocab = build_vocabulary([doc for doc, _ in train])
    classes = sorted({label for _, label in train})
    model = train_nb(train, vocab, smoothing=smoothing, classes=classes)

    totals = Counter(label for _, label in held)
    hits = Counter()
    unclassifiable = 0
    for doc, label in held:
        pred = predict(model, doc)
        if pred.unclassifiable:
            unclassifiable += 1
        if pred.label == label:
            hits[label] += 1
    return {
        "held_out": len(held),
        "trained_on": len(train),
        "accuracy": sum(hits.values()) / len(held),
        "per_class": {
            label: {"total": totals[label], "correct": hits[label]}
            for label in sorted(totals)
        },
        "unclassifiable": unclassifiable,
    }


def parse_label(label: str) -> tuple[str, str | None]:
    """Training labels are ``FR`` or ``NFR/<category>``."""
    if label == FR:
        return FR, None
    if label.startswith(NFR):
        rest = label[len(NFR) :]
        if rest == "":
            return NFR, None
        if rest.startswith("/"):
            category = rest[1:]
            if category in NFR_CATEGORIES:
                return NFR, category
    raise ValidationError(f"bad training label {label!r}")


def load_training_file(path=None) -> list[tuple[str, str]]:
    """Labeled sentences as (text, label) pairs; the shipped fixture set
    is used when no path is given."""
    if path is None:
        text = resources.files("retta.data").joinpath("training_labeled.jsonl").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        parse_label(obj["label"])  # validate early
        out.append((obj["text"], obj["label"]))
    return out
