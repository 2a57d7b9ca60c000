"""Apriori association-rule mining over per-document term sets.

Transactions use set semantics (distinct stemmed terms of one document,
within-document frequency ignored).  Mining is the classic level-wise
algorithm: frequent itemsets grow one item at a time, candidates are
pruned by downward closure, and rules come from every frequent itemset of
size two or more.  Output ordering is fixed so runs are reproducible
regardless of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import EmptyInputError, ParameterError


@dataclass(frozen=True)
class Transaction:
    doc_id: str
    items: frozenset[str]


@dataclass(frozen=True)
class AssociationRule:
    antecedent: frozenset[str]
    consequent: frozenset[str]
    support: float
    confidence: float
    lift: float

    def sort_key(self):
        return (
            -self.confidence,
            -self.support,
            tuple(sorted(self.antecedent)),
            tuple(sorted(self.consequent)),
        )

    def format_line(self) -> str:
        """Fixed export format: antecedent TAB consequent TAB metrics,
        terms comma-joined sorted, metrics at six decimals."""
        return "\t".join(
            [
                ",".join(sorted(self.antecedent)),
                ",".join(sorted(self.consequent)),
                f"{self.support:.6f}",
                f"{self.confidence:.6f}",
                f"{self.lift:.6f}",
            ]
        )


def _frequent_itemsets(
    transactions: list[frozenset[str]], min_support: float, max_size: int
) -> dict[frozenset[str], float]:
    n = len(transactions)

    def support(itemset) -> float:
        return sum(1 for t in transactions if itemset <= t) / n

    frequent = {}
    items = sorted({item for t in transactions for item in t})
    level = []
    for item in items:
        s = support(frozenset([item]))
        if s >= min_support:
            fs = frozenset([item])
            frequent[fs] = s
            level.append(tuple([item]))

    size = 1
    while level and size < max_size:
        size += 1
        candidates = set()
        # join step: combine itemsets sharing a (size-2)-prefix
        for a, b in combinations(level, 2):
            if a[:-1] == b[:-1]:
                cand = tuple(sorted(set(a) | set(b)))
                if len(cand) == size:
                    candidates.add(cand)
        next_level = []
        for cand in sorted(candidates):
            cand_set = frozenset(cand)
            # downward closure: all (size-1)-subsets must already be frequent
            if any(frozenset(sub) not in frequent for sub in combinations(cand, size - 1)):
                continue
            s = support(cand_set)
            if s >= min_support:
                frequent[cand_set] = s
                next_level.append(cand)
        level = next_level
    return frequent


def mine_rules(
    transactions: list[Transaction],
    min_support: float = 0.05,
    min_confidence: float = 0.6,
    max_itemset_size: int = 4,
) -> list[AssociationRule]:
    """Mine rules meeting the support and confidence thresholds.

    Sorted by confidence descending, then support descending, then
    lexicographically by antecedent and consequent.
    """
    if not transactions:
        raise EmptyInputError("no transactions to mine")
    if not 0.0 < min_support <= 1.0:
        raise ParameterError("min_support must be in (0, 1]")
    if not 0.0 < min_confidence <= 1.0:
        raise ParameterError("min_confidence must be in (0, 1]")
    if max_itemset_size < 1:
        raise ParameterError("max_itemset_size must be >= 1")

    sets = [t.items for t in transactions]
    frequent = _frequent_itemsets(sets, min_support, max_itemset_size)

    rules = []
    for itemset, supp in frequent.items():
        if len(itemset) < 2:
            continue
        for r in range(1, len(itemset)):
            for antecedent in combinations(sorted(itemset), r):
                a = frozenset(antecedent)
                c = itemset - a
                confidence = supp / frequent[a]
                if confidence < min_confidence:
                    continue
                # C is a subset of a frequent itemset, hence frequent itself
                supp_c = frequent[c]
                rules.append(
                    AssociationRule(
                        antecedent=a,
                        consequent=c,
                        support=supp,
                        confidence=confidence,
                        lift=confidence / supp_c,
                    )
                )
    rules.sort(key=AssociationRule.sort_key)
    return rules


def expand_terms(rules: list[AssociationRule], seed_terms: set[str]) -> set[str]:
    """One expansion step: add consequents of rules whose antecedent is
    already covered by the seeds.  Not a transitive closure."""
    seeds = set(seed_terms)
    out = set(seeds)
    for rule in rules:
        if rule.antecedent <= seeds:
            out |= rule.consequent
    return out
