from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retta.errors import EmptyInputError, ParameterError
from retta.rules import AssociationRule, Transaction, expand_terms, mine_rules


def tr(doc_id, *items):
    return Transaction(doc_id=doc_id, items=frozenset(items))


def brute_force(transactions, min_support, min_confidence, max_size):
    """Exhaustive enumeration over every itemset and split; no pruning."""
    sets = [t.items for t in transactions]
    n = len(sets)
    items = sorted({i for s in sets for i in s})

    def support(itemset):
        return sum(1 for s in sets if itemset <= s) / n

    rules = set()
    for size in range(2, min(len(items), max_size) + 1):
        for combo in combinations(items, size):
            whole = frozenset(combo)
            supp = support(whole)
            if supp < min_support:
                continue
            for r in range(1, size):
                for ante in combinations(combo, r):
                    a = frozenset(ante)
                    c = whole - a
                    conf = supp / support(a)
                    if conf >= min_confidence:
                        rules.add((a, c, supp, conf, conf / support(c)))
    return rules


class TestMineRules:
    def test_worked_example(self):
        transactions = [tr("1", "A", "B"), tr("2", "A", "B"), tr("3", "A", "C")]
        rules = mine_rules(transactions, min_support=0.6, min_confidence=0.9)
        assert len(rules) == 1
        rule = rules[0]
        assert rule.antecedent == {"B"} and rule.consequent == {"A"}
        assert rule.support == pytest.approx(2 / 3)
        assert rule.confidence == pytest.approx(1.0)
        assert rule.lift == pytest.approx(1.0)

    def test_impossible_support_threshold(self):
        transactions = [tr("1", "A"), tr("2", "B")]
        assert mine_rules(transactions, min_support=1.0, min_confidence=0.5) == []

    def test_single_transaction_single_item(self):
        assert mine_rules([tr("1", "A")], min_support=0.1, min_confidence=0.1) == []

    def test_empty_transactions_error(self):
        with pytest.raises(EmptyInputError):
            mine_rules([])

    def test_threshold_range_errors(self):
        ts = [tr("1", "A")]
        with pytest.raises(ParameterError):
            mine_rules(ts, min_support=0.0)
        with pytest.raises(ParameterError):
            mine_rules(ts, min_support=1.5)
        with pytest.raises(ParameterError):
            mine_rules(ts, min_confidence=0.0)
        with pytest.raises(ParameterError):
            mine_rules(ts, max_itemset_size=0)

    def test_max_itemset_size_caps_rules(self):
        transactions = [tr(str(i), "A", "B", "C") for i in range(4)]
        capped = mine_rules(transactions, min_support=0.5, min_confidence=0.5,
                            max_itemset_size=2)
        assert all(len(r.antecedent | r.consequent) <= 2 for r in capped)

    def test_output_ordering(self):
        transactions = [
            tr("1", "A", "B"),
            tr("2", "A", "B"),
            tr("3", "A", "C"),
            tr("4", "C"),
        ]
        rules = mine_rules(transactions, min_support=0.25, min_confidence=0.5)
        keys = [r.sort_key() for r in rules]
        assert keys == sorted(keys)

    def test_export_line_format(self):
        rule = AssociationRule(
            antecedent=frozenset({"signal", "light"}),
            consequent=frozenset({"stuck"}),
            support=2 / 3,
            confidence=1.0,
            lift=1.5,
        )
        assert rule.format_line() == "light,signal\tstuck\t0.666667\t1.000000\t1.500000"


@st.composite
def transaction_sets(draw):
    n_items = draw(st.integers(2, 12))
    items = [chr(ord("a") + i) for i in range(n_items)]
    n_tr = draw(st.integers(1, 30))
    transactions = []
    for i in range(n_tr):
        size = draw(st.integers(1, min(6, n_items)))
        chosen = draw(st.permutations(items))[:size]
        transactions.append(tr(str(i), *chosen))
    min_support = draw(st.sampled_from([0.05, 0.1, 0.25, 0.5]))
    min_confidence = draw(st.sampled_from([0.3, 0.6, 0.9]))
    return transactions, min_support, min_confidence


class TestOracleEquivalence:
    @given(transaction_sets())
    @settings(max_examples=60, deadline=None)
    def test_matches_brute_force(self, case):
        transactions, min_support, min_confidence = case
        mined = mine_rules(transactions, min_support, min_confidence, max_itemset_size=4)
        expected = brute_force(transactions, min_support, min_confidence, max_size=4)
        got = {(r.antecedent, r.consequent): r for r in mined}
        assert set(got) == {(a, c) for a, c, *_ in expected}
        for a, c, supp, conf, lift in expected:
            rule = got[(a, c)]
            assert abs(rule.support - supp) < 1e-12
            assert abs(rule.confidence - conf) < 1e-12
            assert abs(rule.lift - lift) < 1e-12


class TestProperties:
    @given(transaction_sets())
    @settings(max_examples=40, deadline=None)
    def test_downward_closure(self, case):
        transactions, min_support, min_confidence = case
        mined = mine_rules(transactions, min_support, min_confidence, max_itemset_size=4)
        sets = [t.items for t in transactions]
        n = len(sets)
        for rule in mined:
            whole = rule.antecedent | rule.consequent
            for size in range(1, len(whole)):
                for sub in combinations(sorted(whole), size):
                    support = sum(1 for s in sets if frozenset(sub) <= s) / n
                    assert support >= min_support

    @given(transaction_sets(), st.sampled_from([0.05, 0.1]), st.sampled_from([0.1, 0.2]))
    @settings(max_examples=40, deadline=None)
    def test_raising_thresholds_never_adds_rules(self, case, ds, dc):
        transactions, min_support, min_confidence = case
        lo = mine_rules(transactions, min_support, min_confidence, 4)
        hi = mine_rules(
            transactions,
            min(1.0, min_support + ds),
            min(1.0, min_confidence + dc),
            4,
        )
        lo_ids = {(r.antecedent, r.consequent) for r in lo}
        hi_ids = {(r.antecedent, r.consequent) for r in hi}
        assert hi_ids <= lo_ids


class TestExpandTerms:
    RULES = [
        AssociationRule(
            antecedent=frozenset({"signal"}),
            consequent=frozenset({"light"}),
            support=0.5,
            confidence=0.9,
            lift=1.2,
        ),
        AssociationRule(
            antecedent=frozenset({"light"}),
            consequent=frozenset({"pole"}),
            support=0.4,
            confidence=0.8,
            lift=1.1,
        ),
    ]

    def test_single_step_expansion(self):
        out = expand_terms(self.RULES[:1], {"signal"})
        assert out == {"signal", "light"}

    def test_no_rules_identity(self):
        assert expand_terms([], {"signal"}) == {"signal"}

    def test_uncovered_antecedent_skipped(self):
        out = expand_terms(self.RULES, {"nothing"})
        assert out == {"nothing"}

    def test_not_transitive(self):
        # signal -> light fires, but light -> pole must not chain in one step
        out = expand_terms(self.RULES, {"signal"})
        assert out == {"signal", "light"}

    def test_multi_item_antecedent_requires_full_coverage(self):
        rule = AssociationRule(
            antecedent=frozenset({"a", "b"}),
            consequent=frozenset({"c"}),
            support=0.5,
            confidence=0.9,
            lift=1.0,
        )
        assert expand_terms([rule], {"a"}) == {"a"}
        assert expand_terms([rule], {"a", "b"}) == {"a", "b", "c"}
