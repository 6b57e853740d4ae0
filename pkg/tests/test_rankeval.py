import itertools
import json

import numpy as np
import pytest

from skillrank.corpus import TitleRecord
from skillrank.rankeval import (
    EvalError,
    RankedSkillList,
    average_precision_at_k,
    mean_average_precision,
    rank_skills,
)


def ranked(*skills):
    return RankedSkillList([(s, 0.0) for s in skills])


class TestRankSkills:
    def test_descending(self):
        out = rank_skills(np.array([0.2, 0.9]), ["a", "b"], 2)
        assert out.skills() == ["b", "a"]

    def test_tie_break_by_id(self):
        out = rank_skills(np.array([0.5, 0.5]), ["a", "b"], 1)
        assert out.skills() == ["a"]

    def test_uniform_scores_are_pure_tie_break(self):
        out = rank_skills(np.array([0.5, 0.5, 0.5]), ["a", "b", "c"], 3)
        assert out.skills() == ["a", "b", "c"]

    def test_permutation_prefix(self):
        rng = np.random.default_rng(4)
        skills = sorted(f"s{i:02d}" for i in range(30))
        for top_k in (1, 5, 30, 40):
            out = rank_skills(rng.uniform(size=30), skills, top_k)
            got = out.skills()
            assert len(got) == min(top_k, 30)
            assert len(set(got)) == len(got)
            scores = [s for _, s in out.entries]
            assert scores == sorted(scores, reverse=True)

    def test_bad_top_k(self):
        with pytest.raises(EvalError):
            rank_skills(np.array([0.5]), ["a"], 0)


def oracle_ap(ranking, relevant, k):
    """Straightforward independent AP@k: precision at each relevant hit."""
    precisions = []
    hits = 0
    for i, item in enumerate(ranking[:k]):
        if item in relevant:
            hits += 1
            precisions.append(hits / (i + 1))
    return sum(precisions) / min(len(relevant), k)


class TestAveragePrecision:
    def test_perfect(self):
        assert average_precision_at_k(ranked("b", "a"), {"a", "b"}, 20) == 1.0

    def test_no_hits(self):
        assert average_precision_at_k(ranked("x", "y"), {"a"}, 20) == 0.0

    def test_worked_example(self):
        ap = average_precision_at_k(ranked("s1", "s2", "s3"), {"s1", "s3"}, 20)
        assert ap == pytest.approx((1 / 2) * (1 / 1 + 2 / 3), abs=1e-12)
        assert ap == pytest.approx(0.8333, abs=1e-4)

    def test_empty_relevant(self):
        with pytest.raises(EvalError):
            average_precision_at_k(ranked("a"), set(), 5)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_exhaustive_oracle_small(self, n):
        items = [f"s{i}" for i in range(n)]
        for perm in itertools.permutations(items):
            for m in range(1, n + 1):
                for rel in itertools.combinations(items, m):
                    for k in range(1, 7):
                        got = average_precision_at_k(ranked(*perm), set(rel), k)
                        assert got == pytest.approx(oracle_ap(perm, set(rel), k),
                                                    abs=1e-12)

    def test_exhaustive_oracle_six_items(self):
        items = [f"s{i}" for i in range(6)]
        for perm in itertools.permutations(items):
            for m in (1, 2, 3, 4, 5, 6):
                rel = set(items[:m])
                for k in range(1, 7):
                    got = average_precision_at_k(ranked(*perm), rel, k)
                    assert got == pytest.approx(oracle_ap(perm, rel, k), abs=1e-12)

    def test_perfect_iff_top_positions_relevant(self):
        items = [f"s{i}" for i in range(5)]
        rel = {"s0", "s1"}
        for perm in itertools.permutations(items):
            ap = average_precision_at_k(ranked(*perm), rel, 3)
            top = set(perm[: min(len(rel), 3)])
            assert (ap == 1.0) == (top == rel)

    def test_swap_relevant_upward_never_decreases(self):
        rng = np.random.default_rng(7)
        items = [f"s{i}" for i in range(8)]
        rel = {"s0", "s3", "s5"}
        for _ in range(50):
            perm = list(rng.permutation(items))
            positions = [i for i, s in enumerate(perm)
                         if s in rel and i > 0 and perm[i - 1] not in rel]
            if not positions:
                continue
            i = positions[0]
            before = average_precision_at_k(ranked(*perm), rel, 8)
            perm[i - 1], perm[i] = perm[i], perm[i - 1]
            after = average_precision_at_k(ranked(*perm), rel, 8)
            assert after >= before


class TestMeanAveragePrecision:
    def test_single_perfect_title(self):
        test = [TitleRecord("t", frozenset({"a", "b"}))]
        report = mean_average_precision(test, lambda r: ranked("a", "b"), 20)
        assert report.mean_ap == 1.0

    def test_mean_of_extremes(self):
        test = [TitleRecord("good", frozenset({"a"})),
                TitleRecord("bad", frozenset({"z"}))]
        report = mean_average_precision(test, lambda r: ranked("a", "b"), 20)
        assert report.per_title_ap == {"good": 1.0, "bad": 0.0}
        assert report.mean_ap == 0.5

    def test_dual_implementation_agreement(self):
        rng = np.random.default_rng(11)
        skills = sorted(f"s{i:02d}" for i in range(25))
        test = []
        predictions = {}
        for i in range(15):
            rel = frozenset(rng.choice(skills, size=rng.integers(1, 8),
                                       replace=False))
            title = f"title {i}"
            test.append(TitleRecord(title, rel))
            predictions[title] = rank_skills(rng.uniform(size=25), skills, 20)
        report = mean_average_precision(test, lambda r: predictions[r.title], 20)
        expected = np.mean([oracle_ap(predictions[r.title].skills(),
                                      set(r.skills), 20) for r in test])
        assert report.mean_ap == pytest.approx(expected, abs=1e-12)

    def test_predictor_error_has_title_context(self):
        test = [TitleRecord("boom", frozenset({"a"}))]

        def bad(record):
            raise RuntimeError("nope")

        with pytest.raises(EvalError, match="boom"):
            mean_average_precision(test, bad, 20)

    def test_empty_test_set(self):
        with pytest.raises(EvalError):
            mean_average_precision([], lambda r: ranked("a"), 20)

    def test_report_json(self):
        test = [TitleRecord("t", frozenset({"a"}))]
        report = mean_average_precision(test, lambda r: ranked("a"), 20)
        obj = json.loads(report.to_json())
        assert obj == {"k": 20, "mean_ap": 1.0, "per_title": {"t": 1.0}}
