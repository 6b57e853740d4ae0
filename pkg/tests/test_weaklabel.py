import numpy as np
import pytest

from skillrank.corpus import TitleRecord, generate_synthetic_corpus
from skillrank.embedding import (
    EmbeddingStore,
    NeighborhoodConfig,
    build_fallback_store,
    cosine_similarity,
    find_similar,
)
from skillrank.rng import Xorshift64Star
from skillrank.weaklabel import (
    WeakLabelError,
    build_weak_labels,
    load_weak_labels,
    relative_skill_frequencies,
    save_weak_labels,
)


def rec(title, *skills):
    return TitleRecord(title, frozenset(skills))


class TestRelativeSkillFrequencies:
    def test_two_titles(self):
        freqs = relative_skill_frequencies([rec("a", "python", "sql"),
                                            rec("b", "python")])
        assert freqs == {"python": 1.0, "sql": 0.5}

    def test_singleton(self):
        assert relative_skill_frequencies([rec("a", "therapy")]) == {"therapy": 1.0}

    def test_quarter(self):
        records = [rec("a", "common", "rare"), rec("b", "common"),
                   rec("c", "common"), rec("d", "common")]
        freqs = relative_skill_frequencies(records)
        assert freqs["common"] == 1.0
        assert freqs["rare"] == 0.25

    def test_empty_neighborhood(self):
        with pytest.raises(WeakLabelError):
            relative_skill_frequencies([])


def _store(vectors):
    dim = len(next(iter(vectors.values())))
    return EmbeddingStore(dim, "test", {k: np.array(v, dtype=float)
                                        for k, v in vectors.items()})


class TestBuildWeakLabels:
    def test_single_title_self_labels(self):
        train = [rec("a", "x", "y")]
        labels = build_weak_labels(train, _store({"a": [1, 0]}))
        assert labels.labels == {"a": {"x": 1.0, "y": 1.0}}

    def test_identical_vectors_share_labels(self):
        train = [rec("a", "x"), rec("b", "y")]
        store = _store({"a": [1, 0], "b": [1, 0]})
        labels = build_weak_labels(train, store)
        assert labels.labels["a"] == {"x": 0.5, "y": 0.5}
        assert labels.labels["b"] == {"x": 0.5, "y": 0.5}

    def test_orthogonal_vectors_keep_own_skills(self):
        train = [rec("a", "x"), rec("b", "y"), rec("c", "z", "w")]
        store = _store({"a": [1, 0, 0], "b": [0, 1, 0], "c": [0, 0, 1]})
        labels = build_weak_labels(train, store)
        assert labels.labels == {"a": {"x": 1.0}, "b": {"y": 1.0},
                                 "c": {"z": 1.0, "w": 1.0}}

    def test_missing_embedding_names_title(self):
        with pytest.raises(WeakLabelError, match="ghost"):
            build_weak_labels([rec("ghost", "x")], _store({"other": [1, 0]}))

    def test_permutation_invariant(self):
        records = generate_synthetic_corpus(4, 5, 30, seed=11)
        store = build_fallback_store(r.title for r in records)
        forward_order = build_weak_labels(records, store)
        backward_order = build_weak_labels(list(reversed(records)), store)
        assert forward_order.labels == backward_order.labels


def brute_force_labels(train, store, threshold):
    """Independent O(n^2 k) recomputation, no shared code with the pipeline."""
    out = {}
    for anchor in train:
        members = []
        for other in train:
            sim = cosine_similarity(store.vector(anchor.title),
                                    store.vector(other.title))
            if sim >= threshold:
                members.append(other)
        freqs = {}
        for member in members:
            for skill in member.skills:
                freqs[skill] = freqs.get(skill, 0) + 1
        out[anchor.title] = {s: c / len(members) for s, c in freqs.items()}
    return out


class TestOracleEquivalence:
    @pytest.mark.parametrize("seed,families,synonyms", [
        (1, 3, 4), (2, 5, 5), (3, 10, 5), (4, 7, 7), (5, 2, 9),
    ])
    def test_matches_brute_force(self, seed, families, synonyms):
        records = generate_synthetic_corpus(families, synonyms, 25, seed=seed)
        assert len(records) <= 50
        store = build_fallback_store(r.title for r in records)
        config = NeighborhoodConfig(0.75)
        labels = build_weak_labels(records, store, config)
        expected = brute_force_labels(records, store, 0.75)
        assert labels.labels == expected

    def test_label_range_and_self_skill_floor(self):
        records = generate_synthetic_corpus(5, 8, 40, seed=9)
        store = build_fallback_store(r.title for r in records)
        labels = build_weak_labels(records, store)
        by_title = {r.title: r for r in records}
        titles = [r.title for r in records]
        for title, sparse in labels.labels.items():
            assert sparse
            neighborhood_size = len(find_similar(title, store, titles))
            for value in sparse.values():
                assert 0.0 < value <= 1.0
            for own_skill in by_title[title].skills:
                assert sparse[own_skill] >= 1.0 / neighborhood_size


class TestWeakLabelIO:
    def test_round_trip(self, tmp_path):
        records = generate_synthetic_corpus(3, 3, 20, seed=2)
        store = build_fallback_store(r.title for r in records)
        labels = build_weak_labels(records, store)
        p = tmp_path / "labels.jsonl"
        save_weak_labels(labels, p)
        loaded = load_weak_labels(p)
        assert loaded.labels == labels.labels
        assert loaded.threshold == labels.threshold
        assert loaded.provider == labels.provider
