"""Deterministic skill ranking and Mean Average Precision at k."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .corpus import TitleRecord

DEFAULT_K = 20


class EvalError(Exception):
    pass


@dataclass
class RankedSkillList:
    """Skills in descending score order; ties broken by skill id ascending."""

    entries: list[tuple[str, float]]

    def skills(self) -> list[str]:
        return [s for s, _ in self.entries]


@dataclass
class EvalReport:
    k: int
    per_title_ap: dict[str, float]
    mean_ap: float

    def to_json(self) -> str:
        return json.dumps({
            "k": self.k,
            "mean_ap": self.mean_ap,
            "per_title": self.per_title_ap,
        })


def rank_skills(scores: np.ndarray, skill_order: Sequence[str],
                top_k: int) -> RankedSkillList:
    """Top `top_k` skills by descending score. `skill_order` must be sorted
    ascending, so a stable sort on negated scores yields the id tie-break."""
    if top_k < 1:
        raise EvalError(f"top_k must be >= 1, got {top_k}")
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (len(skill_order),):
        raise EvalError("scores are not aligned to skill_order")
    order = np.argsort(-scores, kind="stable")[:top_k]
    return RankedSkillList(
        entries=[(skill_order[i], float(scores[i])) for i in order]
    )


def average_precision_at_k(ranked: RankedSkillList, relevant: set[str],
                           k: int) -> float:
    """AP@k with denominator min(|relevant|, k), so a perfect ranking scores
    1.0 even when a title has more annotated skills than k."""
    if not relevant:
        raise EvalError("relevant set is empty")
    if k < 1:
        raise EvalError(f"k must be >= 1, got {k}")
    hits = 0
    total = 0.0
    for i, skill in enumerate(ranked.skills()[:k], start=1):
        if skill in relevant:
            hits += 1
            total += hits / i
    return total / min(len(relevant), k)


def mean_average_precision(
    test: Sequence[TitleRecord],
    predictor: Callable[[TitleRecord], RankedSkillList],
    k: int = DEFAULT_K,
) -> EvalReport:
    """Unweighted mean of per-title AP@k with the title's annotated skills as
    the relevant set."""
    if not test:
        raise EvalError("test set is empty")
    per_title: dict[str, float] = {}
    for record in test:
        try:
            ranked = predictor(record)
        except Exception as e:
            raise EvalError(f"predictor failed for title {record.title!r}: {e}") from e
        per_title[record.title] = average_precision_at_k(ranked, set(record.skills), k)
    mean_ap = sum(per_title.values()) / len(per_title)
    return EvalReport(k=k, per_title_ap=per_title, mean_ap=mean_ap)
