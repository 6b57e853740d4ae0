"""Glue for inference: normalize a title, embed it, run the head, optionally
IDF-boost, and rank. Shared by the CLI and the HTTP service."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import normalize_title
from .embedding import EmbeddingStore, fallback_embed
from .idf import IdfTable, boost_scores
from .model import LinearHead, forward
from .rankeval import RankedSkillList, rank_skills


@dataclass
class SkillRanker:
    head: LinearHead
    idf_table: IdfTable | None = None
    store: EmbeddingStore | None = None

    def embed(self, title: str) -> np.ndarray:
        """Use the store vector when the title is known, otherwise embed on
        the fly with the fallback embedder at the head's dimension."""
        if self.store is not None and title in self.store:
            return self.store.vector(title)
        return fallback_embed(title, self.head.dimension)

    def scores(self, title: str, use_idf: bool = True) -> np.ndarray:
        importance = forward(self.head, self.embed(title))
        if use_idf:
            if self.idf_table is None:
                raise ValueError("IDF boosting requested but no IDF table loaded")
            return boost_scores(importance, self.head.skill_order, self.idf_table)
        return importance

    def rank(self, raw_title: str, top_k: int,
             use_idf: bool = True) -> tuple[str, RankedSkillList]:
        title = normalize_title(raw_title)
        ranked = rank_skills(self.scores(title, use_idf),
                             self.head.skill_order, top_k)
        return title, ranked
