"""Weak supervision targets: for each training title, the relative frequency
of every skill across its cosine neighborhood of similar titles.

Weak-label file (line-delimited JSON):
line 1:  {"type":"header","threshold":0.75,"provider":"<label>"}
then:    {"type":"labels","id":"<title>","skills":{"<skill>":value,...}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .corpus import TitleRecord
from .embedding import EmbeddingStore, NeighborhoodConfig, find_similar


class WeakLabelError(Exception):
    pass


@dataclass
class WeakLabelSet:
    labels: dict[str, dict[str, float]]
    threshold: float
    provider: str

    def skill_vocabulary(self) -> list[str]:
        skills = set()
        for sparse in self.labels.values():
            skills.update(sparse)
        return sorted(skills)


def relative_skill_frequencies(
    neighborhood: Sequence[TitleRecord],
) -> dict[str, float]:
    """For each skill, the fraction of neighborhood titles carrying it.
    Only skills with a positive count appear, so every value is in (0,1]."""
    if not neighborhood:
        raise WeakLabelError("neighborhood is empty")
    counts: dict[str, int] = {}
    for record in neighborhood:
        for skill in record.skills:
            counts[skill] = counts.get(skill, 0) + 1
    size = len(neighborhood)
    return {skill: count / size for skill, count in counts.items()}


def build_weak_labels(
    train: Sequence[TitleRecord],
    store: EmbeddingStore,
    config: NeighborhoodConfig = NeighborhoodConfig(),
) -> WeakLabelSet:
    """Each training title's targets are the
    relative skill frequencies over its similar-title neighborhood within
    the training set (the anchor always includes itself)."""
    by_title = {r.title: r for r in train}
    for record in train:
        if record.title not in store:
            raise WeakLabelError(f"no embedding for training title {record.title!r}")
    train_titles = [r.title for r in train]
    labels: dict[str, dict[str, float]] = {}
    for record in train:
        neighbors = find_similar(record.title, store, train_titles, config)
        neighborhood = [by_title[t] for t in sorted(neighbors)]
        labels[record.title] = relative_skill_frequencies(neighborhood)
    return WeakLabelSet(labels=labels, threshold=config.threshold,
                        provider=store.provider)


def save_weak_labels(label_set: WeakLabelSet, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps({
            "type": "header",
            "threshold": label_set.threshold,
            "provider": label_set.provider,
        }) + "\n")
        for title in label_set.labels:
            sparse = label_set.labels[title]
            f.write(json.dumps({
                "type": "labels",
                "id": title,
                "skills": {s: sparse[s] for s in sorted(sparse)},
            }) + "\n")


def load_weak_labels(path) -> WeakLabelSet:
    with open(path, "r", encoding="utf-8") as f:
        header_line = f.readline()
        if not header_line.strip():
            raise WeakLabelError("weak-label file is empty")
        header = json.loads(header_line)
        if header.get("type") != "header":
            raise WeakLabelError("first line must be the header object")
        labels: dict[str, dict[str, float]] = {}
        for line_no, line in enumerate(f, start=2):
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("type") != "labels":
                raise WeakLabelError(f"line {line_no}: expected a labels record")
            if obj["id"] in labels:
                raise WeakLabelError(f"duplicate title id {obj['id']!r}")
            labels[obj["id"]] = {str(k): float(v) for k, v in obj["skills"].items()}
    return WeakLabelSet(labels=labels, threshold=float(header["threshold"]),
                        provider=str(header.get("provider", "")))
