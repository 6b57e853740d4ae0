"""Inverse document frequency over training titles and score boosting.

idf_s = log(N / f_s) with N the number of training titles and f_s the
number of titles carrying skill s; a skill present everywhere gets idf 0
and is therefore suppressed entirely after boosting.

IDF file (line-delimited JSON):
line 1:  {"type":"header","n_titles":N,"log_base":"e"}
then:    {"type":"idf","skill":"<id>","f":f_s,"idf":value}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import TitleRecord


class IdfError(Exception):
    pass


@dataclass
class IdfTable:
    n_titles: int
    doc_freq: dict[str, int]
    idf: dict[str, float]
    log_base: float | str = "e"  # "e" or a numeric base

    def idf_for(self, skill: str, fallback: float = 0.0) -> float:
        return self.idf.get(skill, fallback)


def _log(x: float, base: float | str) -> float:
    if base == "e":
        return math.log(x)
    return math.log(x) / math.log(float(base))


def compute_idf(train: Sequence[TitleRecord], log_base: float | str = "e",
                smoothing: bool = False) -> IdfTable:
    """Count f_s by direct scan over training titles. With `smoothing`,
    counts become f_s + 1 (and N becomes N + 1) so no skill reaches idf 0."""
    if not train:
        raise IdfError("cannot compute IDF over an empty training set")
    counts: dict[str, int] = {}
    for record in train:
        for skill in record.skills:
            counts[skill] = counts.get(skill, 0) + 1
    n = len(train)
    if smoothing:
        idf = {s: _log((n + 1) / (f + 1), log_base) for s, f in counts.items()}
    else:
        idf = {s: _log(n / f, log_base) for s, f in counts.items()}
    return IdfTable(n_titles=n, doc_freq=counts, idf=idf, log_base=log_base)


def boost_scores(importance: np.ndarray, skill_order: Sequence[str],
                 table: IdfTable, fallback_idf: float = 0.0) -> np.ndarray:
    """Final ranking key: model importance times the skill's IDF. Skills the
    table has never seen get `fallback_idf` (default 0: suppressed, since the
    model cannot have learned them)."""
    importance = np.asarray(importance, dtype=np.float64)
    if importance.shape != (len(skill_order),):
        raise IdfError("importance vector is not aligned to skill_order")
    factors = np.array([table.idf_for(s, fallback_idf) for s in skill_order])
    return importance * factors


def save_idf(table: IdfTable, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps({
            "type": "header",
            "n_titles": table.n_titles,
            "log_base": table.log_base,
        }) + "\n")
        for skill in sorted(table.idf):
            f.write(json.dumps({
                "type": "idf",
                "skill": skill,
                "f": table.doc_freq[skill],
                "idf": table.idf[skill],
            }) + "\n")


def load_idf(path) -> IdfTable:
    with open(path, "r", encoding="utf-8") as f:
        header_line = f.readline()
        if not header_line.strip():
            raise IdfError("IDF file is empty")
        header = json.loads(header_line)
        if header.get("type") != "header":
            raise IdfError("first line must be the header object")
        doc_freq: dict[str, int] = {}
        idf: dict[str, float] = {}
        for line_no, line in enumerate(f, start=2):
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("type") != "idf":
                raise IdfError(f"line {line_no}: expected an idf record")
            skill = obj["skill"]
            if skill in idf:
                raise IdfError(f"duplicate skill {skill!r}")
            doc_freq[skill] = int(obj["f"])
            idf[skill] = float(obj["idf"])
    return IdfTable(n_titles=int(header["n_titles"]), doc_freq=doc_freq,
                    idf=idf, log_base=header.get("log_base", "e"))
