"""Corpus handling: title normalization, parsing, dedup, splits, synthetic data.

Corpus files are line-delimited JSON, one record per line:
``{"title": "...", "skills": ["...", ...], "lang": "en"}`` (``lang`` optional).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .rng import Xorshift64Star


class CorpusError(Exception):
    pass


class EmptyTitleError(CorpusError):
    pass


class ParseError(CorpusError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class TitleRecord:
    """A normalized job title with its associated skill set."""

    title: str
    skills: frozenset[str]
    lang: str | None = None

    def __post_init__(self):
        if not self.skills:
            raise CorpusError(f"record {self.title!r} has no skills")


@dataclass
class ParseResult:
    records: list[TitleRecord]
    rejected_empty_skills: int = 0
    merged_duplicates: int = 0


@dataclass
class DatasetSplit:
    train: list[TitleRecord]
    dev: list[TitleRecord]
    test: list[TitleRecord]
    seed: int


def normalize_title(raw: str) -> str:
    """Lowercase; keep letters, digits, '+' and '#'; everything else becomes
    a space; collapse runs of spaces. Keeps "c++" and "c#" intact.
    """
    cleaned = "".join(
        c if (c.isalnum() or c in "+#") else " " for c in raw.lower()
    )
    normalized = " ".join(cleaned.split())
    if not normalized:
        raise EmptyTitleError(f"title {raw!r} is empty after normalization")
    return normalized


def normalize_skill(raw: str) -> str:
    return raw.strip().lower()


def parse_corpus(lines: Iterable[str]) -> ParseResult:
    """Parse a corpus stream; duplicate normalized titles merge by skill union.

    Records whose skill list is empty (or empties out after cleaning) are
    dropped and counted, not raised: real-world postings are dirty.
    """
    by_title: dict[str, set[str]] = {}
    langs: dict[str, str | None] = {}
    order: list[str] = []
    rejected = 0
    merged = 0

    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(line_no, f"invalid JSON: {e}") from e
        if not isinstance(obj, dict) or "title" not in obj or "skills" not in obj:
            raise ParseError(line_no, "record needs 'title' and 'skills' fields")
        if not isinstance(obj["skills"], list):
            raise ParseError(line_no, "'skills' must be an array")
        try:
            title = normalize_title(str(obj["title"]))
        except EmptyTitleError as e:
            raise ParseError(line_no, str(e)) from e
        skills = {normalize_skill(str(s)) for s in obj["skills"]}
        skills.discard("")
        if not skills:
            rejected += 1
            continue
        if title in by_title:
            by_title[title] |= skills
            merged += 1
        else:
            by_title[title] = skills
            langs[title] = obj.get("lang")
            order.append(title)

    records = [
        TitleRecord(title=t, skills=frozenset(by_title[t]), lang=langs[t])
        for t in order
    ]
    return ParseResult(records, rejected_empty_skills=rejected, merged_duplicates=merged)


def split_dataset(records: Sequence[TitleRecord], seed: int) -> DatasetSplit:
    """Deterministic 70:10:20 split: Fisher-Yates shuffle under `seed`, then
    contiguous cuts of floor(0.7 n) and floor(0.1 n)."""
    if not records:
        raise CorpusError("cannot split an empty corpus")
    shuffled = list(records)
    Xorshift64Star(seed).shuffle(shuffled)
    n = len(shuffled)
    n_train = (7 * n) // 10
    n_dev = n // 10
    return DatasetSplit(
        train=shuffled[:n_train],
        dev=shuffled[n_train : n_train + n_dev],
        test=shuffled[n_train + n_dev :],
        seed=seed,
    )


_ROLE_WORDS = [
    "developer", "engineer", "analyst", "manager", "consultant", "specialist",
    "designer", "architect", "technician", "administrator", "coordinator",
    "scientist", "assistant", "advisor", "auditor", "planner", "operator",
    "researcher", "strategist", "therapist",
]

_DOMAIN_WORDS = [
    "python", "frontend", "backend", "database", "network", "security",
    "cloud", "mobile", "payroll", "logistics", "marketing", "finance",
    "insurance", "retail", "healthcare", "energy", "automotive", "aerospace",
    "biotech", "robotics", "gaming", "media", "legal", "housing", "textile",
    "maritime", "railway", "mining", "forestry", "culinary",
]

_MODIFIERS = [
    "senior", "junior", "lead", "principal", "staff", "associate",
    "chief", "head", "expert", "trainee", "graduate", "freelance",
    "contract", "regional", "global",
]

DEFAULT_GENERIC_SKILLS = ("communication skills", "teamwork", "excel")


def generate_synthetic_corpus(
    families: int,
    synonyms_per_family: int,
    skills: int,
    seed: int,
    generic_skills: Sequence[str] = DEFAULT_GENERIC_SKILLS,
    core_skills_per_family: int = 5,
    noise_skills_per_title: int = 2,
) -> list[TitleRecord]:
    """Deterministic stand-in for a real job-posting corpus.

    Each family is a cluster of synonym titles sharing a long core phrase
    (so character-trigram embeddings place them in one cosine neighborhood)
    and a core skill subset present in every family title. Each title adds a
    little skill noise, and every `generic_skills` entry appears in every
    title so its document frequency equals the corpus size.
    """
    if families < 1 or synonyms_per_family < 1 or skills < 1:
        raise ValueError("families, synonyms_per_family and skills must be >= 1")
    rng = Xorshift64Star(seed)

    skill_pool = [f"skill {i:03d}" for i in range(skills)]
    generics = [normalize_skill(g) for g in generic_skills]

    phrases: list[str] = []
    seen = set()
    while len(phrases) < families:
        phrase = (
            f"{rng.choice(_DOMAIN_WORDS)} {rng.choice(_DOMAIN_WORDS)} "
            f"{rng.choice(_ROLE_WORDS)}"
        )
        if phrase not in seen:
            seen.add(phrase)
            phrases.append(phrase)

    records: list[TitleRecord] = []
    n_core = min(core_skills_per_family, skills)
    for phrase in phrases:
        core = rng.sample(skill_pool, n_core)
        for k in range(synonyms_per_family):
            if k == 0:
                title = phrase
            elif k <= len(_MODIFIERS):
                title = f"{_MODIFIERS[k - 1]} {phrase}"
            else:
                title = f"{phrase} {k}"  # overflow past the modifier list
            noise = rng.sample(skill_pool, min(noise_skills_per_title, skills))
            records.append(
                TitleRecord(
                    title=normalize_title(title),
                    skills=frozenset(core) | frozenset(noise) | frozenset(generics),
                )
            )
    return records


def write_corpus(records: Iterable[TitleRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            obj = {"title": r.title, "skills": sorted(r.skills)}
            if r.lang is not None:
                obj["lang"] = r.lang
            f.write(json.dumps(obj) + "\n")


def read_corpus(path) -> list[TitleRecord]:
    with open(path, "r", encoding="utf-8") as f:
        return parse_corpus(f).records
