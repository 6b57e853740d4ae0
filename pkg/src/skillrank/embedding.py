"""Title embeddings: interchange file store, fallback hashing embedder,
cosine similarity and exact threshold neighborhoods.

Interchange embedding file (line-delimited JSON):
line 1:  {"type":"header","dimension":D,"provider":"<label>","count":N}
then:    {"type":"vec","id":"<normalized title>","v":[D floats]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np


class EmbeddingError(Exception):
    pass


# |norm - 1| beyond this on load is treated as corruption, not rounding.
NORM_TOLERANCE = 1e-3

DEFAULT_DIMENSION = 256
MIN_DIMENSION = 16
DEFAULT_THRESHOLD = 0.75

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1
_BOUNDARY = "\x01"  # cannot occur in normalized titles


@dataclass(frozen=True)
class NeighborhoodConfig:
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if not (0.0 < self.threshold <= 1.0):
            raise ValueError(f"threshold must be in (0,1], got {self.threshold}")


class EmbeddingStore:
    """Immutable map title-id -> unit vector, all sharing one dimension."""

    def __init__(self, dimension: int, provider: str,
                 vectors: Mapping[str, np.ndarray]):
        if dimension < 1:
            raise EmbeddingError(f"dimension must be positive, got {dimension}")
        self.dimension = dimension
        self.provider = provider
        self._vectors: dict[str, np.ndarray] = {}
        for title_id, vec in vectors.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (dimension,):
                raise EmbeddingError(
                    f"vector for {title_id!r} has length {arr.size}, "
                    f"expected {dimension}"
                )
            norm = float(np.linalg.norm(arr))
            if norm == 0.0:
                raise EmbeddingError(f"zero vector for {title_id!r}")
            if abs(norm - 1.0) > NORM_TOLERANCE:
                raise EmbeddingError(
                    f"vector for {title_id!r} has norm {norm:.6f}, "
                    f"beyond renormalization tolerance {NORM_TOLERANCE}"
                )
            arr = arr / norm
            arr.flags.writeable = False
            self._vectors[title_id] = arr

    def __contains__(self, title_id: str) -> bool:
        return title_id in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def ids(self) -> list[str]:
        return list(self._vectors)

    def vector(self, title_id: str) -> np.ndarray:
        try:
            return self._vectors[title_id]
        except KeyError:
            raise EmbeddingError(f"no embedding for title {title_id!r}") from None


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise EmbeddingError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise EmbeddingError("cosine similarity undefined for zero vectors")
    return float(np.dot(a, b) / (na * nb))


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def fallback_embed(title: str, dimension: int = DEFAULT_DIMENSION) -> np.ndarray:
    """Signed hashed bag of character trigrams; deterministic stand-in for a
    neural sentence encoder. The title is padded with one boundary marker on
    each side; each trigram is FNV-1a-64 hashed, bucketed mod `dimension`,
    signed by the hash's top bit; the result is L2-normalized.
    """
    if not title or not title.strip():
        raise EmbeddingError("cannot embed an empty title")
    if dimension < MIN_DIMENSION:
        raise EmbeddingError(
            f"dimension must be >= {MIN_DIMENSION}, got {dimension}"
        )
    padded = _BOUNDARY + title + _BOUNDARY
    vec = np.zeros(dimension, dtype=np.float64)
    for i in range(len(padded) - 2):
        h = _fnv1a64(padded[i : i + 3].encode("utf-8"))
        sign = -1.0 if (h >> 63) else 1.0
        vec[h % dimension] += sign
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        # all trigrams cancelled; fall back to a single deterministic bucket
        vec[_fnv1a64(padded.encode("utf-8")) % dimension] = 1.0
        norm = 1.0
    return vec / norm


def build_fallback_store(titles: Iterable[str],
                         dimension: int = DEFAULT_DIMENSION) -> EmbeddingStore:
    vectors = {}
    for t in titles:
        if t not in vectors:
            vectors[t] = fallback_embed(t, dimension)
    return EmbeddingStore(dimension, f"fallback-trigram-{dimension}", vectors)


def load_embedding_store(path) -> EmbeddingStore:
    with open(path, "r", encoding="utf-8") as f:
        header_line = f.readline()
        if not header_line.strip():
            raise EmbeddingError("embedding file is empty")
        header = _parse_json_line(header_line, 1)
        if header.get("type") != "header":
            raise EmbeddingError("first line must be the header object")
        for field in ("dimension", "provider"):
            if field not in header:
                raise EmbeddingError(f"header missing {field!r}")
        dimension = int(header["dimension"])
        vectors: dict[str, list] = {}
        for line_no, line in enumerate(f, start=2):
            if not line.strip():
                continue
            obj = _parse_json_line(line, line_no)
            if obj.get("type") != "vec":
                raise EmbeddingError(f"line {line_no}: expected a vec record")
            title_id = obj["id"]
            if title_id in vectors:
                raise EmbeddingError(f"duplicate title id {title_id!r}")
            v = obj["v"]
            if len(v) != dimension:
                raise EmbeddingError(
                    f"vector for {title_id!r} has length {len(v)}, "
                    f"expected {dimension}"
                )
            vectors[title_id] = v
    return EmbeddingStore(dimension, str(header["provider"]), vectors)


def save_embedding_store(store: EmbeddingStore, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps({
            "type": "header",
            "dimension": store.dimension,
            "provider": store.provider,
            "count": len(store),
        }) + "\n")
        for title_id in store.ids():
            vec = store.vector(title_id)
            f.write(json.dumps({
                "type": "vec",
                "id": title_id,
                "v": [float(x) for x in vec],
            }) + "\n")


def _parse_json_line(line: str, line_no: int) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise EmbeddingError(f"line {line_no}: invalid JSON: {e}") from e
    if not isinstance(obj, dict):
        raise EmbeddingError(f"line {line_no}: expected an object")
    return obj


def find_similar(anchor: str, store: EmbeddingStore, candidates: Iterable[str],
                 config: NeighborhoodConfig = NeighborhoodConfig()) -> set[str]:
    """Exact threshold scan: every candidate whose cosine with the anchor is
    >= config.threshold. The anchor qualifies itself whenever it is a
    candidate (self-similarity 1.0)."""
    anchor_vec = store.vector(anchor)
    candidates = list(candidates)
    if not candidates:
        return set()
    matrix = np.stack([store.vector(c) for c in candidates])
    sims = matrix @ anchor_vec
    return {c for c, s in zip(candidates, sims) if s >= config.threshold}
