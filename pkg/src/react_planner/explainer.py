"""Failure explanation by retrieval over past failures.

Records are filtered on (skill, error code) and ranked by cosine similarity
between hashed bag-of-words embeddings of user requests.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Iterable, Optional, Sequence

from .execution import FailureMessage

EMBED_DIM = 256
DEFAULT_THRESHOLD = 0.35

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF
_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")

Embedding = tuple[float, ...]


class DatasetError(ValueError):
    code = "DATASET_INVALID"


@dataclass(frozen=True)
class FailureRecord:
    id: str
    skill: str
    user_request: str
    error_code: str
    failure_reason: str
    suggestion: str

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not isinstance(value, str) or not value.strip():
                raise DatasetError(f"record field {name!r} must be a non-empty string")


@dataclass(frozen=True)
class Suggestion:
    text: str
    matched_record: str
    similarity: float


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def tokenize(text: str) -> list[str]:
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def embed(text: str) -> Embedding:
    counts = [0.0] * EMBED_DIM
    for tok in tokenize(text):
        counts[fnv1a_64(tok.encode("utf-8")) % EMBED_DIM] += 1.0
    norm = math.sqrt(sum(c * c for c in counts))
    if norm == 0.0:
        return tuple(counts)
    return tuple(c / norm for c in counts)


def cosine(a: Sequence[float], b: Sequence[float]) -> float:
    if len(a) != len(b):
        raise ValueError("vectors differ in length")
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return sum(x * y for x, y in zip(a, b)) / (na * nb)


def retrieve(
    skill: str, error_code: str, request: str, dataset: Iterable[FailureRecord]
) -> list[tuple[FailureRecord, float]]:
    query = embed(request)
    hits = [
        (rec, cosine(query, embed(rec.user_request)))
        for rec in dataset
        if rec.skill == skill and rec.error_code == error_code
    ]
    hits.sort(key=lambda h: (-h[1], h[0].id))
    return hits


def suggest(
    failure: FailureMessage,
    request: str,
    dataset: Iterable[FailureRecord],
    threshold: float = DEFAULT_THRESHOLD,
) -> Optional[Suggestion]:
    hits = retrieve(failure.skill, failure.error_code, request, dataset)
    if not hits or hits[0][1] < threshold:
        return None
    rec, sim = hits[0]
    return Suggestion(rec.suggestion, rec.id, sim)


def parse_dataset(lines: Iterable[str]) -> list[FailureRecord]:
    records = []
    seen = set()
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            rec = FailureRecord(**raw)
        except (json.JSONDecodeError, TypeError) as exc:
            raise DatasetError(f"line {lineno}: {exc}") from exc
        except DatasetError as exc:
            raise DatasetError(f"line {lineno}: {exc}") from exc
        if rec.id in seen:
            raise DatasetError(f"line {lineno}: duplicate record id {rec.id!r}")
        seen.add(rec.id)
        records.append(rec)
    return records


def load_dataset(path: Optional[str] = None) -> list[FailureRecord]:
    """Load a JSON-lines dataset; the bundled seed dataset when ``path`` is None."""
    if path is None:
        text = resources.files("react_planner.data").joinpath("explainer_seed.jsonl").read_text("utf-8")
        return parse_dataset(text.splitlines())
    with open(path, encoding="utf-8") as fh:
        return parse_dataset(fh)


class Explainer:
    def __init__(self, dataset: Sequence[FailureRecord], threshold: float = DEFAULT_THRESHOLD):
        self.dataset = tuple(dataset)
        self.threshold = threshold

    def explain(self, failure: FailureMessage, request: str) -> Optional[Suggestion]:
        return suggest(failure, request, self.dataset, self.threshold)
