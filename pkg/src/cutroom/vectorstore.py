"""Embedding index over visual narrations, ranked by cosine distance.

Exact exhaustive search: corpora are tens of videos, so O(N*D) per query is
ample and keeps ranking deterministic (ties broken by ascending asset id).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .errors import EmptyIndex, EmptyQuery
from .narration import NarrationCache, VideoAsset
from .providers import EmbeddingVector, Provider
from .storage import ProjectPaths, read_json, write_json


@dataclass(frozen=True)
class IndexEntry:
    asset_id: int
    vector: EmbeddingVector
    indexed_text: str


@dataclass(frozen=True)
class RankedResult:
    """(asset_id, cosine distance) pairs, distances non-decreasing, one pair
    per indexed asset."""

    items: tuple[tuple[int, float], ...]

    @property
    def ids(self) -> list[int]:
        return [asset_id for asset_id, _ in self.items]


def indexed_text_for(asset: VideoAsset) -> str:
    return f"{asset.narration.title}. {asset.narration.summary}"


def cosine_distance(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """1 - cosine similarity, clamped to [0, 2].

    Identical vectors are exactly distance 0; a zero vector is defined to be
    at distance 1 from everything (including itself).
    """
    if u.values == v.values and any(x != 0.0 for x in u.values):
        return 0.0
    a = np.asarray(u.values, dtype=np.float64)
    b = np.asarray(v.values, dtype=np.float64)
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        return 1.0
    cos = float(np.dot(a, b)) / (norm_a * norm_b)
    return min(max(1.0 - cos, 0.0), 2.0)


class VectorStore:
    """In-memory index, optionally persisted as per-asset vector records.

    Upserts are serialized; retrievals may run concurrently and see either the
    old or the new entry for an id, never a torn one.
    """

    def __init__(self, provider: Provider, paths: ProjectPaths | None = None, load: bool = True):
        self.provider = provider
        self.paths = paths
        self._entries: dict[int, IndexEntry] = {}
        self._write_lock = threading.Lock()
        if load and paths is not None and paths.vectors.exists():
            for record_path in sorted(paths.vectors.glob("asset_*.json")):
                record = read_json(record_path)
                self._entries[record["asset_id"]] = IndexEntry(
                    asset_id=record["asset_id"],
                    vector=EmbeddingVector(
                        values=tuple(record["values"]), model_id=record["model_id"]
                    ),
                    indexed_text=record["indexed_text"],
                )

    def __len__(self) -> int:
        return len(self._entries)

    def entry(self, asset_id: int) -> IndexEntry | None:
        return self._entries.get(asset_id)

    def upsert(self, asset: VideoAsset) -> IndexEntry:
        text = indexed_text_for(asset)
        with self._write_lock:
            existing = self._entries.get(asset.id)
            if existing is not None and existing.indexed_text == text:
                return existing
            vector = self.provider.embed(text)
            entry = IndexEntry(asset_id=asset.id, vector=vector, indexed_text=text)
            self._entries[asset.id] = entry
            if self.paths is not None:
                write_json(
                    self.paths.vector_record(asset.id),
                    {
                        "asset_id": asset.id,
                        "model_id": vector.model_id,
                        "indexed_text": text,
                        "values": list(vector.values),
                    },
                )
            return entry

    def retrieve(self, query: str) -> RankedResult:
        if not query:
            raise EmptyQuery("retrieval query must be non-empty")
        entries = list(self._entries.values())
        if not entries:
            raise EmptyIndex("no narrations have been indexed yet")
        query_vector = self.provider.embed(query)
        scored = [(cosine_distance(query_vector, e.vector), e.asset_id) for e in entries]
        scored.sort()
        return RankedResult(items=tuple((asset_id, dist) for dist, asset_id in scored))


def rebuild_index(provider: Provider, paths: ProjectPaths) -> VectorStore:
    """Re-embed every cached narration (the CLI ``reindex`` path), dropping
    stale records for assets no longer in the cache."""
    if paths.vectors.exists():
        for record in paths.vectors.glob("asset_*.json"):
            record.unlink()
    store = VectorStore(provider, paths, load=False)
    for asset in NarrationCache(paths).all_assets():
        store.upsert(asset)
    return store
