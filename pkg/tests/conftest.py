"""Shared fixtures: raw binary store writing and planted-geometry worlds.

The store writer here builds the three files byte by byte, independent of
the library's own writer, so loader tests check the documented layout and
not merely writer/loader consistency.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from fdeval import Qrels, RunEntry, RunFile, load_store


def write_raw_store(
    directory: Path,
    ids: list[str],
    vectors: np.ndarray,
    encoder: str = "unit-test-encoder",
    meta_override: dict | None = None,
    payload_override: bytes | None = None,
):
    """Write a store directory from raw parts; overrides let tests corrupt it."""
    directory.mkdir(parents=True, exist_ok=True)
    vectors = np.asarray(vectors, dtype=np.float32)
    meta = {"dim": int(vectors.shape[1]), "count": int(vectors.shape[0]), "encoder": encoder}
    if meta_override:
        meta.update(meta_override)
    (directory / "meta.json").write_text(json.dumps(meta), encoding="utf-8")
    (directory / "ids.tsv").write_text("".join(f"{i}\n" for i in ids), encoding="utf-8")
    payload = vectors.astype("<f4").tobytes(order="C") if payload_override is None else payload_override
    (directory / "vectors.f32").write_bytes(payload)
    return directory


@pytest.fixture
def store_factory(tmp_path):
    """Callable writing a raw store under a unique subdirectory and loading it."""
    counter = {"n": 0}

    def build(ids, vectors, **kwargs):
        counter["n"] += 1
        path = write_raw_store(tmp_path / f"store{counter['n']}", ids, vectors, **kwargs)
        return load_store(path)

    return build


def make_run(tag: str, rankings: dict[str, list[str]]) -> RunFile:
    """RunFile from per-query doc-id lists; ranks 1..n, scores descending."""
    return RunFile(
        system_tag=tag,
        rankings={
            qid: [
                RunEntry(doc_id=doc, rank=i + 1, score=float(len(docs) - i))
                for i, doc in enumerate(docs)
            ]
            for qid, docs in rankings.items()
        },
    )


class PlantedWorld:
    """Synthetic relevant/retrieved geometry with a known quality ordering.

    Relevant documents are standard-normal draws; each system retrieves from
    a cluster translated by `shift` along a fixed unit direction, optionally
    planting the query's first relevant doc at a fixed rank. Larger shifts
    mean worse systems.
    """

    def __init__(
        self,
        n_queries: int,
        p: int,
        k: int,
        systems: list[dict],
        n_relevant: int = 1,
        rel_grade: int = 1,
        seed: int = 0,
    ):
        rng = np.random.default_rng(seed)
        direction = np.ones(p) / np.sqrt(p)
        self.k = k
        self.p = p

        qids = [f"q{i}" for i in range(n_queries)]
        rel_ids = [[f"q{i}-rel{j}" for j in range(n_relevant)] for i in range(n_queries)]
        rel_vecs = rng.standard_normal((n_queries, n_relevant, p))

        self.qrels = Qrels(
            entries={
                qid: {doc: rel_grade for doc in docs}
                for qid, docs in zip(qids, rel_ids)
            }
        )

        all_ids: list[str] = [doc for docs in rel_ids for doc in docs]
        all_vecs: list[np.ndarray] = [rel_vecs.reshape(-1, p)]
        self.runs: list[RunFile] = []
        n_cluster = k + 1
        for spec in systems:
            tag, shift, rel_rank = spec["tag"], spec["shift"], spec.get("rel_rank")
            cluster_vecs = rng.standard_normal((n_queries, n_cluster, p)) + shift * direction
            cluster_ids = [
                [f"q{i}-{tag}-{j}" for j in range(n_cluster)] for i in range(n_queries)
            ]
            rankings: dict[str, list[str]] = {}
            for i, qid in enumerate(qids):
                docs = list(cluster_ids[i])
                if rel_rank is not None:
                    docs.insert(rel_rank - 1, rel_ids[i][0])
                    docs = docs[:n_cluster]
                rankings[qid] = docs
            self.runs.append(make_run(tag, rankings))
            all_ids.extend(doc for docs in cluster_ids for doc in docs)
            all_vecs.append(cluster_vecs.reshape(-1, p))

        self.store_ids = all_ids
        self.store_vectors = np.concatenate(all_vecs).astype(np.float32)

    def store(self, directory: Path):
        write_raw_store(directory, self.store_ids, self.store_vectors)
        return load_store(directory)


@pytest.fixture
def planted_factory(tmp_path):
    counter = {"n": 0}

    def build(**kwargs) -> tuple[PlantedWorld, object]:
        counter["n"] += 1
        world = PlantedWorld(**kwargs)
        store = world.store(tmp_path / f"planted{counter['n']}")
        return world, store

    return build
