"""
Distances, target ranking and mean reciprocal rank.

Candidates are ordered by ascending distance to the query, with ties broken
by ascending label so rankings are reproducible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .errors import UsageError

METRICS = ("euclidean", "cosine")

# above this many candidates distances are computed one query at a time
DEFAULT_MATRIX_CAP = 20000

RANKING_HEADER = ["query", "target", "metric", "representation", "rank", "reciprocal_rank"]
SUMMARY_HEADER = ["representation", "metric", "snr_db", "mrr"]


def _check_metric(metric):
    if metric not in METRICS:
        raise UsageError(f"unknown metric {metric!r}; choose from {METRICS}")


def distance(u, v, metric: str = "euclidean") -> float:
    """Euclidean distance or cosine distance ``1 - cos(u, v)``.

    Cosine distance against an all-zero vector is defined as 1.
    """
    _check_metric(metric)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise UsageError(f"vectors must be 1-D with equal length, got {u.shape} and {v.shape}")
    if metric == "euclidean":
        return float(np.sqrt(np.sum((u - v) ** 2)))
    nu = np.sqrt(np.dot(u, u))
    nv = np.sqrt(np.dot(v, v))
    if nu == 0 or nv == 0:
        return 1.0
    # clamp rounding overshoot so the distance stays non-negative
    return float(max(0.0, 1.0 - np.dot(u, v) / (nu * nv)))


def pairwise_distances(queries, candidates, metric: str = "euclidean") -> np.ndarray:
    """Q x C distance matrix; row ``q`` matches ``distance(queries[q], c)``."""
    _check_metric(metric)
    q = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    c = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    if q.shape[1] != c.shape[1]:
        raise UsageError(f"dimension mismatch: {q.shape[1]} vs {c.shape[1]}")
    if metric == "euclidean":
        return np.sqrt(((q[:, None, :] - c[None, :, :]) ** 2).sum(axis=2))
    nq = np.sqrt(np.einsum("ij,ij->i", q, q))
    nc = np.sqrt(np.einsum("ij,ij->i", c, c))
    with np.errstate(invalid="ignore", divide="ignore"):
        d = 1.0 - (q @ c.T) / np.outer(nq, nc)
    d[(nq == 0)[:, None] | (nc == 0)[None, :]] = 1.0
    return np.maximum(d, 0.0)


@dataclass
class FeatureSet:
    """Equal-length vectors with unique labels."""

    vectors: np.ndarray
    labels: list

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2:
            raise UsageError(f"feature vectors must form a 2-D array, got shape {v.shape}")
        self.vectors = v
        self.labels = list(self.labels)
        if len(self.labels) != v.shape[0]:
            raise UsageError(f"{v.shape[0]} vectors but {len(self.labels)} labels")
        if len(set(self.labels)) != len(self.labels):
            raise UsageError("feature labels must be unique")
        self._order = None

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UsageError(f"target label {label!r} not among candidates") from None

    def label_order(self) -> np.ndarray:
        """Position of each label in ascending label order."""
        if self._order is None:
            ranks = np.empty(len(self.labels), dtype=np.int64)
            ranks[sorted(range(len(self.labels)), key=self.labels.__getitem__)] = np.arange(len(self.labels))
            self._order = ranks
        return self._order


@dataclass
class RankingResult:
    query_label: Hashable
    target_label: Hashable
    rank: int
    ordering: list = field(default_factory=list, repr=False)

    @property
    def reciprocal_rank(self) -> float:
        return 1.0 / self.rank


def _order(dists, label_order):
    return np.lexsort((label_order, dists))


def rank_from_distances(dists, candidates: FeatureSet, target_label, query_label=None,
                        keep_ordering: bool = True) -> RankingResult:
    dists = np.asarray(dists, dtype=np.float64)
    t = candidates.index(target_label)
    order = _order(dists, candidates.label_order())
    rank = int(np.flatnonzero(order == t)[0]) + 1
    ordering = [candidates.labels[i] for i in order] if keep_ordering else []
    return RankingResult(query_label, target_label, rank, ordering)


def rank_target(query, candidates: FeatureSet, target_label, metric: str = "euclidean",
                query_label=None) -> RankingResult:
    """Sort ``candidates`` by distance to ``query`` and locate the target.

    The query is not part of ``candidates``; callers exclude it beforehand.
    """
    query = np.asarray(query, dtype=np.float64)
    if query.shape != candidates.vectors.shape[1:]:
        raise UsageError(f"query has shape {query.shape}, candidates have {candidates.vectors.shape[1:]}")
    dists = pairwise_distances(query[None, :], candidates.vectors, metric)[0]
    return rank_from_distances(dists, candidates, target_label, query_label)


def rank_queries(
    queries: FeatureSet,
    candidates: FeatureSet,
    targets: Sequence,
    metric: str = "euclidean",
    exclude: Sequence | None = None,
    matrix_cap: int = DEFAULT_MATRIX_CAP,
) -> list[RankingResult]:
    """Rank many queries against one candidate pool.

    ``targets[q]`` is the label expected nearest to query ``q``;
    ``exclude[q]`` (optional) names a candidate dropped from that query's
    pool, typically the query itself. The full distance matrix is built in
    one go when the pool has at most ``matrix_cap`` candidates.
    """
    if len(targets) != len(queries):
        raise UsageError("one target label per query is required")
    order_key = candidates.label_order()
    if len(candidates) <= matrix_cap:
        # bound the broadcast temporary to roughly 32M doubles
        step = max(1, 2**25 // max(1, len(candidates) * candidates.vectors.shape[1]))
        blocks = [pairwise_distances(queries.vectors[s:s + step], candidates.vectors, metric)
                  for s in range(0, len(queries), step)]
        full = np.vstack(blocks)
        rows = (full[q] for q in range(len(queries)))
    else:
        rows = (pairwise_distances(queries.vectors[q:q + 1], candidates.vectors, metric)[0]
                for q in range(len(queries)))
    results = []
    for q, dists in enumerate(rows):
        t = candidates.index(targets[q])
        keep = np.ones(len(candidates), dtype=bool)
        if exclude is not None and exclude[q] is not None:
            keep[candidates.index(exclude[q])] = False
        # count candidates that sort ahead of the target under the tie rule
        ahead = (dists < dists[t]) | ((dists == dists[t]) & (order_key < order_key[t]))
        rank = int(np.count_nonzero(ahead & keep)) + 1
        results.append(RankingResult(queries.labels[q], targets[q], rank))
    return results


def mean_reciprocal_rank(results) -> float:
    results = list(results)
    if not results:
        raise UsageError("mean reciprocal rank of an empty result list")
    return float(np.mean([1.0 / (r.rank if isinstance(r, RankingResult) else r) for r in results]))


def write_rankings_csv(fh, rows) -> None:
    """``rows`` are dicts or tuples in :data:`RANKING_HEADER` order."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(RANKING_HEADER)
    for row in rows:
        if isinstance(row, dict):
            row = [row[k] for k in RANKING_HEADER]
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])


def write_summary_csv(fh, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for row in rows:
        if isinstance(row, dict):
            row = [row[k] for k in SUMMARY_HEADER]
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
