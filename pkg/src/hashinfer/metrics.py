"""Retrieval evaluation of binary codes: mAP, precision at radius 2, kNN."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import CodeMatrix, DimensionError

KNN_DEFAULT_K = 4
RADIUS = 2


@dataclass(frozen=True)
class RetrievalGroundTruth:
    """Class labels for the query and database splits."""

    query_labels: np.ndarray
    database_labels: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.query_labels)
        d = np.asarray(self.database_labels)
        if q.ndim != 1 or d.ndim != 1 or q.shape[0] < 1 or d.shape[0] < 1:
            raise DimensionError("labels must be non-empty 1-d vectors")
        object.__setattr__(self, "query_labels", q)
        object.__setattr__(self, "database_labels", d)


@dataclass(frozen=True)
class MetricsReport:
    mean_ap: float
    precision_at_r2: float
    per_query_ap: np.ndarray
    knn_accuracy: float


def pack_codes(z: CodeMatrix) -> np.ndarray:
    """Pack columns of an L x n code matrix into rows of uint64 words.

    Bit b of the code maps to bit (b mod 64) of word b // 64, with +1
    stored as a set bit. Returns an n x ceil(L/64) array.
    """
    bits = z.codes > 0
    n = z.samples
    words = (z.bits + 63) // 64
    out = np.zeros((n, words), dtype=np.uint64)
    for b in range(z.bits):
        out[:, b >> 6] |= bits[b].astype(np.uint64) << np.uint64(b & 63)
    return out


def hamming_distances(query: CodeMatrix, database: CodeMatrix) -> np.ndarray:
    """Exact pairwise Hamming distances, queries by rows."""
    if query.bits != database.bits:
        raise DimensionError(f"code lengths differ: {query.bits} vs {database.bits}")
    return kernels.hamming_distance_matrix(pack_codes(query), pack_codes(database))


def hamming_rank(query: CodeMatrix, database: CodeMatrix) -> np.ndarray:
    """Database indices per query, sorted by distance, ties in index order."""
    d = hamming_distances(query, database)
    return np.argsort(d, axis=1, kind="stable")


def average_precisions(ranking, truth: RetrievalGroundTruth) -> np.ndarray:
    """Average precision per query over the full ranking.

    AP = mean over relevant positions of (relevant seen so far / position).
    A query with no relevant database item scores 0.
    """
    rank = np.asarray(ranking)
    nq, nd = rank.shape
    if nq != truth.query_labels.shape[0] or nd != truth.database_labels.shape[0]:
        raise DimensionError("ranking shape does not match label counts")
    aps = np.zeros(nq)
    positions = np.arange(1, nd + 1)
    for i in range(nq):
        rel = truth.database_labels[rank[i]] == truth.query_labels[i]
        total = int(rel.sum())
        if total == 0:
            continue
        hits = np.cumsum(rel)
        aps[i] = float((hits[rel] / positions[rel]).sum() / total)
    return aps


def mean_average_precision(ranking, truth: RetrievalGroundTruth) -> float:
    return float(average_precisions(ranking, truth).mean())


def precision_at_radius2(query: CodeMatrix, database: CodeMatrix, truth: RetrievalGroundTruth) -> float:
    """Mean precision of the Hamming ball of radius 2 around each query.

    Queries whose ball is empty contribute precision 0.
    """
    d = hamming_distances(query, database)
    if d.shape != (truth.query_labels.shape[0], truth.database_labels.shape[0]):
        raise DimensionError("codes do not match label counts")
    precisions = np.zeros(d.shape[0])
    for i in range(d.shape[0]):
        ball = d[i] <= RADIUS
        hits = int(ball.sum())
        if hits:
            rel = truth.database_labels[ball] == truth.query_labels[i]
            precisions[i] = float(rel.sum() / hits)
    return float(precisions.mean())


def knn_classify(query: CodeMatrix, database: CodeMatrix, database_labels, k=KNN_DEFAULT_K) -> np.ndarray:
    """Majority label of the k nearest database codes per query.

    Neighbor ties resolve by index order; vote ties go to the label that
    appears first among the neighbors.
    """
    labels = np.asarray(database_labels)
    if labels.ndim != 1 or labels.shape[0] != database.samples:
        raise DimensionError("database labels do not match code count")
    if not 1 <= k <= database.samples:
        raise ValueError(f"k={k} out of range for {database.samples} database items")
    rank = hamming_rank(query, database)
    out = np.empty(rank.shape[0], dtype=labels.dtype)
    for i in range(rank.shape[0]):
        votes = labels[rank[i, :k]]
        uniq, first_pos, counts = np.unique(votes, return_index=True, return_counts=True)
        top = counts == counts.max()
        out[i] = uniq[top][np.argmin(first_pos[top])]
    return out


def knn_accuracy(query: CodeMatrix, database: CodeMatrix, truth: RetrievalGroundTruth, k=KNN_DEFAULT_K) -> float:
    pred = knn_classify(query, database, truth.database_labels, k=k)
    return float((pred == truth.query_labels).mean())


def evaluate(query: CodeMatrix, database: CodeMatrix, truth: RetrievalGroundTruth, k=KNN_DEFAULT_K) -> MetricsReport:
    """All retrieval metrics in one pass."""
    rank = hamming_rank(query, database)
    aps = average_precisions(rank, truth)
    return MetricsReport(
        mean_ap=float(aps.mean()),
        precision_at_r2=precision_at_radius2(query, database, truth),
        per_query_ap=aps,
        knn_accuracy=knn_accuracy(query, database, truth, k=k),
    )
