"""Agglomerative clustering with a distance threshold, plus Rand-index scoring.

The merge loop is bottom-up: repeatedly join the two closest clusters until
every remaining pairwise merge distance exceeds the threshold (or the
requested cluster count is reached). Determinism is guaranteed by an
explicit tie rule: among equally distant candidate pairs, the pair whose
two clusters have the lexicographically smallest (min-member-id,
max-member-id) representative pair wins, where each cluster is represented
by its smallest member id. Output clusters are sorted largest first; size
ties go to the cluster whose earliest-loaded member comes first.

Supported linkages: ``average`` (mean pairwise distance), ``complete``
(max pairwise distance), and ``ward`` (Ward-style merge cost
sqrt(2ab/(a+b)) * ||centroid_a - centroid_b||, euclidean only).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embedding import EmbeddingSet
from .errors import ConfigError, FormatError, IntegrityError

LINKAGES = ("average", "complete", "ward")
METRICS = ("euclidean", "cosine")


@dataclass(frozen=True)
class ClusterConfig:
    distance_threshold: float = 1.5
    linkage: str = "average"
    metric: str = "euclidean"
    n_clusters: int | None = None  # overrides the threshold when set

    def validate(self) -> "ClusterConfig":
        if self.linkage not in LINKAGES:
            raise ConfigError(f"unknown linkage: {self.linkage!r}")
        if self.metric not in METRICS:
            raise ConfigError(f"unknown metric: {self.metric!r}")
        if self.linkage == "ward" and self.metric != "euclidean":
            raise ConfigError("ward linkage requires the euclidean metric")
        # Threshold 0 is allowed: it merges only zero-distance points.
        if self.distance_threshold < 0:
            raise ConfigError("distance_threshold must be >= 0")
        if self.n_clusters is not None and self.n_clusters < 1:
            raise ConfigError("n_clusters must be >= 1")
        return self


@dataclass
class ClusterAssignment:
    """Partition of argument ids into clusters, largest cluster first."""
    clusters: list[list[str]] = field(default_factory=list)

    def as_sets(self) -> set[frozenset[str]]:
        return {frozenset(c) for c in self.clusters}

    def to_json(self) -> dict:
        return {"clusters": [list(c) for c in self.clusters]}

    @classmethod
    def from_json(cls, doc: dict) -> "ClusterAssignment":
        try:
            clusters = [[str(i) for i in c] for c in doc["clusters"]]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed cluster assignment: {exc}") from exc
        return cls(clusters=clusters)

    @classmethod
    def load(cls, path) -> "ClusterAssignment":
        path = Path(path)
        if not path.exists():
            raise FormatError(f"assignment file not found: {path}")
        return cls.from_json(json.loads(path.read_text(encoding="utf-8")))


def pairwise_distances(X: np.ndarray, metric: str) -> np.ndarray:
    """Dense distance matrix; raises on non-finite entries."""
    gram = X @ X.T
    sq_norms = np.diag(gram)
    if metric == "euclidean":
        sq = sq_norms[:, None] + sq_norms[None, :] - 2.0 * gram
        np.clip(sq, 0.0, None, out=sq)
        dist = np.sqrt(sq)
    else:  # cosine distance
        norms = np.sqrt(sq_norms)
        with np.errstate(divide="ignore", invalid="ignore"):
            dist = 1.0 - gram / (norms[:, None] * norms[None, :])
    np.fill_diagonal(dist, 0.0)
    if not np.all(np.isfinite(dist)):
        raise FormatError("non-finite pairwise distance (zero vector under cosine?)")
    return dist


def cluster(embeddings: EmbeddingSet, config: ClusterConfig) -> ClusterAssignment:
    """Agglomerate the embedded points per the config; see module docstring."""
    config.validate()
    ids = embeddings.ids()
    n = len(ids)
    if n == 0:
        raise ConfigError("cannot cluster an empty embedding set")
    if config.n_clusters is not None and config.n_clusters > n:
        raise ConfigError(f"n_clusters={config.n_clusters} exceeds point count {n}")

    X = embeddings.matrix(ids)
    D = pairwise_distances(X, config.metric)

    # One slot per initial point; merges keep the lower slot alive.
    members: list[list[int]] = [[i] for i in range(n)]
    min_id: list[str] = list(ids)
    active = [True] * n
    labels = np.arange(n)  # point index -> active slot
    sizes = np.ones(n)
    centroids = X.copy() if config.linkage == "ward" else None

    C = D.copy()
    np.fill_diagonal(C, np.inf)

    def ward_row(i: int) -> None:
        diff = centroids - centroids[i]
        factor = 2.0 * sizes[i] * sizes / (sizes[i] + sizes)
        row = np.sqrt(factor) * np.linalg.norm(diff, axis=1)
        C[i, :] = row
        C[:, i] = row

    def average_row(i: int) -> None:
        row_sum = D[members[i]].sum(axis=0)
        totals = np.bincount(labels, weights=row_sum, minlength=n)
        counts = len(members[i]) * sizes
        with np.errstate(invalid="ignore"):
            row = totals / counts
        C[i, :] = row
        C[:, i] = row

    def complete_row(i: int) -> None:
        for v in range(n):
            if not active[v] or v == i:
                continue
            d = D[np.ix_(members[i], members[v])].max()
            C[i, v] = d
            C[v, i] = d

    def mask_slot(j: int) -> None:
        C[j, :] = np.inf
        C[:, j] = np.inf

    remaining = n
    while remaining > 1:
        if config.n_clusters is not None and remaining <= config.n_clusters:
            break
        dmin = C.min()
        if config.n_clusters is None and dmin > config.distance_threshold:
            break
        # Deterministic tie rule over all pairs achieving the minimum.
        rows, cols = np.nonzero(C == dmin)
        best = None
        for a, b in zip(rows.tolist(), cols.tolist()):
            if a >= b:
                continue
            key = tuple(sorted((min_id[a], min_id[b])))
            if best is None or key < best[0]:
                best = (key, a, b)
        _, i, j = best

        members[i] = sorted(members[i] + members[j])
        min_id[i] = min(min_id[i], min_id[j])
        active[j] = False
        labels[labels == j] = i
        sizes[i] += sizes[j]
        sizes[j] = 0.0
        mask_slot(j)
        if config.linkage == "ward":
            centroids[i] = X[members[i]].mean(axis=0)
            ward_row(i)
        elif config.linkage == "average":
            average_row(i)
        else:
            complete_row(i)
        # Re-mask entries the row update overwrote.
        C[i, i] = np.inf
        inactive = [s for s in range(n) if not active[s]]
        if inactive:
            C[i, inactive] = np.inf
            C[inactive, i] = np.inf
        remaining -= 1

    result = []
    for slot in range(n):
        if active[slot]:
            result.append(members[slot])
    # Largest first; size ties go to the earliest-loaded member.
    result.sort(key=lambda m: (-len(m), m[0]))
    return ClusterAssignment(clusters=[[ids[p] for p in m] for m in result])


# ---------------------------------------------------------------------------
# Rand-index scoring against gold groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RandScores:
    rand: float
    adjusted_rand: float

    def to_json(self) -> dict:
        return {"rand": self.rand, "adjusted_rand": self.adjusted_rand}


def rand_index(predicted: ClusterAssignment, gold: dict[str, str]) -> RandScores:
    """Pair-counting agreement between a predicted partition and gold groups.

    Predicted ids absent from ``gold`` are dropped before counting; this is
    the hook for removing arguments whose only gold label is the catch-all.
    Both the plain and the chance-adjusted index are reported.
    """
    pred_label: dict[str, int] = {}
    for idx, members in enumerate(predicted.clusters):
        for arg_id in members:
            if arg_id in pred_label:
                raise IntegrityError(f"argument {arg_id!r} appears in two clusters")
            if arg_id in gold:
                pred_label[arg_id] = idx

    retained = sorted(pred_label)
    if not retained:
        raise ConfigError("no labeled arguments to score")
    total_n = len(retained)
    if total_n == 1:
        return RandScores(rand=1.0, adjusted_rand=1.0)

    contingency: dict[tuple[int, str], int] = {}
    row_counts: dict[int, int] = {}
    col_counts: dict[str, int] = {}
    for arg_id in retained:
        r = pred_label[arg_id]
        c = gold[arg_id]
        contingency[(r, c)] = contingency.get((r, c), 0) + 1
        row_counts[r] = row_counts.get(r, 0) + 1
        col_counts[c] = col_counts.get(c, 0) + 1

    sum_both = sum(math.comb(v, 2) for v in contingency.values())
    sum_pred = sum(math.comb(v, 2) for v in row_counts.values())
    sum_gold = sum(math.comb(v, 2) for v in col_counts.values())
    total = math.comb(total_n, 2)

    tp = sum_both
    fp = sum_pred - sum_both
    fn = sum_gold - sum_both
    tn = total - sum_pred - sum_gold + sum_both

    rand = (tp + tn) / total
    if fp == 0 and fn == 0:
        adjusted = 1.0
    else:
        adjusted = 2.0 * (tp * tn - fn * fp) / ((tp + fn) * (fn + tn) + (tp + fp) * (fp + tn))
    return RandScores(rand=rand, adjusted_rand=adjusted)
