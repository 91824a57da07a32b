"""Evaluation metrics: triplet error, Procrustes distances, clustering
purity, and link-prediction scores.

The Procrustes distances compare a ground-truth point set against either
another point set (classic) or a set of Gaussian embeddings. Both center
their inputs, normalize by centroid size (root-mean-square distance from
the centroid), and align with the best orthogonal map, reflections
included. For Gaussian targets the variances add a rotation-independent
trace penalty:

    sqrt( sum_i ||R x_i / S_X - mu_i / S_Y||^2 + sum_i tr(Sigma_i) / S_Y^2 )

which collapses to the classic distance when all variances vanish.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.cluster import KMeans

from .gaussian import EmbeddingSet, energy_between
from .validation import check_labels, check_points, check_triplets

__all__ = [
    "CentroidStats",
    "AlignmentResult",
    "centroid_stats",
    "align",
    "triplet_error",
    "procrustes_classic",
    "procrustes_distributional",
    "kmeans",
    "purity",
    "link_prediction_scores",
    "pairs_from_triplets",
    "negative_energy_scorer",
    "write_metrics_report",
]


@dataclass
class CentroidStats:
    """Centroid and centroid size of a point set."""

    centroid: np.ndarray
    size: float


@dataclass
class AlignmentResult:
    """Optimal orthogonal alignment: ``y ~ rotation @ x`` on normalized sets."""

    rotation: np.ndarray
    distance: float


def centroid_stats(X, name="points"):
    """Centroid and RMS distance from it; rejects all-coincident sets."""
    X = check_points(X, name)
    centroid = X.mean(axis=0)
    size = float(np.sqrt(np.mean(np.sum((X - centroid) ** 2, axis=1))))
    if size == 0.0:
        raise ValueError(f"{name} is degenerate: all points coincide")
    return CentroidStats(centroid=centroid, size=size)


def _normalize(X, name):
    stats = centroid_stats(X, name)
    return (X - stats.centroid) / stats.size, stats


def align(X, Y):
    """Best orthogonal map between two centered/scaled point sets.

    Both sets are normalized by their own centroid stats; the returned
    rotation (possibly a reflection) acts on column vectors of the
    normalized first set, and ``distance`` is the aligned residual
    root-sum-square.
    """
    A, _ = _normalize(check_points(X, "X"), "X")
    B, _ = _normalize(check_points(Y, "Y"), "Y")
    if A.shape != B.shape:
        raise ValueError("point sets must have equal shapes")
    if A.shape[0] < 2:
        raise ValueError("alignment needs at least 2 points")
    u, _, vt = np.linalg.svd(A.T @ B)
    r_rows = u @ vt
    distance = float(np.linalg.norm(A @ r_rows - B))
    return AlignmentResult(rotation=r_rows.T, distance=distance)


def procrustes_classic(X, Y):
    """Procrustes distance between two point sets of equal length."""
    return align(X, Y).distance


def procrustes_distributional(X, emb):
    """Procrustes distance from points to Gaussian embeddings.

    The optimal map is the classic alignment of the points against the
    embedding locations; the variances contribute their traces, scaled by
    the squared centroid size of the locations.
    """
    if not isinstance(emb, EmbeddingSet):
        raise ValueError("expected an EmbeddingSet for the distributional side")
    X = check_points(X, "X")
    if X.shape != emb.mu.shape:
        raise ValueError("point set and embeddings must have equal shapes")
    result = align(X, emb.mu)
    stats = centroid_stats(emb.mu, "embedding locations")
    trace_term = float(np.sum(emb.sigma)) / stats.size**2
    return float(np.sqrt(result.distance**2 + trace_term))


def triplet_error(triplets, emb, energy=None):
    """Fraction of triplets whose labeled ordering the embedding violates.

    A triplet counts as an error when ``y * sgn(E_ij - E_ik)`` is +1, and
    also when the energies tie exactly: an undecided answer is not a
    correct one. ``energy`` may override the squared-W2 energy with any
    vectorized ``(emb, idx_a, idx_b) -> array`` function.
    """
    arr = check_triplets(triplets, n_items=len(emb))
    if arr.shape[0] == 0:
        raise ValueError("triplet error needs a nonempty evaluation set")
    if energy is None:
        energy = energy_between
    e_ij = energy(emb, arr[:, 0], arr[:, 1])
    e_ik = energy(emb, arr[:, 0], arr[:, 2])
    diff = arr[:, 3] * (e_ij - e_ik)
    return float(np.mean((diff > 0) | (e_ij == e_ik)))


def kmeans(points, k, seed=0):
    """Cluster rows of ``points`` with k-means++ Lloyd iterations.

    Ten restarts, best inertia kept; deterministic in the seed.
    """
    points = check_points(points, "points")
    if k < 1 or k > points.shape[0]:
        raise ValueError(f"k must lie in [1, {points.shape[0]}]")
    model = KMeans(
        n_clusters=k, init="k-means++", n_init=10, random_state=int(seed) % 2**32
    )
    return model.fit_predict(points)


def purity(clusters, classes):
    """Share of items whose cluster's majority class is their own class."""
    clusters = np.asarray(clusters).ravel()
    n = clusters.shape[0]
    classes = check_labels(classes, n, "classes")
    if n == 0:
        raise ValueError("purity needs at least one item")
    _, cl_idx = np.unique(clusters, return_inverse=True)
    _, cs_idx = np.unique(classes, return_inverse=True)
    table = np.zeros((cl_idx.max() + 1, cs_idx.max() + 1), dtype=np.int64)
    np.add.at(table, (cl_idx, cs_idx), 1)
    return float(table.max(axis=1).sum() / n)


def _check_pairs(pairs, name):
    arr = np.asarray(pairs, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
        raise ValueError(f"{name} must be a nonempty (m, 2) index array")
    return arr


def link_prediction_scores(pos_pairs, neg_pairs, score):
    """ROC AUC and average precision for a similarity score over pairs.

    ``score`` must be vectorized over two index arrays and return higher
    values for more similar pairs. AUC is the rank statistic (ties count
    one half); AP sums precision-weighted recall increments down the
    ranked list, with tied scores entering together.
    """
    pos = _check_pairs(pos_pairs, "pos_pairs")
    neg = _check_pairs(neg_pairs, "neg_pairs")
    pos_scores = np.asarray(score(pos[:, 0], pos[:, 1]), dtype=np.float64).ravel()
    neg_scores = np.asarray(score(neg[:, 0], neg[:, 1]), dtype=np.float64).ravel()
    if not (np.all(np.isfinite(pos_scores)) and np.all(np.isfinite(neg_scores))):
        raise ValueError("scores must be finite")

    n_pos, n_neg = pos_scores.size, neg_scores.size
    neg_sorted = np.sort(neg_scores)
    below = np.searchsorted(neg_sorted, pos_scores, side="left")
    equal = np.searchsorted(neg_sorted, pos_scores, side="right") - below
    auc = float((below.sum() + 0.5 * equal.sum()) / (n_pos * n_neg))

    scores = np.concatenate([pos_scores, neg_scores])
    hits = np.concatenate([np.ones(n_pos), np.zeros(n_neg)])
    order = np.argsort(-scores, kind="stable")
    s_sorted = scores[order]
    tp = np.cumsum(hits[order])
    ranks = np.arange(1, s_sorted.size + 1)
    # Evaluate precision/recall only at the end of each tie group.
    boundary = np.append(np.flatnonzero(np.diff(s_sorted)), s_sorted.size - 1)
    precision = tp[boundary] / ranks[boundary]
    recall = tp[boundary] / n_pos
    ap = float(np.sum(np.diff(np.concatenate([[0.0], recall])) * precision))
    return auc, ap


def pairs_from_triplets(triplets):
    """Split labeled triplets into closer (positive) and farther pairs.

    For label +1 the pair (i, j) is the positive and (i, k) the negative;
    a -1 label swaps the roles.
    """
    arr = check_triplets(triplets)
    pos_second = np.where(arr[:, 3] == 1, arr[:, 1], arr[:, 2])
    neg_second = np.where(arr[:, 3] == 1, arr[:, 2], arr[:, 1])
    pos = np.column_stack([arr[:, 0], pos_second])
    neg = np.column_stack([arr[:, 0], neg_second])
    return pos, neg


def negative_energy_scorer(emb):
    """Similarity score for an embedding set: the negated pair energy."""

    def score(idx_a, idx_b):
        return -energy_between(emb, idx_a, idx_b)

    return score


def write_metrics_report(path, metrics, notes=()):
    """Write ``key=value`` metric lines, preceded by ``#`` note lines."""
    lines = [f"# {note}" for note in notes]
    lines += [f"{key}={value:.17g}" for key, value in metrics.items()]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
