"""Triplet oracles, sampling strategies, label noise, and triplet file I/O.

A triplet list is a canonical int64 array of shape (m, 4) with columns
``i, j, k, y``: the oracle answered y = +1 when item j is closer to anchor
i than item k is, and y = -1 otherwise. Exact dissimilarity ties resolve
deterministically to +1 ("j wins"); they have measure zero on continuous
data and a fixed rule keeps runs reproducible.

All sampling is driven by ``numpy.random.default_rng(seed)`` so identical
seeds give identical outputs.
"""

import math
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DataError
from .validation import check_triplets

__all__ = [
    "Triplet",
    "SamplingConfig",
    "STRATEGY_UNIFORM",
    "STRATEGY_GRAPH_HOP",
    "oracle_from_points",
    "oracle_from_graph",
    "make_point_oracle",
    "make_graph_oracle",
    "graph_hop_distances",
    "budget_from_rule",
    "sample_uniform",
    "sample_graph_hop",
    "apply_noise",
    "split_train_test",
    "save_triplets",
    "load_triplets",
]

STRATEGY_UNIFORM = "uniform"
STRATEGY_GRAPH_HOP = "graph_hop"


class Triplet(NamedTuple):
    """One ordered comparison <i, j, k> with its oracle label."""

    i: int
    j: int
    k: int
    label: int


@dataclass
class SamplingConfig:
    """Knobs for triplet generation.

    ``budget_multiplier`` scales the sample-size rule of
    :func:`budget_from_rule`; ``noise_rate`` is the probability that a
    label gets flipped afterwards.
    """

    budget_multiplier: float = 1.0
    noise_rate: float = 0.0
    strategy: str = STRATEGY_UNIFORM
    seed: int = 0

    def __post_init__(self):
        if self.budget_multiplier <= 0:
            raise ValueError("budget_multiplier must be positive")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError("noise_rate must lie in [0, 1]")
        if self.strategy not in (STRATEGY_UNIFORM, STRATEGY_GRAPH_HOP):
            raise ValueError(f"unknown strategy {self.strategy!r}")


def _check_triple_indices(i, j, k, n):
    if len({i, j, k}) != 3:
        raise ValueError(f"triplet indices must be distinct, got ({i}, {j}, {k})")
    for idx in (i, j, k):
        if not 0 <= idx < n:
            raise ValueError(f"index {idx} out of range for {n} items")


def oracle_from_points(points, triple):
    """Label <i, j, k> from ground-truth points via squared Euclidean distance.

    Returns +1 when ``||x_i - x_j||^2 < ||x_i - x_k||^2``, -1 when greater,
    and +1 on an exact tie.
    """
    pts = points.points if hasattr(points, "points") else np.asarray(points, dtype=np.float64)
    i, j, k = (int(v) for v in triple[:3])
    _check_triple_indices(i, j, k, pts.shape[0])
    dij = pts[i] - pts[j]
    dik = pts[i] - pts[k]
    return 1 if dij @ dij <= dik @ dik else -1


def _bfs_distances(adj, source):
    dist = np.full(len(adj), -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def graph_hop_distances(graph):
    """All-pairs unweighted shortest-path hop counts, -1 where unreachable."""
    adj = graph.adjacency()
    return np.vstack([_bfs_distances(adj, s) for s in range(graph.n_nodes)])


def oracle_from_graph(graph, triple, hops=None):
    """Label <i, j, k> by shortest-path hop counts on a relation graph.

    ``hops`` may carry a precomputed matrix from
    :func:`graph_hop_distances` to avoid repeated traversals.
    """
    i, j, k = (int(v) for v in triple[:3])
    _check_triple_indices(i, j, k, graph.n_nodes)
    if hops is None:
        dist = _bfs_distances(graph.adjacency(), i)
        hij, hik = dist[j], dist[k]
    else:
        hij, hik = hops[i, j], hops[i, k]
    if hij < 0 or hik < 0:
        raise ValueError(f"nodes unreachable from anchor {i}")
    return 1 if hij <= hik else -1


def make_point_oracle(points):
    """Fast closure answering triples from a point dataset.

    Agrees with :func:`oracle_from_points` on every valid triple but skips
    per-call validation; meant for bulk labeling during sampling.
    """
    pts = points.points if hasattr(points, "points") else np.asarray(points, dtype=np.float64)
    rows = [tuple(map(float, row)) for row in pts]

    def oracle(triple):
        xi, xj, xk = rows[triple[0]], rows[triple[1]], rows[triple[2]]
        dij = sum((a - b) ** 2 for a, b in zip(xi, xj))
        dik = sum((a - b) ** 2 for a, b in zip(xi, xk))
        return 1 if dij <= dik else -1

    return oracle


def make_graph_oracle(graph):
    """Fast closure answering triples by cached hop distances."""
    hops = graph_hop_distances(graph)
    if np.any(hops < 0):
        raise ValueError("graph is not connected; hop oracle undefined")

    def oracle(triple):
        row = hops[triple[0]]
        return 1 if row[triple[1]] <= row[triple[2]] else -1

    return oracle


def budget_from_rule(n, d, p):
    """Triplet budget ``ceil(p * d^2 * n * ln n)``."""
    if n < 3:
        raise ValueError("n must be >= 3")
    if d < 1:
        raise ValueError("d must be >= 1")
    if p <= 0:
        raise ValueError("p must be positive")
    return math.ceil(p * d * d * n * math.log(n))


def sample_uniform(n, budget, oracle, seed=0):
    """Draw ``budget`` uniform triplets with replacement and label them.

    Each row has three distinct indices below ``n``; repeated rows across
    the sample are allowed. ``oracle`` maps an (i, j, k) triple to a label
    in {-1, +1}.
    """
    if n < 3:
        raise ValueError("n must be >= 3 to form triplets")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, n, size=(budget, 3), dtype=np.int64)
    bad = (idx[:, 0] == idx[:, 1]) | (idx[:, 0] == idx[:, 2]) | (idx[:, 1] == idx[:, 2])
    while np.any(bad):
        where = np.flatnonzero(bad)
        idx[where] = rng.integers(0, n, size=(where.size, 3), dtype=np.int64)
        rows = idx[where]
        bad[where] = (
            (rows[:, 0] == rows[:, 1])
            | (rows[:, 0] == rows[:, 2])
            | (rows[:, 1] == rows[:, 2])
        )
    labels = np.fromiter(
        (oracle((row[0], row[1], row[2])) for row in idx), dtype=np.int64, count=budget
    )
    return np.column_stack([idx, labels])


def sample_graph_hop(graph, budget, seed=0):
    """Hop-ring triplet sampling on a connected relation graph.

    Per draw: pick an anchor uniformly, pick one node uniformly from every
    nonempty hop ring around it, enumerate all (nearer, farther) pairs of
    those picks, and keep one pair uniformly with label +1. Anchors whose
    neighborhood collapses to a single ring are resampled; ``n_nodes``
    consecutive such failures raise.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if graph.n_nodes < 3:
        raise ValueError("graph must have at least 3 nodes")
    hops = graph_hop_distances(graph)
    if np.any(hops < 0):
        raise ValueError("graph is not connected")
    rings = []
    for anchor in range(graph.n_nodes):
        row = hops[anchor]
        by_hop = []
        for h in range(1, int(row.max()) + 1):
            members = np.flatnonzero(row == h)
            if members.size:
                by_hop.append(members)
        rings.append(by_hop)
    has_valid_anchor = any(len(r) >= 2 for r in rings)
    rng = np.random.default_rng(seed)
    out = np.empty((budget, 4), dtype=np.int64)
    filled = 0
    failures = 0
    while filled < budget:
        anchor = int(rng.integers(0, graph.n_nodes))
        anchor_rings = rings[anchor]
        if len(anchor_rings) < 2:
            failures += 1
            # The failure cap only terminates degenerate graphs; an unlucky
            # streak on a graph that does have usable anchors keeps going.
            if failures >= graph.n_nodes and not has_valid_anchor:
                raise ValueError(
                    "no anchor with two distinct hop rings found after "
                    f"{failures} attempts"
                )
            continue
        failures = 0
        reps = [int(ring[rng.integers(0, ring.size)]) for ring in anchor_rings]
        n_reps = len(reps)
        pair = int(rng.integers(0, n_reps * (n_reps - 1) // 2))
        # Unrank the pair id into (nearer a, farther b) with a < b.
        a = 0
        remaining = pair
        while remaining >= n_reps - 1 - a:
            remaining -= n_reps - 1 - a
            a += 1
        b = a + 1 + remaining
        out[filled] = (anchor, reps[a], reps[b], 1)
        filled += 1
    return out


def apply_noise(triplets, noise_rate, seed=0):
    """Independently flip each label with probability ``noise_rate``."""
    arr = check_triplets(triplets)
    if not 0.0 <= noise_rate <= 1.0:
        raise ValueError("noise_rate must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    flip = rng.random(arr.shape[0]) < noise_rate
    out = arr.copy()
    out[flip, 3] = -out[flip, 3]
    return out


def split_train_test(triplets, train_frac=0.9):
    """Split a triplet array into leading train and trailing test parts.

    Sampled triplets are i.i.d., so a contiguous split is already random;
    the train part holds ``floor(train_frac * m)`` rows (at least one row
    stays on each side when m >= 2).
    """
    arr = check_triplets(triplets)
    m = arr.shape[0]
    if not 0.0 < train_frac < 1.0:
        raise ValueError("train_frac must lie strictly between 0 and 1")
    n_train = int(train_frac * m)
    n_train = min(max(n_train, 1), m - 1) if m >= 2 else m
    return arr[:n_train].copy(), arr[n_train:].copy()


def save_triplets(path, triplets):
    """Write triplets as ``i,j,k,y`` lines."""
    arr = check_triplets(triplets)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, j, k, y in arr:
            fh.write(f"{i},{j},{k},{y}\n")


def load_triplets(path):
    """Read an ``i,j,k,y`` triplet file; ``#`` comment lines are ignored."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            cells = stripped.split(",")
            if len(cells) != 4:
                raise DataError(f"{path}:{line_no}: expected 'i,j,k,y'")
            try:
                rows.append([int(c) for c in cells])
            except ValueError as exc:
                raise DataError(f"{path}:{line_no}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: no triplets found")
    try:
        return check_triplets(np.array(rows, dtype=np.int64))
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
