"""Synthetic dataset generators and point/graph file ingestion.

All point generators are 2-D, deterministic in their seed, and return a
:class:`PointDataset` with integer class labels. Geometric constants are
fixed here so results reproduce without any external toolkit:

* blobs: three isotropic Gaussians (per-coordinate std ``1/sqrt(2)``) at the
  vertices of an equilateral triangle of side 6.
* moons: class 0 on the upper unit half-circle ``(cos t, sin t)``,
  t in [0, pi]; class 1 on its point reflection shifted to
  ``(1 - cos t, 0.5 - sin t)``; optional Gaussian jitter on both.
* circles: class 0 on the unit circle, class 1 on a concentric circle of
  radius ``factor``; angles uniform on [0, 2*pi) without the endpoint.

Graph generators return a :class:`RelationGraph` whose first nodes are the
item nodes, followed by fine-class nodes and then super-class nodes.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DataError
from .validation import check_labels, check_points

__all__ = [
    "PointDataset",
    "RelationGraph",
    "NODE_ITEM",
    "NODE_FINE",
    "NODE_SUPER",
    "gen_blobs",
    "gen_moons",
    "gen_circles",
    "gen_linear_order",
    "gen_hierarchy",
    "load_points",
    "save_points",
    "load_graph",
    "save_graph",
]

NODE_ITEM = "item"
NODE_FINE = "fine"
NODE_SUPER = "super"

_BLOB_STD = 1.0 / math.sqrt(2.0)
_BLOB_CENTERS = np.array([[0.0, 0.0], [6.0, 0.0], [3.0, 3.0 * math.sqrt(3.0)]])


@dataclass
class PointDataset:
    """n ground-truth points in R^d with optional integer class labels."""

    points: np.ndarray
    labels: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        self.points = check_points(self.points)
        if self.points.shape[0] < 3:
            raise ValueError("a point dataset needs at least 3 points")
        if self.labels is not None:
            self.labels = check_labels(self.labels, self.points.shape[0])

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]


@dataclass
class RelationGraph:
    """Simple undirected graph over item and class nodes.

    ``kinds[v]`` tags node v as item / fine / super; item nodes always come
    first so triplet indices over items coincide with node ids.
    """

    n_nodes: int
    edges: list = field(default_factory=list)
    kinds: list = field(default_factory=list)

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ValueError("a relation graph needs at least 2 nodes")
        if len(self.kinds) != self.n_nodes:
            raise ValueError("kinds must list one kind per node")
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ValueError(f"edge ({u}, {v}) out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add(key)

    def adjacency(self):
        adj = [[] for _ in range(self.n_nodes)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj


def _split_counts(n, parts):
    # Even split, earlier parts take the remainder: n=1000 -> 334, 333, 333.
    base, extra = divmod(n, parts)
    return [base + (1 if c < extra else 0) for c in range(parts)]


def gen_blobs(n, seed=0):
    """Mixture of three well-separated isotropic Gaussians, labels 0..2."""
    if n < 3:
        raise ValueError("n must be >= 3")
    rng = np.random.default_rng(seed)
    counts = _split_counts(n, 3)
    points = []
    labels = []
    for comp, count in enumerate(counts):
        points.append(_BLOB_CENTERS[comp] + _BLOB_STD * rng.standard_normal((count, 2)))
        labels.extend([comp] * count)
    return PointDataset(np.vstack(points), np.array(labels), name="blobs")


def gen_moons(n, noise_sd=0.05, seed=0):
    """Two interleaving half-circle moons, labels 0 (outer) and 1 (inner)."""
    if n < 3:
        raise ValueError("n must be >= 3")
    if noise_sd < 0:
        raise ValueError("noise_sd must be nonnegative")
    rng = np.random.default_rng(seed)
    n_out = n // 2
    n_in = n - n_out
    t_out = np.linspace(0.0, np.pi, n_out)
    t_in = np.linspace(0.0, np.pi, n_in)
    pts = np.vstack(
        [
            np.column_stack([np.cos(t_out), np.sin(t_out)]),
            np.column_stack([1.0 - np.cos(t_in), 0.5 - np.sin(t_in)]),
        ]
    )
    if noise_sd > 0:
        pts = pts + noise_sd * rng.standard_normal(pts.shape)
    labels = np.concatenate([np.zeros(n_out, dtype=np.int64), np.ones(n_in, dtype=np.int64)])
    return PointDataset(pts, labels, name="moons")


def gen_circles(n, factor=0.5, noise_sd=0.05, seed=0):
    """Two concentric circles, labels 0 (outer, radius 1) and 1 (radius factor)."""
    if n < 3:
        raise ValueError("n must be >= 3")
    if not 0.0 < factor < 1.0:
        raise ValueError("factor must lie strictly between 0 and 1")
    if noise_sd < 0:
        raise ValueError("noise_sd must be nonnegative")
    rng = np.random.default_rng(seed)
    n_out = n // 2
    n_in = n - n_out
    t_out = np.linspace(0.0, 2.0 * np.pi, n_out, endpoint=False)
    t_in = np.linspace(0.0, 2.0 * np.pi, n_in, endpoint=False)
    pts = np.vstack(
        [
            np.column_stack([np.cos(t_out), np.sin(t_out)]),
            factor * np.column_stack([np.cos(t_in), np.sin(t_in)]),
        ]
    )
    if noise_sd > 0:
        pts = pts + noise_sd * rng.standard_normal(pts.shape)
    labels = np.concatenate([np.zeros(n_out, dtype=np.int64), np.ones(n_in, dtype=np.int64)])
    return PointDataset(pts, labels, name="circles")


def gen_linear_order(n):
    """Linearly ordered classes: a path of n class nodes, one item each.

    Nodes 0..n-1 are items, nodes n..2n-1 the class path; item t hangs off
    class t, so hop distances grow with label distance.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    edges = [(n + t, n + t + 1) for t in range(n - 1)]
    edges += [(t, n + t) for t in range(n)]
    kinds = [NODE_ITEM] * n + [NODE_FINE] * n
    return RelationGraph(n_nodes=2 * n, edges=edges, kinds=kinds)


def gen_hierarchy(items_per_fine=1, fines_per_super=5, supers=20):
    """Two-level class tree: items -> fine classes -> super classes.

    Super-class nodes are joined pairwise so the whole graph stays
    connected (hop distances must be defined between any two nodes) while
    all super classes remain mutually equidistant.
    """
    if min(items_per_fine, fines_per_super, supers) < 1:
        raise ValueError("all counts must be >= 1")
    n_fine = fines_per_super * supers
    n_items = items_per_fine * n_fine
    fine_base = n_items
    super_base = n_items + n_fine
    edges = []
    for item in range(n_items):
        edges.append((item, fine_base + item // items_per_fine))
    for fine in range(n_fine):
        edges.append((fine_base + fine, super_base + fine // fines_per_super))
    for sup_a in range(supers):
        for sup_b in range(sup_a + 1, supers):
            edges.append((super_base + sup_a, super_base + sup_b))
    kinds = [NODE_ITEM] * n_items + [NODE_FINE] * n_fine + [NODE_SUPER] * supers
    return RelationGraph(n_nodes=super_base + supers, edges=edges, kinds=kinds)


def save_points(path, dataset):
    """Write a point dataset as CSV: header then ``x_0,..,x_{d-1}[,label]``."""
    cols = [f"x_{c}" for c in range(dataset.dim)]
    if dataset.labels is not None:
        cols.append("label")
    lines = [",".join(cols)]
    for row_idx in range(len(dataset)):
        cells = [f"{v:.17g}" for v in dataset.points[row_idx]]
        if dataset.labels is not None:
            cells.append(str(int(dataset.labels[row_idx])))
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _is_header(cells):
    try:
        float(cells[0])
    except ValueError:
        return True
    return False


def load_points(path, name=None):
    """Read a points CSV written by :func:`save_points` (header optional).

    Without a header every column is a coordinate; with a header a trailing
    ``label`` column is split off as integer class labels.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = [line.rstrip("\n") for line in fh]
    rows = [(no + 1, line) for no, line in enumerate(raw) if line.strip()]
    if not rows:
        raise DataError(f"{path}: empty points file")
    header = None
    first_cells = rows[0][1].split(",")
    if _is_header(first_cells):
        header = [c.strip() for c in first_cells]
        rows = rows[1:]
        if not rows:
            raise DataError(f"{path}: header but no data rows")
    has_label = header is not None and header[-1] == "label"
    width = len(header) if header is not None else len(rows[0][1].split(","))
    points = []
    labels = []
    for line_no, line in rows:
        cells = line.split(",")
        if len(cells) != width:
            raise DataError(
                f"{path}:{line_no}: expected {width} columns, found {len(cells)}"
            )
        try:
            if has_label:
                points.append([float(c) for c in cells[:-1]])
                labels.append(int(cells[-1]))
            else:
                points.append([float(c) for c in cells])
        except ValueError as exc:
            raise DataError(f"{path}:{line_no}: {exc}") from exc
    return PointDataset(
        np.array(points, dtype=np.float64),
        np.array(labels, dtype=np.int64) if has_label else None,
        name=name if name is not None else "",
    )


def save_graph(path, graph):
    """Write a relation graph as an edge list: ``u v kind_u kind_v`` lines."""
    lines = [f"{u} {v} {graph.kinds[u]} {graph.kinds[v]}" for u, v in graph.edges]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_graph(path):
    """Read an edge-list graph: ``u v [kind_u kind_v]``, ``#`` comments allowed."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = [line.rstrip("\n") for line in fh]
    edges = []
    kind_of = {}
    for line_no, line in enumerate(raw, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) not in (2, 4):
            raise DataError(
                f"{path}:{line_no}: expected 'u v' or 'u v kind_u kind_v'"
            )
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise DataError(f"{path}:{line_no}: {exc}") from exc
        if u < 0 or v < 0:
            raise DataError(f"{path}:{line_no}: negative node id")
        if len(parts) == 4:
            for node, kind in ((u, parts[2]), (v, parts[3])):
                if kind not in (NODE_ITEM, NODE_FINE, NODE_SUPER):
                    raise DataError(f"{path}:{line_no}: unknown node kind {kind!r}")
                if kind_of.get(node, kind) != kind:
                    raise DataError(f"{path}:{line_no}: conflicting kind for node {node}")
                kind_of[node] = kind
        edges.append((u, v))
    if not edges:
        raise DataError(f"{path}: empty graph file")
    n_nodes = max(max(u, v) for u, v in edges) + 1
    kinds = [kind_of.get(node, NODE_ITEM) for node in range(n_nodes)]
    try:
        return RelationGraph(n_nodes=n_nodes, edges=edges, kinds=kinds)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
