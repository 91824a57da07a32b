"""Gaussian ordinal embedding: learn per-item Gaussian distributions from
"j is closer to i than k" comparisons, score them, and draw them."""

from .datasets import (
    PointDataset,
    RelationGraph,
    gen_blobs,
    gen_circles,
    gen_hierarchy,
    gen_linear_order,
    gen_moons,
    load_graph,
    load_points,
    save_graph,
    save_points,
)
from .encoder import EncoderParams, load_params, save_params
from .estimator import GaussianOrdinalEmbedding
from .exceptions import DataError, NumericError
from .gaussian import (
    EmbeddingSet,
    GaussianEmbedding,
    bures_sq,
    energy_between,
    hellinger_sq,
    wasserstein2_sq,
    wasserstein2_sq_grad,
)
from .metrics import (
    kmeans,
    link_prediction_scores,
    pairs_from_triplets,
    procrustes_classic,
    procrustes_distributional,
    purity,
    triplet_error,
)
from .trainer import TrainConfig, TrainReport, load_embeddings, save_embeddings, train
from .triplets import (
    SamplingConfig,
    Triplet,
    apply_noise,
    budget_from_rule,
    load_triplets,
    oracle_from_graph,
    oracle_from_points,
    sample_graph_hop,
    sample_uniform,
    save_triplets,
    split_train_test,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "GaussianOrdinalEmbedding",
    "GaussianEmbedding",
    "EmbeddingSet",
    "EncoderParams",
    "PointDataset",
    "RelationGraph",
    "SamplingConfig",
    "Triplet",
    "TrainConfig",
    "TrainReport",
    "DataError",
    "NumericError",
    "wasserstein2_sq",
    "wasserstein2_sq_grad",
    "bures_sq",
    "hellinger_sq",
    "energy_between",
    "oracle_from_points",
    "oracle_from_graph",
    "budget_from_rule",
    "sample_uniform",
    "sample_graph_hop",
    "apply_noise",
    "split_train_test",
    "save_triplets",
    "load_triplets",
    "train",
    "save_embeddings",
    "load_embeddings",
    "save_params",
    "load_params",
    "triplet_error",
    "procrustes_classic",
    "procrustes_distributional",
    "kmeans",
    "purity",
    "link_prediction_scores",
    "pairs_from_triplets",
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
