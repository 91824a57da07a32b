"""Scikit-learn style estimator around the triplet trainer.

The estimator consumes labeled triplet comparisons instead of a feature
matrix: ``fit`` takes an (m, 3) or (m, 4) integer array of rows
``i, j, k[, y]`` (missing labels default to +1, "j is closer"). After
fitting, each item owns a Gaussian embedding; ``transform`` exposes the
concatenated (mu, sigma) feature vectors so the result drops into
standard clustering or classification pipelines, and ``predict`` answers
new triplet queries from the learned energies.
"""

import numpy as np
from sklearn.base import BaseEstimator

from .gaussian import energy_between
from .metrics import triplet_error
from .trainer import TrainConfig, train
from .validation import check_triplets

__all__ = ["GaussianOrdinalEmbedding"]


class GaussianOrdinalEmbedding(BaseEstimator):
    """Learn Gaussian item embeddings from ordinal triplet comparisons.

    Parameters
    ----------
    n_components : int
        Embedding dimensionality d.
    n_items : int or None
        Number of items; inferred as ``max index + 1`` when None.
    clamp : float
        Upper bound applied to every learned variance.
    learning_rate, lr_decay, batch_size, max_epochs, patience, margin :
        Optimizer settings, passed through to the trainer.
    hidden_dim, code_dim : int
        Width of the encoder trunk and of the fixed random input codes.
    dirac : bool
        Pin variances to the floor, reducing to a point-embedding baseline.
    random_state : int
        Seed controlling initialization and batch order.

    Attributes
    ----------
    mu_ : ndarray of shape (n_items, n_components)
        Learned locations.
    sigma_ : ndarray of shape (n_items, n_components)
        Learned diagonal variances.
    embedding_ : EmbeddingSet
        Both together, as consumed by the metric helpers.
    report_ : TrainReport
        Loss/error curves from the fit.
    """

    def __init__(
        self,
        n_components=2,
        n_items=None,
        clamp=4.605170185988092,
        learning_rate=0.01,
        lr_decay=1e-5,
        batch_size=256,
        max_epochs=200,
        patience=10,
        margin=1.0,
        hidden_dim=50,
        code_dim=50,
        dirac=False,
        random_state=0,
    ):
        self.n_components = n_components
        self.n_items = n_items
        self.clamp = clamp
        self.learning_rate = learning_rate
        self.lr_decay = lr_decay
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.patience = patience
        self.margin = margin
        self.hidden_dim = hidden_dim
        self.code_dim = code_dim
        self.dirac = dirac
        self.random_state = random_state

    def _config(self):
        return TrainConfig(
            d=self.n_components,
            clamp_c=self.clamp,
            learning_rate=self.learning_rate,
            lr_decay=self.lr_decay,
            batch_size=self.batch_size,
            max_epochs=self.max_epochs,
            patience=self.patience,
            margin=self.margin,
            h_in=self.code_dim,
            h_dim=self.hidden_dim,
            dirac=self.dirac,
            seed=self.random_state,
        )

    def fit(self, X, y=None):
        """Fit item embeddings to triplet rows ``i, j, k[, label]``."""
        arr = check_triplets(X, n_items=self.n_items)
        n = self.n_items if self.n_items is not None else int(arr[:, :3].max()) + 1
        self.encoder_params_, self.embedding_, self.report_ = train(
            arr, n, self._config()
        )
        self.mu_ = self.embedding_.mu
        self.sigma_ = self.embedding_.sigma
        self.n_items_ = n
        return self

    def _require_fitted(self):
        if not hasattr(self, "embedding_"):
            raise ValueError("estimator is not fitted; call fit first")

    def transform(self, X=None):
        """Concatenated (mu, sigma) features, for all items or an index array."""
        self._require_fitted()
        feats = self.embedding_.features()
        if X is None:
            return feats
        idx = np.asarray(X, dtype=np.intp).ravel()
        if idx.size and (idx.min() < 0 or idx.max() >= self.n_items_):
            raise ValueError("item index out of range")
        return feats[idx]

    def fit_transform(self, X, y=None):
        return self.fit(X).transform()

    def predict(self, X):
        """Predicted labels for triplet queries: +1 when j sits closer to i.

        Exact energy ties predict -1; a tied model answer never counts as
        the oracle's +1.
        """
        self._require_fitted()
        arr = check_triplets(X, n_items=self.n_items_)
        e_ij = energy_between(self.embedding_, arr[:, 0], arr[:, 1])
        e_ik = energy_between(self.embedding_, arr[:, 0], arr[:, 2])
        return np.where(e_ij < e_ik, 1, -1).astype(np.int64)

    def score(self, X, y=None):
        """Fraction of labeled triplets the embedding satisfies (1 - error)."""
        self._require_fitted()
        return 1.0 - triplet_error(X, self.embedding_)
