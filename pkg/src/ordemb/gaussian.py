"""Gaussian embeddings and closed-form distances between them.

An item is represented as a Gaussian with a location vector ``mu`` and a
diagonal covariance given by the variance vector ``sigma``. The squared
2-Wasserstein distance between two such Gaussians splits into a squared
Euclidean term on the locations plus a covariance term: the squared Bures
metric in general, which for diagonal covariances reduces to the squared
Hellinger distance between the variance vectors,

    W2^2 = ||mu_x - mu_y||^2 + sum_k (sqrt(sigma_x[k]) - sqrt(sigma_y[k]))^2.

All functions are pure and safe to call concurrently.
"""

from dataclasses import dataclass

import numpy as np

from .validation import check_cov, check_nonneg_vector, check_points, check_vector

__all__ = [
    "GaussianEmbedding",
    "EmbeddingSet",
    "wasserstein2_sq",
    "bures_sq",
    "hellinger_sq",
    "wasserstein2_sq_grad",
    "energy_between",
]


@dataclass
class GaussianEmbedding:
    """One embedded item: location ``mu`` and diagonal variances ``sigma``.

    Both fields are 1-D float64 arrays of equal length d >= 1; ``sigma``
    must be entrywise nonnegative and finite.
    """

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        self.mu = check_vector(self.mu, "mu")
        self.sigma = check_nonneg_vector(self.sigma, "sigma")
        if self.mu.shape != self.sigma.shape:
            raise ValueError("mu and sigma must have the same length")

    @property
    def dim(self):
        return self.mu.shape[0]


@dataclass
class EmbeddingSet:
    """Gaussian embeddings for n items, stored as (n, d) arrays."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        self.mu = check_points(self.mu, "mu")
        self.sigma = check_points(self.sigma, "sigma")
        if self.mu.shape != self.sigma.shape:
            raise ValueError("mu and sigma must have the same shape")
        if np.any(self.sigma < 0):
            raise ValueError("sigma must be entrywise nonnegative")

    def __len__(self):
        return self.mu.shape[0]

    @property
    def dim(self):
        return self.mu.shape[1]

    def item(self, i):
        return GaussianEmbedding(self.mu[i].copy(), self.sigma[i].copy())

    def features(self):
        """Per-item feature vectors: mu and sigma concatenated, shape (n, 2d)."""
        return np.hstack([self.mu, self.sigma])


def _check_pair(x, y):
    if not isinstance(x, GaussianEmbedding) or not isinstance(y, GaussianEmbedding):
        raise ValueError("expected GaussianEmbedding arguments")
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")


def wasserstein2_sq(x, y):
    """Squared 2-Wasserstein distance between two diagonal Gaussians.

    Returns ``||mu_x - mu_y||^2 + hellinger_sq(sigma_x, sigma_y)``, which is
    symmetric in its arguments and zero exactly when the embeddings agree.
    For zero variances it reduces to the squared Euclidean distance of the
    locations.
    """
    _check_pair(x, y)
    dmu = x.mu - y.mu
    droot = np.sqrt(x.sigma) - np.sqrt(y.sigma)
    return float(dmu @ dmu + droot @ droot)


def hellinger_sq(d_a, d_b):
    """Squared Hellinger distance between two nonnegative variance vectors."""
    d_a = check_nonneg_vector(d_a, "d_a")
    d_b = check_nonneg_vector(d_b, "d_b")
    if d_a.shape != d_b.shape:
        raise ValueError("variance vectors must have the same length")
    droot = np.sqrt(d_a) - np.sqrt(d_b)
    return float(droot @ droot)


def _psd_sqrt(A):
    # Symmetric eigendecomposition with eigenvalue clipping at zero keeps
    # the square root real for near-singular PSD inputs.
    eigvals, eigvecs = np.linalg.eigh(A)
    eigvals = np.clip(eigvals, 0.0, None)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T


def bures_sq(A, B):
    """Squared Bures metric between two PSD covariance matrices.

    Computed as ``Tr(A) + Tr(B) - 2 Tr((A^{1/2} B A^{1/2})^{1/2})`` with
    matrix square roots via symmetric eigendecomposition. For diagonal
    inputs this equals ``hellinger_sq`` of the diagonals.
    """
    A = check_cov(A, "A")
    B = check_cov(B, "B")
    if A.shape != B.shape:
        raise ValueError("covariance matrices must have the same shape")
    root_a = _psd_sqrt(A)
    inner = root_a @ B @ root_a
    eigvals = np.clip(np.linalg.eigvalsh(0.5 * (inner + inner.T)), 0.0, None)
    val = np.trace(A) + np.trace(B) - 2.0 * np.sum(np.sqrt(eigvals))
    # Rounding can leave a tiny negative residue on coinciding inputs.
    return float(max(val, 0.0))


def wasserstein2_sq_grad(x, y):
    """Analytic gradient of ``wasserstein2_sq`` with respect to both arguments.

    Returns ``(d_mu_x, d_sigma_x, d_mu_y, d_sigma_y)``. The variance part
    differentiates the Hellinger term, so every sigma entry must be strictly
    positive; a zero entry is rejected because the square root is not
    differentiable there.
    """
    _check_pair(x, y)
    if np.any(x.sigma == 0.0) or np.any(y.sigma == 0.0):
        raise ValueError("sigma entries must be strictly positive for gradients")
    root_x = np.sqrt(x.sigma)
    root_y = np.sqrt(y.sigma)
    d_mu_x = 2.0 * (x.mu - y.mu)
    d_sigma_x = (root_x - root_y) / root_x
    return d_mu_x, d_sigma_x, -d_mu_x, (root_y - root_x) / root_y


def energy_between(emb, idx_a, idx_b):
    """Vectorized squared 2-Wasserstein energies between item index arrays.

    ``idx_a`` and ``idx_b`` are broadcastable integer arrays; the result has
    their broadcast shape.
    """
    idx_a = np.asarray(idx_a, dtype=np.intp)
    idx_b = np.asarray(idx_b, dtype=np.intp)
    dmu = emb.mu[idx_a] - emb.mu[idx_b]
    droot = np.sqrt(emb.sigma[idx_a]) - np.sqrt(emb.sigma[idx_b])
    return np.sum(dmu * dmu, axis=-1) + np.sum(droot * droot, axis=-1)
