"""Item encoder: fixed random codes -> one relu layer -> Gaussian parameters.

Each item i owns a fixed standard-normal code vector drawn once at init.
The code passes through a single relu trunk and two linear heads:

    h     = relu(code @ W + b)
    mu    = h @ W_mu + b_mu
    sigma = exp(h @ W_sigma + b_sigma)

The exponential keeps every variance strictly positive. Weights start
Xavier-uniform, biases at zero, and the codes are never updated.

Checkpoint format (``save_params`` / ``load_params``): a single binary
file, magic ``b"OEP1"``, four little-endian uint64 dims ``n, d, h_in,
h_dim``, then row-major little-endian float64 blocks in the order
``codes, W, b, W_mu, b_mu, W_sigma, b_sigma``. Round-trips are exact at
64-bit precision.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DataError
from .gaussian import GaussianEmbedding

__all__ = [
    "EncoderParams",
    "EncoderGrads",
    "init",
    "forward",
    "forward_all",
    "backward",
    "backward_batch",
    "save_params",
    "load_params",
]

_MAGIC = b"OEP1"
_BLOCK_ORDER = ("codes", "W", "b", "W_mu", "b_mu", "W_sigma", "b_sigma")


@dataclass
class EncoderParams:
    """Trainable weights plus the fixed per-item input codes."""

    W: np.ndarray
    b: np.ndarray
    W_mu: np.ndarray
    b_mu: np.ndarray
    W_sigma: np.ndarray
    b_sigma: np.ndarray
    codes: np.ndarray

    @property
    def n_items(self):
        return self.codes.shape[0]

    @property
    def h_in(self):
        return self.codes.shape[1]

    @property
    def h_dim(self):
        return self.W.shape[1]

    @property
    def dim(self):
        return self.W_mu.shape[1]

    def trainable_blocks(self):
        """Blocks touched by optimization, in a fixed order (codes excluded)."""
        return [self.W, self.b, self.W_mu, self.b_mu, self.W_sigma, self.b_sigma]


@dataclass
class EncoderGrads:
    """Gradients for every trainable block of :class:`EncoderParams`."""

    W: np.ndarray
    b: np.ndarray
    W_mu: np.ndarray
    b_mu: np.ndarray
    W_sigma: np.ndarray
    b_sigma: np.ndarray

    def blocks(self):
        return [self.W, self.b, self.W_mu, self.b_mu, self.W_sigma, self.b_sigma]


def _xavier_uniform(rng, fan_in, fan_out):
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def init(n, d, h_in=50, h_dim=50, seed=0):
    """Fresh encoder parameters: Xavier-uniform weights, zero biases,
    standard-normal codes. Deterministic in the seed."""
    if min(n, d, h_in, h_dim) < 1:
        raise ValueError("all dimensions must be >= 1")
    rng = np.random.default_rng(seed)
    return EncoderParams(
        W=_xavier_uniform(rng, h_in, h_dim),
        b=np.zeros(h_dim),
        W_mu=_xavier_uniform(rng, h_dim, d),
        b_mu=np.zeros(d),
        W_sigma=_xavier_uniform(rng, h_dim, d),
        b_sigma=np.zeros(d),
        codes=rng.standard_normal((n, h_in)),
    )


def _forward_raw(params, idx):
    """Forward pass for an index array; returns all intermediates."""
    codes = params.codes[idx]
    h_pre = codes @ params.W + params.b
    h = np.maximum(h_pre, 0.0)
    mu = h @ params.W_mu + params.b_mu
    sigma = np.exp(h @ params.W_sigma + params.b_sigma)
    return codes, h_pre, h, mu, sigma


def forward(params, i):
    """Gaussian embedding of item ``i``."""
    if not 0 <= i < params.n_items:
        raise ValueError(f"item index {i} out of range for {params.n_items} items")
    _, _, _, mu, sigma = _forward_raw(params, np.array([i]))
    return GaussianEmbedding(mu[0], sigma[0])


def forward_all(params, idx=None):
    """(mu, sigma) arrays for all items, or for an index array if given."""
    if idx is None:
        idx = np.arange(params.n_items)
    else:
        idx = np.asarray(idx, dtype=np.intp)
        if idx.size and (idx.min() < 0 or idx.max() >= params.n_items):
            raise ValueError("item index out of range")
    _, _, _, mu, sigma = _forward_raw(params, idx)
    return mu, sigma


def _backward_core(params, codes, h_pre, h, sigma, grad_mu, grad_sigma):
    """Gradient assembly from precomputed forward intermediates."""
    g_sig_pre = grad_sigma * sigma
    g_h = grad_mu @ params.W_mu.T + g_sig_pre @ params.W_sigma.T
    g_h_pre = np.where(h_pre > 0.0, g_h, 0.0)
    return EncoderGrads(
        W=codes.T @ g_h_pre,
        b=g_h_pre.sum(axis=0),
        W_mu=h.T @ grad_mu,
        b_mu=grad_mu.sum(axis=0),
        W_sigma=h.T @ g_sig_pre,
        b_sigma=g_sig_pre.sum(axis=0),
    )


def backward_batch(params, idx, grad_mu, grad_sigma):
    """Accumulated parameter gradients for a batch of items.

    ``grad_mu`` and ``grad_sigma`` hold the upstream gradients with respect
    to each item's mu and (post-exp) sigma. Intermediates are recomputed
    here rather than cached, so memory stays independent of n. The relu
    gate passes gradient only where the pre-activation is strictly
    positive; the exp chain multiplies the sigma gradient by sigma itself.
    Codes are fixed inputs and receive no gradient.
    """
    idx = np.asarray(idx, dtype=np.intp)
    grad_mu = np.asarray(grad_mu, dtype=np.float64)
    grad_sigma = np.asarray(grad_sigma, dtype=np.float64)
    if grad_mu.shape != (idx.shape[0], params.dim) or grad_sigma.shape != grad_mu.shape:
        raise ValueError("upstream gradient shapes must be (len(idx), d)")
    codes, h_pre, h, _, sigma = _forward_raw(params, idx)
    return _backward_core(params, codes, h_pre, h, sigma, grad_mu, grad_sigma)


def backward(params, i, grad_mu, grad_sigma):
    """Parameter gradients from one item's upstream (mu, sigma) gradients."""
    if not 0 <= i < params.n_items:
        raise ValueError(f"item index {i} out of range for {params.n_items} items")
    grad_mu = np.asarray(grad_mu, dtype=np.float64).reshape(1, -1)
    grad_sigma = np.asarray(grad_sigma, dtype=np.float64).reshape(1, -1)
    if grad_mu.shape[1] != params.dim or grad_sigma.shape[1] != params.dim:
        raise ValueError(f"upstream gradients must have length d={params.dim}")
    return backward_batch(params, np.array([i]), grad_mu, grad_sigma)


def _blocks_dict(params):
    return {
        "codes": params.codes,
        "W": params.W,
        "b": params.b,
        "W_mu": params.W_mu,
        "b_mu": params.b_mu,
        "W_sigma": params.W_sigma,
        "b_sigma": params.b_sigma,
    }


def save_params(path, params):
    """Write the checkpoint format described in the module docstring."""
    dims = np.array(
        [params.n_items, params.dim, params.h_in, params.h_dim], dtype="<u8"
    )
    blocks = _blocks_dict(params)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(dims.tobytes())
        for key in _BLOCK_ORDER:
            fh.write(np.ascontiguousarray(blocks[key], dtype="<f8").tobytes())


def load_params(path):
    """Read a checkpoint written by :func:`save_params`."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != _MAGIC:
        raise DataError(f"{path}: not an encoder checkpoint (bad magic)")
    dims = np.frombuffer(blob, dtype="<u8", count=4, offset=4)
    n, d, h_in, h_dim = (int(v) for v in dims)
    shapes = {
        "codes": (n, h_in),
        "W": (h_in, h_dim),
        "b": (h_dim,),
        "W_mu": (h_dim, d),
        "b_mu": (d,),
        "W_sigma": (h_dim, d),
        "b_sigma": (d,),
    }
    offset = 4 + 4 * 8
    blocks = {}
    for key in _BLOCK_ORDER:
        shape = shapes[key]
        count = int(np.prod(shape))
        if offset + count * 8 > len(blob):
            raise DataError(f"{path}: truncated checkpoint in block {key}")
        blocks[key] = (
            np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
            .reshape(shape)
            .copy()
        )
        offset += count * 8
    if offset != len(blob):
        raise DataError(f"{path}: {len(blob) - offset} trailing bytes")
    return EncoderParams(**blocks)
