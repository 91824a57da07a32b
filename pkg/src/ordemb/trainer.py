"""Hinge-loss training of the encoder with Adam.

Per triplet <i, j, k> with label y the loss is

    max(0, margin + y * (E_ij - E_ik)),    E_ab = W2^2(z_a, z_b),

so a +1 label drives item j at least ``margin`` closer to the anchor than
item k in squared 2-Wasserstein energy. Variances entering the loss pass
through a clipped forward to ``[SIGMA_FLOOR, clamp_c]``; encoder weights
themselves stay unconstrained. Optimization is minibatch Adam
(beta1=0.9, beta2=0.999, eps=1e-8) with inverse-time learning-rate decay
``lr / (1 + lr_decay * t)`` over optimizer steps t.

Embedding CSV format: header ``id,mu_0,..,mu_{d-1},sigma_0,..,sigma_{d-1}``,
one row per item, floats written with 17 significant digits (lossless for
float64).
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import encoder
from .exceptions import DataError, NumericError
from .gaussian import EmbeddingSet, wasserstein2_sq
from .validation import check_triplets

__all__ = [
    "SIGMA_FLOOR",
    "TrainConfig",
    "TrainReport",
    "energy",
    "hinge_loss",
    "clamp_sigma",
    "train",
    "save_embeddings",
    "load_embeddings",
]

SIGMA_FLOOR = 1e-6
_MIN_DELTA = 1e-4
_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8


@dataclass
class TrainConfig:
    """Dimensions, regularization, and optimizer settings for one run.

    ``clamp_c`` bounds every variance from above (default log 100);
    ``dirac`` pins all variances to the floor instead, which degenerates
    the run into a classic point-embedding baseline.
    """

    d: int = 2
    clamp_c: float = 4.605170185988092  # log(100)
    learning_rate: float = 0.01
    lr_decay: float = 1e-5
    batch_size: int = 256
    max_epochs: int = 200
    patience: int = 10
    margin: float = 1.0
    h_in: int = 50
    h_dim: int = 50
    dirac: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.d < 1 or self.h_in < 1 or self.h_dim < 1:
            raise ValueError("dimensions must be >= 1")
        if self.clamp_c <= 0 or self.learning_rate <= 0 or self.margin <= 0:
            raise ValueError("clamp_c, learning_rate, and margin must be positive")
        if self.lr_decay < 0:
            raise ValueError("lr_decay must be nonnegative")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ValueError("batch_size, max_epochs, and patience must be >= 1")
        if self.patience > self.max_epochs:
            raise ValueError("patience must not exceed max_epochs")

    @property
    def sigma_hi(self):
        return SIGMA_FLOOR if self.dirac else self.clamp_c


@dataclass
class TrainReport:
    """Per-epoch curves and final figures from one training run."""

    losses: list = field(default_factory=list)
    train_errors: list = field(default_factory=list)
    holdout_error: float | None = None
    epochs: int = 0
    wall_seconds: float = 0.0
    converged: bool = False


def energy(z_a, z_b):
    """Dissimilarity between two embedded items: their squared W2 distance."""
    return wasserstein2_sq(z_a, z_b)


def hinge_loss(triplet, emb, margin=1.0):
    """Margin loss of one labeled triplet against an embedding set.

    Zero exactly when ``y * (E_ij - E_ik) <= -margin``, i.e. the labeled
    ordering holds with the full margin of slack.
    """
    i, j, k, y = (int(v) for v in triplet)
    e_ij = energy(emb.item(i), emb.item(j))
    e_ik = energy(emb.item(i), emb.item(k))
    return max(0.0, margin + y * (e_ij - e_ik))


def clamp_sigma(sigma, clamp_c):
    """Clip positive variances into ``[SIGMA_FLOOR, clamp_c]``."""
    arr = np.asarray(sigma, dtype=np.float64)
    if np.any(arr <= 0.0):
        raise ValueError("sigma entries must be strictly positive")
    return np.clip(arr, SIGMA_FLOOR, clamp_c)


def _energies(mu, sig_root, a, b):
    dmu = mu[a] - mu[b]
    droot = sig_root[a] - sig_root[b]
    return np.sum(dmu * dmu, axis=1) + np.sum(droot * droot, axis=1)


def _triplet_error_arrays(arr, mu, sigma):
    root = np.sqrt(sigma)
    e_ij = _energies(mu, root, arr[:, 0], arr[:, 1])
    e_ik = _energies(mu, root, arr[:, 0], arr[:, 2])
    diff = arr[:, 3] * (e_ij - e_ik)
    return float(np.mean((diff > 0) | (e_ij == e_ik)))


def _loss_and_error(arr, mu, sigma, margin):
    """Full-set mean hinge loss and triplet error at one parameter state.

    Sharing the snapshot keeps the pair coherent: zero loss means every
    margin holds, which forces a zero error.
    """
    root = np.sqrt(sigma)
    e_ij = _energies(mu, root, arr[:, 0], arr[:, 1])
    e_ik = _energies(mu, root, arr[:, 0], arr[:, 2])
    diff = arr[:, 3] * (e_ij - e_ik)
    loss = float(np.mean(np.maximum(margin + diff, 0.0)))
    err = float(np.mean((diff > 0) | (e_ij == e_ik)))
    return loss, err


def _clamped_embeddings(params, lo, hi):
    mu, sigma = encoder.forward_all(params)
    return mu, np.clip(sigma, lo, hi)


def train(triplets, n, config, holdout=None):
    """Fit the encoder to labeled triplets over ``n`` items.

    Returns ``(params, embeddings, report)`` where ``embeddings`` is the
    final clamped :class:`EmbeddingSet` for all items. Training stops at
    ``max_epochs`` or once the epoch loss has failed to improve by 1e-4
    for ``patience`` consecutive epochs (reported as ``converged``). If
    ``holdout`` triplets are given, their final triplet error lands in the
    report. Fully deterministic in ``config.seed``.
    """
    arr = check_triplets(triplets, n_items=n)
    if holdout is not None:
        holdout = check_triplets(holdout, n_items=n)
    params = encoder.init(n, config.d, config.h_in, config.h_dim, seed=config.seed)
    shuffle_rng = np.random.default_rng(config.seed)
    lo, hi = SIGMA_FLOOR, config.sigma_hi

    blocks = params.trainable_blocks()
    m_state = [np.zeros_like(b) for b in blocks]
    v_state = [np.zeros_like(b) for b in blocks]
    step = 0

    report = TrainReport()
    best_loss = np.inf
    stall = 0
    m_total = arr.shape[0]
    t_start = time.perf_counter()

    idx3 = np.ascontiguousarray(arr[:, :3])
    y_all = arr[:, 3].astype(np.float64)
    d = config.d
    col = np.arange(d)

    for epoch in range(1, config.max_epochs + 1):
        order = shuffle_rng.permutation(m_total)
        idx3_ep = idx3[order]
        y_ep = y_all[order]
        for start in range(0, m_total, config.batch_size):
            batch = idx3_ep[start : start + config.batch_size]
            y = y_ep[start : start + config.batch_size]
            bsz = batch.shape[0]
            items, inv = np.unique(batch.ravel(), return_inverse=True)
            inv = inv.reshape(bsz, 3)
            ii, jj, kk = inv[:, 0], inv[:, 1], inv[:, 2]

            codes, h_pre, h, mu, sigma_raw = encoder._forward_raw(params, items)
            sigma = np.clip(sigma_raw, lo, hi)
            root = np.sqrt(sigma)

            e_ij = _energies(mu, root, ii, jj)
            e_ik = _energies(mu, root, ii, kk)
            margins = config.margin + y * (e_ij - e_ik)
            if not np.all(np.isfinite(margins)):
                raise NumericError(
                    f"non-finite loss at epoch {epoch}, step {step + 1}"
                )

            # dL/dE_ij = coef, dL/dE_ik = -coef for the mean batch loss.
            coef = np.where(margins > 0.0, y, 0.0)[:, None] / bsz
            dmu_ij = 2.0 * (mu[ii] - mu[jj])
            dmu_ik = 2.0 * (mu[ii] - mu[kk])
            scatter_pos = np.concatenate([ii, jj, ii, kk])
            mu_vals = np.concatenate(
                [coef * dmu_ij, -coef * dmu_ij, -coef * dmu_ik, coef * dmu_ik]
            )
            g_mu = np.bincount(
                (scatter_pos[:, None] * d + col).ravel(),
                weights=mu_vals.ravel(),
                minlength=items.size * d,
            ).reshape(items.size, d)

            if config.dirac:
                g_sig_raw = np.zeros_like(sigma)
            else:
                droot_ij = root[ii] - root[jj]
                droot_ik = root[ii] - root[kk]
                sig_vals = np.concatenate(
                    [
                        coef * (droot_ij / root[ii]),
                        coef * (-droot_ij / root[jj]),
                        -coef * (droot_ik / root[ii]),
                        -coef * (-droot_ik / root[kk]),
                    ]
                )
                g_sig = np.bincount(
                    (scatter_pos[:, None] * d + col).ravel(),
                    weights=sig_vals.ravel(),
                    minlength=items.size * d,
                ).reshape(items.size, d)
                # Projection rule at the clamp: interior entries pass their
                # gradient, boundary entries only one pointing back inside
                # (the update is -lr*g, so g > 0 shrinks sigma). A hard zero
                # outside would strand entries beyond the bound forever.
                interior = (sigma_raw > lo) & (sigma_raw < hi)
                re_enter = ((sigma_raw >= hi) & (g_sig > 0.0)) | (
                    (sigma_raw <= lo) & (g_sig < 0.0)
                )
                g_sig_raw = np.where(interior | re_enter, g_sig, 0.0)

            grads = encoder._backward_core(
                params, codes, h_pre, h, sigma_raw, g_mu, g_sig_raw
            )
            step += 1
            lr_t = config.learning_rate / (1.0 + config.lr_decay * step)
            bc1 = 1.0 - _ADAM_BETA1**step
            bc2 = 1.0 - _ADAM_BETA2**step
            for block, m_st, v_st, grad in zip(blocks, m_state, v_state, grads.blocks()):
                m_st *= _ADAM_BETA1
                m_st += (1.0 - _ADAM_BETA1) * grad
                v_st *= _ADAM_BETA2
                v_st += (1.0 - _ADAM_BETA2) * np.square(grad)
                block -= lr_t * (m_st / bc1) / (np.sqrt(v_st / bc2) + _ADAM_EPS)

        mu_all, sigma_all = _clamped_embeddings(params, lo, hi)
        epoch_loss, epoch_err = _loss_and_error(arr, mu_all, sigma_all, config.margin)
        report.losses.append(epoch_loss)
        report.train_errors.append(epoch_err)
        report.epochs = epoch

        if epoch_loss < best_loss - _MIN_DELTA:
            best_loss = epoch_loss
            stall = 0
        else:
            stall += 1
            if stall >= config.patience:
                report.converged = True
                break

    mu_all, sigma_all = _clamped_embeddings(params, lo, hi)
    embeddings = EmbeddingSet(mu_all, sigma_all)
    if holdout is not None:
        report.holdout_error = _triplet_error_arrays(holdout, mu_all, sigma_all)
    report.wall_seconds = time.perf_counter() - t_start
    return params, embeddings, report


def save_embeddings(path, emb):
    """Write an embedding set in the CSV format of the module docstring."""
    d = emb.dim
    header = (
        "id,"
        + ",".join(f"mu_{c}" for c in range(d))
        + ","
        + ",".join(f"sigma_{c}" for c in range(d))
    )
    lines = [header]
    for i in range(len(emb)):
        cells = [str(i)]
        cells += [f"{v:.17g}" for v in emb.mu[i]]
        cells += [f"{v:.17g}" for v in emb.sigma[i]]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_embeddings(path):
    """Read an embedding CSV back into an :class:`EmbeddingSet`."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = [line.rstrip("\n") for line in fh if line.strip()]
    if len(raw) < 2:
        raise DataError(f"{path}: empty embedding file")
    header = raw[0].split(",")
    if header[0] != "id" or (len(header) - 1) % 2 != 0:
        raise DataError(f"{path}: malformed embedding header")
    d = (len(header) - 1) // 2
    expected = (
        ["id"]
        + [f"mu_{c}" for c in range(d)]
        + [f"sigma_{c}" for c in range(d)]
    )
    if header != expected:
        raise DataError(f"{path}: unexpected embedding columns {header}")
    mu = np.empty((len(raw) - 1, d))
    sigma = np.empty((len(raw) - 1, d))
    for row_idx, line in enumerate(raw[1:], start=0):
        cells = line.split(",")
        if len(cells) != 1 + 2 * d:
            raise DataError(f"{path}:{row_idx + 2}: expected {1 + 2 * d} columns")
        try:
            if int(cells[0]) != row_idx:
                raise DataError(
                    f"{path}:{row_idx + 2}: ids must be 0..n-1 in order"
                )
            mu[row_idx] = [float(c) for c in cells[1 : 1 + d]]
            sigma[row_idx] = [float(c) for c in cells[1 + d :]]
        except ValueError as exc:
            raise DataError(f"{path}:{row_idx + 2}: {exc}") from exc
    try:
        return EmbeddingSet(mu, sigma)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
