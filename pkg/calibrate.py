"""Scratch calibration for acceptance-scale runs (not part of the package)."""

import time

import numpy as np

from ordemb.datasets import gen_blobs, gen_linear_order
from ordemb.metrics import kmeans, purity, procrustes_distributional, triplet_error
from ordemb.trainer import TrainConfig, train
from ordemb.triplets import (
    apply_noise,
    budget_from_rule,
    make_graph_oracle,
    make_point_oracle,
    sample_uniform,
    split_train_test,
)


def blobs_run(seed, p, eps):
    ds = gen_blobs(500, seed=seed)
    budget = budget_from_rule(500, 2, p)
    t0 = time.perf_counter()
    sample = sample_uniform(500, budget, make_point_oracle(ds), seed=seed)
    t_sample = time.perf_counter() - t0
    train_part, test_part = split_train_test(sample)
    train_part = apply_noise(train_part, eps, seed=seed)
    config = TrainConfig(d=2, seed=seed)
    params, emb, report = train(train_part, 500, config, holdout=test_part)
    sigma_trace = float(np.mean(np.sum(emb.sigma, axis=1)))
    dp = procrustes_distributional(ds.points, emb)
    clusters = kmeans(emb.features(), 3, seed=seed)
    pur = purity(clusters, ds.labels)
    print(
        f"blobs seed={seed} p={p} eps={eps}: sample={t_sample:.1f}s "
        f"train={report.wall_seconds:.1f}s epochs={report.epochs} "
        f"holdout={report.holdout_error:.4f} trace={sigma_trace:.4f} "
        f"dP*={dp:.4f} purity={pur:.3f} converged={report.converged}",
        flush=True,
    )
    return report, sigma_trace, dp, pur


def linear_run(seed, eps, p=2):
    graph = gen_linear_order(500)
    n = graph.n_nodes
    budget = budget_from_rule(n, 2, p)
    t0 = time.perf_counter()
    sample = sample_uniform(n, budget, make_graph_oracle(graph), seed=seed)
    t_sample = time.perf_counter() - t0
    train_part, test_part = split_train_test(sample)
    noisy_train = apply_noise(train_part, eps, seed=seed)
    config = TrainConfig(d=2, seed=seed)
    params, emb, report = train(noisy_train, n, config, holdout=test_part)
    err_clean = triplet_error(test_part, emb)
    print(
        f"linear seed={seed} eps={eps} p={p}: sample={t_sample:.1f}s "
        f"train={report.wall_seconds:.1f}s epochs={report.epochs} "
        f"err_clean={err_clean:.4f} converged={report.converged}",
        flush=True,
    )
    return err_clean


if __name__ == "__main__":
    t_all = time.perf_counter()
    print("== blobs p=4 eps=0 (criterion 1/6) ==", flush=True)
    for seed in (0, 1, 2):
        blobs_run(seed, 4, 0.0)
    print("== blobs p=1 eps=0 (criterion 4/5) ==", flush=True)
    for seed in (0, 1, 2):
        blobs_run(seed, 1, 0.0)
    print("== blobs p=4 eps=0.2 (criterion 3) ==", flush=True)
    for seed in (0, 1, 2):
        blobs_run(seed, 4, 0.2)
    print("== linear order (criterion 2) ==", flush=True)
    for eps in (0.0, 0.1, 0.2, 0.3):
        errs = [linear_run(seed, eps) for seed in (0, 1, 2)]
        print(f"eps={eps}: mean_err={np.mean(errs):.4f}", flush=True)
    print(f"total {time.perf_counter() - t_all:.0f}s", flush=True)
