"""CLI subcommand tests: formats, exit codes, reproducibility, pipelines."""

import re

import numpy as np
import pytest

from ordemb.cli import (
    EXIT_DATA,
    EXIT_NO_PLATEAU,
    EXIT_OK,
    EXIT_USAGE,
    main,
)
from ordemb.gaussian import EmbeddingSet
from ordemb.svgplot import render_svg
from ordemb.trainer import load_embeddings, save_embeddings
from ordemb.triplets import budget_from_rule, load_triplets


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture()
def blob_files(tmp_path):
    points = tmp_path / "points.csv"
    assert run("gen", "blobs", "--n", 60, "--seed", 7, "--out", points) == EXIT_OK
    triplets = tmp_path / "triplets.csv"
    assert (
        run("triplets", "--points", points, "--p", 2, "--seed", 3, "--out", triplets)
        == EXIT_OK
    )
    return points, triplets


class TestGen:
    def test_blobs_row_count(self, tmp_path):
        out = tmp_path / "points.csv"
        assert run("gen", "blobs", "--n", 1000, "--seed", 7, "--out", out) == EXIT_OK
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 1001  # header + rows

    def test_hierarchy_has_twenty_super_nodes(self, tmp_path):
        out = tmp_path / "graph.edges"
        assert run("gen", "hierarchy", "--out", out) == EXIT_OK
        supers = set()
        for line in out.read_text().strip().split("\n"):
            u, v, ku, kv = line.split()
            if ku == "super":
                supers.add(u)
            if kv == "super":
                supers.add(v)
        assert len(supers) == 20

    def test_unknown_generator_is_usage_error(self, tmp_path):
        assert run("gen", "spirals", "--out", tmp_path / "x.csv") == EXIT_USAGE

    def test_missing_out_is_usage_error(self):
        assert run("gen", "blobs") == EXIT_USAGE

    def test_deterministic_bytes(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        run("gen", "moons", "--n", 50, "--seed", 5, "--out", a)
        run("gen", "moons", "--n", 50, "--seed", 5, "--out", b)
        assert a.read_bytes() == b.read_bytes()


class TestTriplets:
    def test_budget_and_split_sizes(self, blob_files):
        _, triplets = blob_files
        full = load_triplets(triplets)
        train = load_triplets(f"{triplets}.train")
        test = load_triplets(f"{triplets}.test")
        budget = budget_from_rule(60, 2, 2)
        assert full.shape[0] == budget
        assert train.shape[0] == int(0.9 * budget)
        assert train.shape[0] + test.shape[0] == budget

    def test_noise_changes_expected_fraction(self, blob_files, tmp_path):
        points, triplets = blob_files
        noisy = tmp_path / "noisy.csv"
        assert (
            run(
                "triplets", "--points", points, "--p", 2, "--eps", 0.2,
                "--seed", 3, "--out", noisy,
            )
            == EXIT_OK
        )
        clean = load_triplets(triplets)
        flipped = load_triplets(noisy)
        np.testing.assert_array_equal(clean[:, :3], flipped[:, :3])
        frac = np.mean(clean[:, 3] != flipped[:, 3])
        assert 0.15 <= frac <= 0.25

    def test_graph_hop_strategy(self, tmp_path):
        graph = tmp_path / "graph.edges"
        run("gen", "linear", "--n", 12, "--out", graph)
        out = tmp_path / "t.csv"
        assert (
            run(
                "triplets", "--graph", graph, "--strategy", "graph_hop",
                "--p", 0.5, "--seed", 1, "--out", out,
            )
            == EXIT_OK
        )
        arr = load_triplets(out)
        assert np.all(arr[:, 3] == 1)

    def test_points_and_graph_together_rejected(self, blob_files, tmp_path):
        points, _ = blob_files
        assert (
            run(
                "triplets", "--points", points, "--graph", points,
                "--out", tmp_path / "t.csv",
            )
            == EXIT_USAGE
        )

    def test_missing_file_is_data_error(self, tmp_path):
        assert (
            run("triplets", "--points", tmp_path / "nope.csv", "--out", tmp_path / "t.csv")
            == EXIT_DATA
        )

    def test_deterministic_bytes(self, blob_files, tmp_path):
        points, triplets = blob_files
        again = tmp_path / "again.csv"
        run("triplets", "--points", points, "--p", 2, "--seed", 3, "--out", again)
        with open(triplets, "rb") as fh_a, open(again, "rb") as fh_b:
            assert fh_a.read() == fh_b.read()


class TestEmbed:
    def test_pipeline_run_writes_outputs(self, blob_files, tmp_path):
        _, triplets = blob_files
        out = tmp_path / "emb.csv"
        rc = run(
            "embed", f"{triplets}.train", "--test", f"{triplets}.test",
            "--max-epochs", 40, "--patience", 4, "--seed", 0, "--out", out,
        )
        assert rc in (EXIT_OK, EXIT_NO_PLATEAU)
        emb = load_embeddings(out)
        assert len(emb) == 60
        report = (tmp_path / "emb.csv.report.json").read_text()
        assert '"holdout_error"' in report

    def test_no_plateau_exit_code(self, blob_files, tmp_path):
        _, triplets = blob_files
        rc = run(
            "embed", f"{triplets}.train", "--max-epochs", 1, "--patience", 1,
            "--out", tmp_path / "e.csv",
        )
        assert rc == EXIT_NO_PLATEAU

    def test_dirac_flag_floors_sigma(self, blob_files, tmp_path):
        _, triplets = blob_files
        out = tmp_path / "dirac.csv"
        run(
            "embed", f"{triplets}.train", "--dirac", "--max-epochs", 5,
            "--patience", 2, "--out", out,
        )
        emb = load_embeddings(out)
        np.testing.assert_array_equal(emb.sigma, np.full_like(emb.sigma, 1e-6))

    def test_rerun_byte_identical(self, blob_files, tmp_path):
        _, triplets = blob_files
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for out in (a, b):
            run(
                "embed", f"{triplets}.train", "--max-epochs", 6, "--patience", 2,
                "--seed", 11, "--out", out,
            )
        assert a.read_bytes() == b.read_bytes()
        assert (
            tmp_path / "a.csv.report.json"
        ).read_bytes() == (tmp_path / "b.csv.report.json").read_bytes()

    def test_unreadable_triplets_is_data_error(self, tmp_path):
        assert (
            run("embed", tmp_path / "missing.csv", "--out", tmp_path / "e.csv")
            == EXIT_DATA
        )

    def test_save_params_checkpoint(self, blob_files, tmp_path):
        from ordemb.encoder import load_params

        _, triplets = blob_files
        ckpt = tmp_path / "enc.bin"
        run(
            "embed", f"{triplets}.train", "--max-epochs", 3, "--patience", 2,
            "--out", tmp_path / "e.csv", "--save-params", ckpt,
        )
        params = load_params(ckpt)
        assert params.n_items == 60


class TestEval:
    def test_perfect_embedding_zero_error(self, blob_files, tmp_path):
        points, triplets = blob_files
        from ordemb.datasets import load_points

        ds = load_points(points)
        emb = EmbeddingSet(ds.points, np.zeros_like(ds.points))
        emb_path = tmp_path / "perfect.csv"
        save_embeddings(emb_path, emb)
        out = tmp_path / "metrics.txt"
        rc = run(
            "eval", "--embedding", emb_path, "--triplets", f"{triplets}.test",
            "--points", points, "--out", out,
        )
        assert rc == EXIT_OK
        text = out.read_text()
        assert "err=0\n" in text
        assert re.search(r"procrustes=[0-9.e-]+\n", text)
        match = re.search(r"procrustes=([0-9.e+-]+)", text)
        assert float(match.group(1)) == pytest.approx(0.0, abs=1e-9)
        assert "purity=1\n" in text

    def test_skips_procrustes_without_ground_truth(self, blob_files, tmp_path):
        points, triplets = blob_files
        from ordemb.datasets import load_points

        ds = load_points(points)
        emb_path = tmp_path / "perfect.csv"
        save_embeddings(emb_path, EmbeddingSet(ds.points, np.zeros_like(ds.points)))
        out = tmp_path / "metrics.txt"
        rc = run(
            "eval", "--embedding", emb_path, "--triplets", f"{triplets}.test",
            "--out", out,
        )
        assert rc == EXIT_OK
        text = out.read_text()
        assert "# procrustes skipped" in text
        assert "procrustes=" not in text.replace("# procrustes", "")

    def test_id_mismatch_is_data_error(self, blob_files, tmp_path):
        _, triplets = blob_files
        emb_path = tmp_path / "small.csv"
        save_embeddings(emb_path, EmbeddingSet(np.zeros((5, 2)), np.ones((5, 2))))
        assert (
            run(
                "eval", "--embedding", emb_path, "--triplets", f"{triplets}.test",
                "--out", tmp_path / "m.txt",
            )
            == EXIT_DATA
        )


class TestPlot:
    def _write_embedding(self, tmp_path, sigma=(1.0, 4.0)):
        emb = EmbeddingSet(
            np.array([[0.0, 0.0], [4.0, 1.0], [-2.0, 3.0]]),
            np.array([sigma, sigma, sigma]),
        )
        path = tmp_path / "emb.csv"
        save_embeddings(path, emb)
        return path

    def test_three_ellipses(self, tmp_path):
        emb_path = self._write_embedding(tmp_path)
        out = tmp_path / "plot.svg"
        assert run("plot", "--embedding", emb_path, "--out", out) == EXIT_OK
        svg = out.read_text()
        assert svg.count("<ellipse") == 3

    def test_radii_in_data_units(self, tmp_path):
        emb_path = self._write_embedding(tmp_path, sigma=(1.0, 4.0))
        out = tmp_path / "plot.svg"
        run("plot", "--embedding", emb_path, "--out", out)
        svg = out.read_text()
        assert 'rx="2" ry="4"' in svg

    def test_byte_identical(self, tmp_path):
        emb_path = self._write_embedding(tmp_path)
        a = tmp_path / "a.svg"
        b = tmp_path / "b.svg"
        run("plot", "--embedding", emb_path, "--out", a)
        run("plot", "--embedding", emb_path, "--out", b)
        assert a.read_bytes() == b.read_bytes()

    def test_non_2d_rejected(self, tmp_path):
        emb = EmbeddingSet(np.zeros((3, 3)), np.ones((3, 3)))
        path = tmp_path / "emb3.csv"
        save_embeddings(path, emb)
        assert run("plot", "--embedding", path, "--out", tmp_path / "p.svg") == EXIT_USAGE

    def test_render_svg_rejects_bad_labels(self):
        emb = EmbeddingSet(np.zeros((3, 2)), np.ones((3, 2)))
        with pytest.raises(ValueError):
            render_svg(emb, labels=[0, 1])


class TestConfigFile:
    def test_config_supplies_defaults_and_cli_overrides(self, tmp_path):
        config = tmp_path / "run.ini"
        config.write_text("[gen]\nn = 40\nseed = 9\n")
        out_a = tmp_path / "a.csv"
        run("gen", "blobs", "--config", config, "--out", out_a)
        assert len(out_a.read_text().strip().split("\n")) == 41
        out_b = tmp_path / "b.csv"
        run("gen", "blobs", "--config", config, "--n", 12, "--out", out_b)
        assert len(out_b.read_text().strip().split("\n")) == 13

    def test_missing_config_is_data_error(self, tmp_path):
        assert (
            run("gen", "blobs", "--config", tmp_path / "none.ini", "--out", tmp_path / "x.csv")
            == EXIT_DATA
        )


class TestFullPipelines:
    @pytest.mark.parametrize("kind", ["blobs", "moons", "circles"])
    def test_generate_embed_eval_plot(self, tmp_path, kind):
        points = tmp_path / "points.csv"
        triplets = tmp_path / "triplets.csv"
        emb = tmp_path / "emb.csv"
        metrics = tmp_path / "metrics.txt"
        svg = tmp_path / "plot.svg"
        assert run("gen", kind, "--n", 40, "--seed", 2, "--out", points) == EXIT_OK
        assert (
            run("triplets", "--points", points, "--p", 2, "--seed", 2, "--out", triplets)
            == EXIT_OK
        )
        rc = run(
            "embed", f"{triplets}.train", "--test", f"{triplets}.test",
            "--max-epochs", 30, "--patience", 3, "--seed", 2, "--out", emb,
        )
        assert rc in (EXIT_OK, EXIT_NO_PLATEAU)
        assert (
            run(
                "eval", "--embedding", emb, "--triplets", f"{triplets}.test",
                "--points", points, "--out", metrics,
            )
            == EXIT_OK
        )
        assert run("plot", "--embedding", emb, "--points", points, "--out", svg) == EXIT_OK
        text = metrics.read_text()
        for key in ("err=", "procrustes=", "purity=", "auc=", "ap="):
            assert key in text
        assert svg.read_text().count("<ellipse") == 40
