import math

import numpy as np
import pytest
from scipy import stats

from kemedian.io import dump_json
from kemedian.ranking import Ranking, SizeLimitError, default_labels, kemeny_distance
from kemedian.simulate import (
    ExperimentConfig,
    ModelSpec,
    Space,
    model_pmf,
    replication_seed,
    run_experiment,
    sample,
    sample_incomplete,
    space_arrays,
)


def spec(m, theta, space=Space.FULL, cons=None):
    return ModelSpec(Ranking(default_labels(m), cons or tuple(range(1, m + 1))), theta, space)


class TestModel:
    def test_two_objects(self):
        t = model_pmf(spec(2, 0.7))
        labels = default_labels(2)
        p12 = t.probability(Ranking(labels, (1, 2)))
        p21 = t.probability(Ranking(labels, (2, 1)))
        assert p12 == pytest.approx(1 / (1 + math.exp(-1.4)), abs=1e-12)
        assert p12 == pytest.approx(0.8022, abs=5e-5)
        assert p21 == pytest.approx(0.1978, abs=5e-5)

    @pytest.mark.parametrize("space", list(Space))
    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_uniform_at_zero(self, m, space):
        t = model_pmf(spec(m, 0.0, space))
        assert np.allclose(t.probs, 1 / len(t.points), atol=1e-15)

    @pytest.mark.parametrize("space", list(Space))
    @pytest.mark.parametrize("theta", [0.0, 0.1, 0.7, 3.0, 50.0])
    def test_normalised_and_distance_driven(self, space, theta):
        t = model_pmf(spec(5, theta, space))
        assert abs(t.probs.sum() - 1) <= 1e-12
        for d in np.unique(t.distances):
            p = t.probs[t.distances == d]
            assert np.ptp(p) <= 1e-15
        if theta > 0:
            top = np.flatnonzero(t.probs == t.probs.max())
            assert list(t.distances[top]) == [0]

    def test_distances_agree_with_core(self):
        s = Ranking(default_labels(4), (2, 1, 4, 3))
        t = model_pmf(ModelSpec(s, 0.3, Space.WEAK))
        for row, d in zip(t.points[::7], t.distances[::7]):
            assert d == kemeny_distance(s, Ranking(s.labels, tuple(int(v) for v in row)))

    def test_space_sizes(self):
        assert len(space_arrays(4, Space.FULL)) == 24
        assert len(space_arrays(4, Space.WEAK)) == 75

    def test_validation(self):
        with pytest.raises(ValueError):
            spec(3, -1.0)
        with pytest.raises(ValueError):
            spec(3, 0.5, cons=(1, 1, 2))
        spec(3, 0.5, Space.WEAK, cons=(1, 1, 2))
        with pytest.raises(SizeLimitError):
            spec(8, 0.5)


class TestSample:
    def test_chi_square_uniform(self):
        d = sample(spec(3, 0.0), 10_000, seed=7)
        keys = [tuple(r) for r in d.ranks]
        counts = [keys.count(tuple(p)) for p in space_arrays(3, Space.FULL)]
        assert stats.chisquare(counts).pvalue > 0.01

    def test_chi_square_against_pmf(self):
        t = model_pmf(spec(3, 0.4, Space.WEAK))
        d = sample(spec(3, 0.4, Space.WEAK), 10_000, seed=8)
        idx = {tuple(p): i for i, p in enumerate(t.points)}
        counts = np.bincount([idx[tuple(r)] for r in d.ranks], minlength=len(t.points))
        assert stats.chisquare(counts, t.probs * 10_000).pvalue > 0.01

    def test_concentrates_for_large_theta(self):
        d = sample(spec(4, 50.0, cons=(2, 1, 4, 3)), 100, seed=1)
        assert np.all(d.ranks == [2, 1, 4, 3])

    def test_reproducible(self):
        a = sample(spec(4, 0.4), 50, seed=3)
        b = sample(spec(4, 0.4), 50, seed=3)
        assert np.array_equal(a.ranks, b.ranks)
        assert not np.array_equal(a.ranks, sample(spec(4, 0.4), 50, seed=4).ranks)
        assert np.all(a.weights == 1)


class TestIncomplete:
    @pytest.mark.parametrize("seed", range(10))
    def test_pick_two_of_four(self, seed):
        d = sample_incomplete(4, 2, seed)
        assert np.all((d.ranks > 0).sum(axis=1) == 2)
        assert all(sorted(r[r > 0]) == [1, 2] for r in d.ranks)
        assert 199 <= d.total_weight <= 201
        assert len({tuple(r) for r in d.ranks}) == d.n
        assert 12 <= d.n <= 30

    def test_row_count_capped_by_space(self):
        d = sample_incomplete(3, 2, 0)
        assert d.n == 6

    def test_reproducible(self):
        a, b = sample_incomplete(6, 3, 11), sample_incomplete(6, 3, 11)
        assert np.array_equal(a.ranks, b.ranks) and np.array_equal(a.weights, b.weights)

    def test_bad_k(self):
        with pytest.raises(ValueError):
            sample_incomplete(4, 1, 0)
        with pytest.raises(ValueError):
            sample_incomplete(4, 5, 0)


class TestExperiment:
    def test_fast_overlap_at_least_quick(self):
        rep = run_experiment(ExperimentConfig(m=4, thetas=(0.7,), n=100, replications=5, maxiter=20))
        for run in rep["runs"]:
            algs = run["algorithms"]
            assert algs["fast"]["overlap_with_bb"] >= algs["quick"]["overlap_with_bb"]
            assert algs["bb"]["overlap_with_bb"] == algs["bb"]["count"]

    def test_more_solutions_with_less_consensus(self):
        rep = run_experiment(
            ExperimentConfig(m=4, thetas=(0.7, 0.1), n=30, replications=10, algorithms=("bb",)), timing=False
        )
        s = rep["summary"]
        assert s["0.1"]["bb"]["solutions"]["mean"] >= s["0.7"]["bb"]["solutions"]["mean"]

    def test_single_algorithm(self):
        rep = run_experiment(ExperimentConfig(m=3, thetas=(0.4,), replications=2, algorithms=("quick",)))
        assert list(rep["summary"]["0.4"]) == ["quick"]
        assert rep["runs"][0]["algorithms"]["quick"]["overlap_with_bb"] is None

    def test_pick_space(self):
        rep = run_experiment(ExperimentConfig(m=5, space="pick", k=3, replications=2, maxiter=10), timing=False)
        assert list(rep["summary"]) == ["pick"]
        assert all(199 <= r["total_weight"] <= 201 for r in rep["runs"])

    def test_deterministic_across_threads(self):
        cfg = dict(m=4, thetas=(0.7, 0.1), n=40, replications=3, maxiter=10)
        a = dump_json(run_experiment(ExperimentConfig(**cfg, threads=1), timing=False))
        b = dump_json(run_experiment(ExperimentConfig(**cfg, threads=3), timing=False))
        assert a == b

    def test_replication_seeds_differ(self):
        seeds = {replication_seed(0, li, r) for li in range(3) for r in range(10)}
        assert len(seeds) == 30

    def test_config_file(self, tmp_path):
        p = tmp_path / "exp.cfg"
        p.write_text("[experiment]\nm = 5\nspace = weak\nthetas = 0.7, 0.1\nreplications = 3\nalgorithms = bb fast\n")
        cfg = ExperimentConfig.from_file(p)
        assert (cfg.m, cfg.space, cfg.thetas, cfg.replications, cfg.algorithms) == (5, "weak", (0.7, 0.1), 3, ("bb", "fast"))
        p.write_text("[experiment]\nm = 5\ncolour = red\n")
        with pytest.raises(ValueError):
            ExperimentConfig.from_file(p)
        p.write_text("m = 5\n")
        with pytest.raises(ValueError):
            ExperimentConfig.from_file(p)

    @pytest.mark.parametrize(
        "kw",
        [dict(m=4, space="cube"), dict(m=4, space="pick"), dict(m=4, algorithms=("magic",)), dict(m=4, thetas=(-1,)), dict(m=4, n=0)],
    )
    def test_config_validation(self, kw):
        with pytest.raises(ValueError):
            ExperimentConfig(**kw)
