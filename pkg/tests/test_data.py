import numpy as np
import pytest

from mfnets import DataDistribution, Dataset, dataset_from_csv, label, random_net
from mfnets.norms import hilbert_complexity, path_norm_proxy


def test_distribution_support_and_determinism():
    for kind in DataDistribution.KINDS:
        dist = DataDistribution(kind, 3, radius=0.7)
        a = dist.sample(1000, seed=0)
        b = dist.sample(1000, seed=0)
        assert np.array_equal(a, b)
        assert np.abs(a).max() <= 0.7 + 1e-12
    with pytest.raises(ValueError):
        DataDistribution("triangle", 2)


def test_uniform_cube_mean():
    dist = DataDistribution("uniform_cube", 4)
    xs = dist.sample(100_000, seed=1)
    assert np.abs(xs.mean(axis=0)).max() < 0.02


def test_sphere_surface_radius():
    dist = DataDistribution("sphere_surface", 3, radius=2.0)
    # l2 radius exactly 2; support still inside the cube of radius 2
    xs = dist.sample(100, seed=2)
    assert np.allclose(np.linalg.norm(xs, axis=1), 2.0)


def test_empty_sample():
    dist = DataDistribution("uniform_cube", 2)
    assert dist.sample(0, seed=0).shape == (0, 2)
    net = random_net(1, (4,), 2, 1.0, seed=0)
    ds = label(net, np.zeros((0, 2)))
    assert len(ds) == 0


def test_random_net_exact_proxy_and_determinism():
    for law in ("gaussian", "uniform"):
        net = random_net(2, (8, 8), 3, 1.0, weight_law=law, seed=4)
        assert path_norm_proxy(net) == pytest.approx(1.0, abs=1e-12)
        again = random_net(2, (8, 8), 3, 1.0, weight_law=law, seed=4)
        assert np.array_equal(net.inner, again.inner)
    with pytest.raises(ValueError):
        random_net(1, (4,), 2, -1.0)


def test_random_net_q_dominates_proxy():
    net = random_net(2, (64, 64), 8, 1.0, seed=5)
    report = hilbert_complexity(net)
    assert report.proxy <= report.hilbert_q


def test_label_zero_net_and_noise():
    net = random_net(1, (4,), 2, 1.0, seed=6)
    zero = net.replace(outer=np.zeros_like(net.outer))
    pts = DataDistribution("uniform_cube", 2).sample(10, seed=0)
    assert np.all(label(zero, pts).ys == 0.0)
    noisy = label(net, pts, noise_std=0.1, seed=1)
    again = label(net, pts, noise_std=0.1, seed=1)
    assert np.array_equal(noisy.ys, again.ys)


def test_dataset_csv_round_trip(tmp_path):
    net = random_net(1, (4,), 2, 1.0, seed=7)
    pts = DataDistribution("uniform_cube", 2).sample(20, seed=3)
    ds = label(net, pts, provenance={"seed": 3, "target": "t"})
    path = tmp_path / "data.csv"
    ds.to_csv(path)
    back = dataset_from_csv(path)
    assert np.array_equal(back.xs, ds.xs)
    assert np.array_equal(back.ys, ds.ys)
    assert back.provenance["seed"] == "3"
