import numpy as np
import pytest

from mfnets import (
    DimensionMismatch,
    MeanFieldNet,
    NeuralTree,
    ShapeError,
    net_to_tree,
    path_count,
    random_net,
    tree_to_net,
)
from mfnets.nets import augment


def test_single_neuron_evaluation():
    # f(x) = 2 * relu((3x + 1) / 2)
    net = MeanFieldNet(np.array([[3.0, 1.0]]), (), np.array([2.0]))
    assert net.forward([1.0]) == pytest.approx(4.0)
    assert net.forward([-1.0]) == pytest.approx(0.0)
    assert net.forward([0.0]) == pytest.approx(1.0)


def test_relu_at_zero_is_zero():
    net = MeanFieldNet(np.array([[1.0, 0.0]]), (), np.array([5.0]))
    assert net.forward([0.0]) == 0.0


def test_forward_many_matches_forward():
    net = random_net(2, (3, 4), 3, 1.0, seed=0)
    xs = np.random.default_rng(1).uniform(-1, 1, (20, 3))
    batch = net.forward_many(xs)
    singles = [net.forward(x) for x in xs]
    assert np.allclose(batch, singles, rtol=1e-15, atol=1e-15)


def test_net_tree_equivalence_deep():
    for seed in range(5):
        net = random_net(3, (3, 4, 2), 2, 1.5, seed=seed)
        tree = net_to_tree(net)
        xs = np.random.default_rng(seed).uniform(-1, 1, (30, 2))
        assert np.allclose(net(xs), tree(xs), rtol=1e-12, atol=1e-14)


def test_tree_weight_count_vs_path_count():
    net = random_net(3, (3, 4, 2), 2, 1.0, seed=3)
    tree = net_to_tree(net)
    assert path_count(net) == (2 + 1) * 3 * 4 * 2
    # one weight per partial path
    sizes = tree.level_sizes()
    assert tree.level0.shape == (sizes[1], 3)
    assert tree.outer.shape == (2,)


def test_flatten_round_trip():
    net = random_net(3, (2, 3, 2), 2, 1.0, seed=7)
    flat = tree_to_net(net_to_tree(net))
    xs = np.random.default_rng(2).uniform(-1, 1, (25, 2))
    assert np.allclose(net(xs), flat(xs), rtol=1e-12, atol=1e-14)
    # flattening a depth-1 tree is exact and width-preserving
    net1 = random_net(1, (6,), 3, 1.0, seed=8)
    flat1 = tree_to_net(net_to_tree(net1))
    assert flat1.widths == (6,)
    assert np.allclose(net1.inner, flat1.inner)
    assert np.allclose(net1.outer, flat1.outer)


def test_shape_validation():
    with pytest.raises(ShapeError):
        MeanFieldNet(np.zeros((3, 2)), (), np.zeros(4))  # outer length wrong
    with pytest.raises(ShapeError):
        MeanFieldNet(np.zeros((3, 2)), (np.zeros((2, 4)),), np.zeros(2))
    with pytest.raises(ShapeError):
        MeanFieldNet(np.array([[np.nan, 0.0]]), (), np.array([1.0]))
    with pytest.raises(ShapeError):
        NeuralTree((2,), 1, np.zeros((3, 2)), (), np.zeros(2))


def test_input_dimension_checked():
    net = random_net(1, (4,), 3, 1.0, seed=0)
    with pytest.raises(DimensionMismatch):
        net.forward([1.0, 2.0])
    assert augment([[1.0, 2.0, 3.0]], 3).shape == (1, 4)
