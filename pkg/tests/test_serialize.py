import numpy as np
import pytest

from mfnets import MeanFieldNet, ShapeError, load, net_to_tree, random_net, save
from mfnets.serialize import dumps_net, dumps_tree, loads


def test_net_round_trip_exact(tmp_path):
    net = random_net(3, (4, 3, 5), 2, 1.7, seed=0)
    path = tmp_path / "net.mfnet"
    save(net, path)
    back = load(path)
    assert np.array_equal(net.inner, back.inner)
    assert all(np.array_equal(a, b) for a, b in zip(net.mids, back.mids))
    assert np.array_equal(net.outer, back.outer)


def test_tree_round_trip_exact(tmp_path):
    tree = net_to_tree(random_net(3, (3, 2, 4), 2, 1.0, seed=1))
    path = tmp_path / "tree.mfnet"
    save(tree, path)
    back = load(path)
    assert back.branching == tree.branching
    assert np.array_equal(back.level0, tree.level0)
    assert all(np.array_equal(a, b) for a, b in zip(back.levels, tree.levels))
    assert np.array_equal(back.outer, tree.outer)


def test_raw_kind_preserves_function():
    net = random_net(2, (4, 4), 3, 1.0, seed=2)
    back = loads(dumps_net(net, kind="raw"))
    xs = np.random.default_rng(0).uniform(-1, 1, (30, 3))
    assert np.allclose(net(xs), back(xs), rtol=1e-12, atol=1e-15)


def test_header_and_kind():
    net = MeanFieldNet(np.array([[3.0, 1.0]]), (), np.array([2.0]))
    text = dumps_net(net)
    assert text.startswith("mfnet-v1\nkind meanfield\n")
    assert dumps_tree(net_to_tree(net)).splitlines()[1] == "kind tree"


def test_malformed_input_rejected():
    with pytest.raises(ShapeError):
        loads("not-a-header\n")
    net = random_net(1, (3,), 2, 1.0, seed=3)
    bad = dumps_net(net).replace("widths 3", "widths 4")
    with pytest.raises(ShapeError):
        loads(bad)
