"""Maurey subsampling: compress a wide mean-field net into a complete
neural tree with branching (m, ..., m) and a certified L2 error rate.

The construction follows the convex-hull argument: the outer layer is read
as a signed mixture over unit-proxy sub-functions, m of them are sampled
with probability proportional to their mixture mass, and each selected
sub-function is recursively subsampled one level down.  The raw path proxy
of the sampled tree never exceeds the proxy of the source net.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNet
from .nets import MeanFieldNet, NeuralTree
from .norms import path_norm_proxy, path_norm_proxy_tree


@dataclass(frozen=True)
class MaureyResult:
    tree: NeuralTree
    target_proxy: float
    l2_error: float
    m: int
    bound: float


def _sub_proxies(net: MeanFieldNet):
    """Path proxy of each top-node sub-function g_i (depth L-1 tail)."""
    v = np.abs(net.inner).sum(axis=1) / (net.input_dim + 1)
    for a, m in zip(net.mids[:-1], net.widths):
        v = np.abs(a) @ v / m
    if net.depth == 1:
        # g_i are the affine rows of the inner layer
        return v
    return np.abs(net.mids[-1]) @ v / net.widths[-2]


def _subsample_tree(net: MeanFieldNet, m: int, rng) -> NeuralTree:
    """Tree with branching (m,)*L approximating the unit normalization of
    net; outer coefficients carry the signed mixture weights times proxy/m."""
    L = net.depth
    mL = net.widths[-1]
    sub = _sub_proxies(net)  # length m_L
    mass = np.abs(net.outer) * sub / mL
    Z = mass.sum()  # = path_norm_proxy(net)
    probs = mass / Z
    picks = rng.choice(mL, size=m, p=probs)
    signs = np.sign(net.outer[picks])
    outer = signs * Z / m

    if L == 1:
        d1 = net.input_dim + 1
        rows = net.inner[picks] / (d1 * sub[picks, None])
        return NeuralTree((m,), net.input_dim, rows, (), outer)

    subtrees = []
    for i in picks:
        g = MeanFieldNet(net.inner, net.mids[:-1], net.mids[-1][i] / sub[i])
        subtrees.append(_subsample_tree(g, m, rng))
    level0 = np.vstack([t.level0 for t in subtrees])
    levels = []
    for l in range(L - 2):
        levels.append(np.concatenate([t.levels[l] for t in subtrees]))
    levels.append(np.concatenate([t.outer for t in subtrees]))
    return NeuralTree((m,) * L, net.input_dim, level0, tuple(levels), outer)


def maurey_subsample(net: MeanFieldNet, m: int, dist, seed, n_eval=4096):
    """Sample a branching-(m, ..., m) tree and measure its L2(P) error.

    Deterministic given seed; the bound field records the existential rate
    L (2+R) proxy / sqrt(m).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    proxy = path_norm_proxy(net)
    if proxy == 0.0:
        raise DegenerateNet("cannot subsample a net with zero path proxy")
    rng = np.random.default_rng(seed)
    tree = _subsample_tree(net, m, rng)
    tree_proxy = path_norm_proxy_tree(tree)
    assert tree_proxy <= proxy * (1 + 1e-9), "proxy preservation violated"
    err = l2_distance(net, tree, dist, n_eval, seed=rng.integers(2**31))
    bound = float(net.depth * (2.0 + dist.radius) * proxy / np.sqrt(m))
    return MaureyResult(tree, proxy, err, m, bound)


def l2_distance(f, g, dist, n, seed):
    """Monte-Carlo estimate of the L2(P) distance between two evaluables."""
    if n < 1:
        raise ValueError("n must be >= 1")
    xs = dist.sample(n, seed)
    diff = f.forward_many(xs) - g.forward_many(xs)
    return float(np.sqrt(np.mean(diff**2)))


def tree_param_count(L, m, d):
    """Parameter count of the branching-(m, ..., m) depth-L tree."""
    total = m  # outer
    for l in range(1, L):
        total += m ** (L - l + 1)
    total += m**L * (d + 1)
    return total


def rate_sweep(net, ms, dist, seeds, out_path=None):
    """Mean Maurey error per m over several seeds, with the analytic bound
    and a fitted log-log slope of error versus m.

    Returns (rows, slope); slope is NaN when errors vanish."""
    if not ms or any(b <= a for a, b in zip(ms, ms[1:])):
        raise ValueError("ms must be nonempty and increasing")
    L, d = net.depth, net.input_dim
    rows = []
    for m in ms:
        errs = [
            maurey_subsample(net, m, dist, seed).l2_error for seed in range(seeds)
        ]
        errs = np.array(errs)
        proxy = path_norm_proxy(net)
        rows.append(
            {
                "m": m,
                "mean_error": float(errs.mean()),
                "std_error": float(errs.std(ddof=1)) if seeds > 1 else 0.0,
                "bound": float(L * (2.0 + dist.radius) * proxy / np.sqrt(m)),
                "tree_param_count": tree_param_count(L, m, d),
                "seeds": seeds,
            }
        )
    means = np.array([r["mean_error"] for r in rows])
    if np.all(means > 1e-12):
        slope = float(
            np.polyfit(np.log(np.array(ms, float)), np.log(means), 1)[0]
        )
    else:
        slope = float("nan")
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            writer = csv.DictWriter(
                fh,
                fieldnames=[
                    "m", "mean_error", "std_error", "bound",
                    "tree_param_count", "seeds",
                ],
            )
            writer.writeheader()
            writer.writerows(rows)
    return rows, slope


def proxy_liminf_monitor(proxies, limit_proxy_bound):
    """Bookkeeping check for sequences converging in L2(P): proxies must be
    uniformly bounded and the limit's bound must not exceed their liminf."""
    proxies = np.asarray(proxies, float)
    if not np.all(np.isfinite(proxies)):
        return False
    return bool(limit_proxy_bound <= proxies.min() * (1 + 1e-9))
