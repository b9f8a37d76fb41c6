"""Norm-like functionals: path-norm proxy, Hilbert-weight complexity,
layer balancing, the Hilbert-weight distance upper bound and the Lipschitz
sanity check.

The mean-field path-norm proxy computed here equals the raw path-norm proxy
of the equivalent raw-sum network (normalizers folded into the weights), and
is the computable upper bound for the multi-layer function norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArchitectureMismatch, ZeroLayer
from .nets import MeanFieldNet, NeuralTree


def path_norm_proxy(net: MeanFieldNet) -> float:
    """Mean over all paths of |a^L ... a^0| via the layered DP.

    Cost is one absolute matrix-vector product per layer, never the
    exponential path enumeration.
    """
    v = np.abs(net.inner).sum(axis=1) / (net.input_dim + 1)
    for a, m in zip(net.mids, net.widths):
        v = np.abs(a) @ v / m
    return float(np.abs(net.outer) @ v / net.widths[-1])


def path_norm_proxy_tree(tree: NeuralTree) -> float:
    """Raw sum over all tree paths of the absolute weight products."""
    v = np.abs(tree.level0).sum(axis=1)
    for l, w in enumerate(tree.levels, start=1):
        b = tree.branching[l - 1]
        v = (np.abs(w) * v).reshape(-1, b).sum(axis=1)
    b = tree.branching[-1]
    return float((np.abs(tree.outer) * v).reshape(-1, b).sum())


def path_norm_proxy_brute(net: MeanFieldNet) -> float:
    """Brute-force path enumeration oracle; feasible only for small nets."""
    d1 = net.input_dim + 1
    total = 0.0
    widths = net.widths
    L = net.depth

    def rec(level, upper_index, acc):
        nonlocal total
        if level == 0:
            for i0 in range(d1):
                total += acc * abs(net.inner[upper_index, i0]) / d1
            return
        a = net.mids[level - 1]
        m = widths[level - 1]
        for j in range(m):
            rec(level - 1, j, acc * abs(a[upper_index, j]) / m)

    for iL in range(widths[-1]):
        rec(L - 1, iL, abs(net.outer[iL]) / widths[-1])
    return total


def layer_l2_norms(net: MeanFieldNet):
    """Probability-normalized L2 norm of every layer (length L+1)."""
    norms = [np.sqrt(np.mean(net.inner**2))]
    norms += [np.sqrt(np.mean(a**2)) for a in net.mids]
    norms.append(np.sqrt(np.mean(net.outer**2)))
    return np.array(norms)


@dataclass(frozen=True)
class PathNormReport:
    proxy: float
    per_layer_l2: np.ndarray
    hilbert_q: float

    def to_csv_row(self):
        fields = [repr(self.proxy), repr(self.hilbert_q)]
        fields += [repr(float(v)) for v in self.per_layer_l2]
        return ",".join(fields)


def hilbert_complexity(net: MeanFieldNet) -> PathNormReport:
    """Per-layer probability-normalized L2 norms and their product Q.

    Q upper-bounds the path-norm proxy by Cauchy-Schwarz, with equality for
    constant-weight layers.
    """
    norms = layer_l2_norms(net)
    return PathNormReport(
        proxy=path_norm_proxy(net),
        per_layer_l2=norms,
        hilbert_q=float(np.prod(norms)),
    )


def balance(net: MeanFieldNet) -> MeanFieldNet:
    """Rescale every layer so all L+1 layer norms equal Q^(1/(L+1)).

    The scale factors multiply to 1, so the realized function is unchanged.
    """
    norms = layer_l2_norms(net)
    if np.any(norms == 0.0):
        raise ZeroLayer("cannot balance a net with an identically zero layer")
    target = np.prod(norms) ** (1.0 / len(norms))
    scales = target / norms
    layers = [a * s for a, s in zip(net.layers(), scales)]
    return MeanFieldNet(layers[0], tuple(layers[1:-1]), layers[-1])


def d_hw_upper(f: MeanFieldNet, g: MeanFieldNet) -> float:
    """Upper bound on the Hilbert-weight distance: balance both nets and sum
    layerwise L2 differences.  No infimum over representations is taken."""
    if f.depth != g.depth or f.widths != g.widths or f.input_dim != g.input_dim:
        raise ArchitectureMismatch("d_hw_upper needs identical architectures")
    fb, gb = balance(f), balance(g)
    total = 0.0
    for a, b in zip(fb.layers(), gb.layers()):
        total += np.sqrt(np.mean((a - b) ** 2))
    return float(total)


def lipschitz_bound_check(net, dist, n_pairs, seed=0):
    """Sample point pairs and check |f(x)-f(y)| <= proxy * ||x-y||_inf.

    The proxy controls the l-infinity Lipschitz constant (the bias path
    contributes slack, so the bound is not tight)."""
    rng = np.random.default_rng(seed)
    proxy = path_norm_proxy(net)
    xs = dist.sample(n_pairs, rng.integers(2**31))
    ys = dist.sample(n_pairs, rng.integers(2**31))
    fx = net.forward_many(xs)
    fy = net.forward_many(ys)
    gap = np.abs(fx - fy)
    dist_inf = np.abs(xs - ys).max(axis=1)
    return bool(np.all(gap <= proxy * dist_inf + 1e-9))
