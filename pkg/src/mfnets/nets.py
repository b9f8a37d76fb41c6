"""Finite-width mean-field ReLU networks and neural trees.

A mean-field network stores one matrix per layer and evaluates with every
layer sum divided by the width of the layer being summed (d+1 for the input
layer).  A neural tree stores one weight per (partial) path and evaluates
with raw sums.  Conversions between the two fold the mean-field normalizers
into the weights so the realized function is unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ShapeError


def relu(z):
    return np.maximum(z, 0.0)


def augment(x, input_dim):
    """Append the bias coordinate 1, returning a 2-d batch (n, d+1)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != input_dim:
        raise DimensionMismatch(
            f"expected input dimension {input_dim}, got {x.shape[1]}"
        )
    return np.hstack([x, np.ones((x.shape[0], 1))])


@dataclass(frozen=True)
class MeanFieldNet:
    """Weights of an L-hidden-layer network in the mean-field convention.

    inner: (m_1, d+1) matrix, last column is the bias.
    mids:  tuple of (m_{l+1}, m_l) matrices for l = 1 .. L-1.
    outer: (m_L,) vector.
    """

    inner: np.ndarray
    mids: tuple
    outer: np.ndarray

    def __post_init__(self):
        inner = np.asarray(self.inner, dtype=float)
        mids = tuple(np.asarray(a, dtype=float) for a in self.mids)
        outer = np.asarray(self.outer, dtype=float)
        object.__setattr__(self, "inner", inner)
        object.__setattr__(self, "mids", mids)
        object.__setattr__(self, "outer", outer)
        if inner.ndim != 2 or inner.shape[1] < 2:
            raise ShapeError("inner layer must be (m_1, d+1) with d >= 1")
        if outer.ndim != 1:
            raise ShapeError("outer layer must be a vector")
        prev = inner.shape[0]
        for a in mids:
            if a.ndim != 2 or a.shape[1] != prev:
                raise ShapeError(
                    f"mid layer shape {a.shape} inconsistent with width {prev}"
                )
            prev = a.shape[0]
        if outer.shape[0] != prev:
            raise ShapeError(
                f"outer length {outer.shape[0]} inconsistent with width {prev}"
            )
        for a in (inner, *mids, outer):
            if not np.all(np.isfinite(a)):
                raise ShapeError("non-finite weight entry")

    @property
    def depth(self):
        return len(self.mids) + 1

    @property
    def input_dim(self):
        return self.inner.shape[1] - 1

    @property
    def widths(self):
        return (self.inner.shape[0],) + tuple(a.shape[0] for a in self.mids)

    def layers(self):
        """All weight arrays in order: inner, mids..., outer."""
        return [self.inner, *self.mids, self.outer]

    def replace(self, inner=None, mids=None, outer=None):
        return MeanFieldNet(
            self.inner if inner is None else inner,
            self.mids if mids is None else tuple(mids),
            self.outer if outer is None else outer,
        )

    def hidden_values(self, x):
        """Post-activation values of every hidden layer on a batch.

        Returns (xa, [h_1, ..., h_L]) where h_l has shape (n, m_l).
        """
        xa = augment(x, self.input_dim)
        h = relu(xa @ self.inner.T / (self.input_dim + 1))
        hs = [h]
        for a, m in zip(self.mids, self.widths):
            h = relu(h @ a.T / m)
            hs.append(h)
        return xa, hs

    def forward_many(self, x):
        """Evaluate the network on a batch, shape (n, d) -> (n,)."""
        _, hs = self.hidden_values(x)
        return hs[-1] @ self.outer / self.widths[-1]

    def forward(self, x):
        """Evaluate the network at a single point."""
        return float(self.forward_many(np.atleast_2d(np.asarray(x, dtype=float)))[0])

    def __call__(self, x):
        return self.forward_many(x)


@dataclass(frozen=True)
class NeuralTree:
    """Tree-indexed weights evaluated with raw sums.

    branching: (b_1, ..., b_L), children per node at each level.
    level0:    (b_L * ... * b_1, d+1), row-major over (i_L, ..., i_1).
    levels:    tuple of flat arrays for levels 1 .. L-1; the level-l array
               has length b_L * ... * b_l, row-major over (i_L, ..., i_l).
    outer:     (b_L,) vector.
    """

    branching: tuple
    input_dim: int
    level0: np.ndarray
    levels: tuple
    outer: np.ndarray

    def __post_init__(self):
        branching = tuple(int(b) for b in self.branching)
        level0 = np.asarray(self.level0, dtype=float)
        levels = tuple(np.asarray(w, dtype=float).ravel() for w in self.levels)
        outer = np.asarray(self.outer, dtype=float)
        object.__setattr__(self, "branching", branching)
        object.__setattr__(self, "level0", level0)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "outer", outer)
        L = len(branching)
        if L < 1 or any(b < 1 for b in branching):
            raise ShapeError("branching must be a nonempty vector of positive ints")
        if len(levels) != L - 1:
            raise ShapeError(f"expected {L - 1} intermediate levels, got {len(levels)}")
        sizes = self.level_sizes()
        if level0.shape != (sizes[1], self.input_dim + 1):
            raise ShapeError(
                f"level-0 array shape {level0.shape} != {(sizes[1], self.input_dim + 1)}"
            )
        for l, w in enumerate(levels, start=1):
            if w.shape[0] != sizes[l]:
                raise ShapeError(f"level-{l} array length {w.shape[0]} != {sizes[l]}")
        if outer.shape != (branching[-1],):
            raise ShapeError("outer length inconsistent with branching")
        for a in (level0, *levels, outer):
            if not np.all(np.isfinite(a)):
                raise ShapeError("non-finite weight entry")

    @property
    def depth(self):
        return len(self.branching)

    def level_sizes(self):
        """sizes[l] = number of nodes at level l = b_L * ... * b_l."""
        L = self.depth
        sizes = {L: self.branching[-1]}
        for l in range(L - 1, 0, -1):
            sizes[l] = sizes[l + 1] * self.branching[l - 1]
        return sizes

    def n_weights(self):
        return self.level0.size + sum(w.size for w in self.levels) + self.outer.size

    def forward_many(self, x):
        """Evaluate the tree on a batch, shape (n, d) -> (n,)."""
        xa = augment(x, self.input_dim)
        v = relu(self.level0 @ xa.T)  # (P_1, n)
        for l, w in enumerate(self.levels, start=1):
            b = self.branching[l - 1]
            u = (w[:, None] * v).reshape(-1, b, v.shape[1]).sum(axis=1)
            v = relu(u)
        b = self.branching[-1]
        out = (self.outer[:, None] * v).reshape(-1, b, v.shape[1]).sum(axis=1)
        return out[0]

    def forward(self, x):
        return float(self.forward_many(np.atleast_2d(np.asarray(x, dtype=float)))[0])

    def __call__(self, x):
        return self.forward_many(x)


def net_to_tree(net: MeanFieldNet) -> NeuralTree:
    """Unshare parameters into a tree; mean-field normalizers are folded in
    so that forward values agree exactly up to summation order."""
    d1 = net.input_dim + 1
    widths = net.widths
    L = net.depth

    scaled0 = net.inner / d1
    scaled_mids = [a / m for a, m in zip(net.mids, widths)]
    scaled_outer = net.outer / widths[-1]

    # number of tree nodes above each level
    above = {L: 1}
    for l in range(L - 1, 0, -1):
        above[l] = above[l + 1] * widths[l]  # widths[l] = m_{l+1}

    level0 = np.tile(scaled0, (above[1], 1))
    levels = []
    for l in range(1, L):
        base = scaled_mids[l - 1].ravel()  # row-major over (i_{l+1}, i_l)
        levels.append(np.tile(base, above[l + 1]))
    return NeuralTree(
        branching=widths,
        input_dim=net.input_dim,
        level0=level0,
        levels=tuple(levels),
        outer=scaled_outer,
    )


def tree_to_net(tree: NeuralTree) -> MeanFieldNet:
    """Flatten a tree into a network with block-sparse mid layers (explicit
    zeros), then fold the new widths back into mean-field convention."""
    L = tree.depth
    sizes = tree.level_sizes()
    d1 = tree.input_dim + 1

    inner = tree.level0 * d1
    mids = []
    for l in range(1, L):
        b = tree.branching[l - 1]
        rows, cols = sizes[l + 1], sizes[l]
        a = np.zeros((rows, cols))
        w = tree.levels[l - 1].reshape(rows, b)
        for j in range(rows):
            a[j, j * b : (j + 1) * b] = w[j]
        mids.append(a * cols)  # fold 1/m_l of the new evaluation
    outer = tree.outer * sizes[L]
    return MeanFieldNet(inner, tuple(mids), outer)


def path_count(net: MeanFieldNet) -> int:
    """Total number of input-to-output paths."""
    n = net.input_dim + 1
    for m in net.widths:
        n *= m
    return n
