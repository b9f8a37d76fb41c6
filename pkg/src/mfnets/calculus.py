"""Constructive closures on mean-field networks: sums, scalar multiples,
depth lifting, composition, abs/max/min, and quadrature-based squares and
products.

Every constructor returns a plain MeanFieldNet whose forward values realize
the target operation; block-diagonal padding uses explicit stored zeros.
"""

from __future__ import annotations

import numpy as np

from .errors import ArityMismatch, DepthMismatch
from .nets import MeanFieldNet


def scale(f: MeanFieldNet, c: float) -> MeanFieldNet:
    """c * f, exactly, by scaling the outer layer."""
    return f.replace(outer=f.outer * float(c))


def negate(f: MeanFieldNet) -> MeanFieldNet:
    return scale(f, -1.0)


def constant_net(value: float, input_dim: int, depth: int = 1) -> MeanFieldNet:
    """Bias-only single-neuron chain realizing a constant function."""
    d1 = input_dim + 1
    inner = np.zeros((1, d1))
    inner[0, -1] = d1  # preactivation 1 after the 1/(d+1) average
    mids = tuple(np.array([[1.0]]) for _ in range(depth - 1))
    outer = np.array([float(value)])
    return MeanFieldNet(inner, mids, outer)


def add(f: MeanFieldNet, g: MeanFieldNet) -> MeanFieldNet:
    """Parallel stacking added in the final layer; exact pointwise sum.

    Mean-field compensation factors (combined width over own width) keep the
    layer averages of each block unchanged, so the combined proxy is exactly
    proxy(f) + proxy(g).
    """
    if f.depth != g.depth:
        raise DepthMismatch(f"depths {f.depth} and {g.depth} differ")
    if f.input_dim != g.input_dim:
        raise DepthMismatch("input dimensions differ")
    inner = np.vstack([f.inner, g.inner])
    mids = []
    for af, ag, mf, mg in zip(f.mids, g.mids, f.widths, g.widths):
        m = mf + mg
        block = np.zeros((af.shape[0] + ag.shape[0], m))
        block[: af.shape[0], :mf] = af * (m / mf)
        block[af.shape[0] :, mf:] = ag * (m / mg)
        mids.append(block)
    mf, mg = f.widths[-1], g.widths[-1]
    m = mf + mg
    outer = np.concatenate([f.outer * (m / mf), g.outer * (m / mg)])
    return MeanFieldNet(inner, tuple(mids), outer)


def lift_depth(f: MeanFieldNet, extra: int) -> MeanFieldNet:
    """Same function as a net with `extra` more hidden layers.

    Splits f = relu(f) - relu(-f) in the first new layer; further layers
    pass the two nonnegative channels through unchanged.  The proxy of the
    result is exactly twice the proxy of f.
    """
    if extra < 1:
        raise ValueError("extra must be >= 1")
    split = np.vstack([f.outer, -f.outer])  # (2, m_L), preactivations (f, -f)
    mids = list(f.mids) + [split]
    # pass-through layers on the two nonnegative channels
    for _ in range(extra - 1):
        mids.append(2.0 * np.eye(2))
    outer = np.array([2.0, -2.0])
    return MeanFieldNet(f.inner, tuple(mids), outer)


def compose(g: MeanFieldNet, fs) -> MeanFieldNet:
    """g(f_1(x), ..., f_k(x)) as a single depth L+ell network.

    The component nets run in parallel alongside a constant-1 chain feeding
    g's bias column; g's inner layer is rewired onto their output layers.
    """
    fs = list(fs)
    k = len(fs)
    if g.input_dim != k:
        raise ArityMismatch(f"g expects {g.input_dim} inputs, got {k} components")
    if len({f.depth for f in fs}) != 1 or len({f.input_dim for f in fs}) != 1:
        raise ArityMismatch("all components must share depth and input dimension")
    Lf = fs[0].depth
    d = fs[0].input_dim

    blocks = fs + [constant_net(1.0, d, depth=Lf)]
    inner = np.vstack([b.inner for b in blocks])
    mids = []
    for l in range(Lf - 1):
        ms = [b.widths[l] for b in blocks]
        m = sum(ms)
        rows = sum(b.widths[l + 1] for b in blocks)
        a = np.zeros((rows, m))
        r0 = c0 = 0
        for b, mb in zip(blocks, ms):
            ab = b.mids[l]
            a[r0 : r0 + ab.shape[0], c0 : c0 + mb] = ab * (m / mb)
            r0 += ab.shape[0]
            c0 += mb
        mids.append(a)

    # bridge layer: g's inner layer applied to (f_1, ..., f_k, 1)
    ms = [b.widths[-1] for b in blocks]
    m = sum(ms)
    bridge = np.zeros((g.widths[0], m))
    c0 = 0
    for i, (b, mb) in enumerate(zip(blocks, ms)):
        coeff = g.inner[:, i]  # column for component i (bias column for i = k)
        bridge[:, c0 : c0 + mb] = (
            np.outer(coeff, b.outer) * m / ((k + 1) * mb)
        )
        c0 += mb
    mids.append(bridge)
    mids.extend(g.mids)
    return MeanFieldNet(inner, tuple(mids), g.outer)


def _two_layer(inner_rows, outer_vals):
    """Helper: one-hidden-layer net on k inputs from explicit rows."""
    return MeanFieldNet(np.asarray(inner_rows, float), (), np.asarray(outer_vals, float))


def relu_net():
    """g(z) = relu(z) as a one-hidden-layer net on one input."""
    return _two_layer([[2.0, 0.0]], [1.0])


def identity_net():
    """g(z) = z = relu(z) - relu(-z)."""
    return _two_layer([[2.0, 0.0], [-2.0, 0.0]], [2.0, -2.0])


def abs_net():
    """g(z) = |z| = relu(z) + relu(-z)."""
    return _two_layer([[2.0, 0.0], [-2.0, 0.0]], [2.0, 2.0])


def max_net():
    """g(z1, z2) = z1 + relu(z2 - z1)."""
    rows = [[3.0, 0.0, 0.0], [-3.0, 0.0, 0.0], [-3.0, 3.0, 0.0]]
    return _two_layer(rows, [3.0, -3.0, 3.0])


def abs_of(f: MeanFieldNet) -> MeanFieldNet:
    return compose(abs_net(), [f])


def max_of(f: MeanFieldNet, g: MeanFieldNet) -> MeanFieldNet:
    return compose(max_net(), [f, g])


def min_of(f: MeanFieldNet, g: MeanFieldNet) -> MeanFieldNet:
    return negate(max_of(negate(f), negate(g)))


def square_barron(bound: float, quad_points: int) -> MeanFieldNet:
    """One-hidden-layer net approximating z -> relu(z)^2 on [-bound, bound].

    Midpoint quadrature of relu(z)^2 = int_0^bound 2 relu(z - xi) dxi on a
    uniform xi-grid; the integrand is piecewise linear so the sup error is
    at most (bound/ (2 quad_points))^2 <= bound^2 / (4 quad_points).
    """
    if quad_points < 2:
        raise ValueError("quad_points must be >= 2")
    M, n = float(bound), int(quad_points)
    h = M / n
    xis = (np.arange(n) + 0.5) * h
    inner = np.column_stack([np.full(n, 2.0), -2.0 * xis])
    outer = np.full(n, 2.0 * M)  # (1/n) * 2M = 2h, the midpoint weight
    return MeanFieldNet(inner, (), outer)


def full_square_net(bound: float, quad_points: int) -> MeanFieldNet:
    """z -> z^2 on [-bound, bound] via relu(z)^2 + relu(-z)^2."""
    pos = square_barron(bound, quad_points)
    neg = square_barron(bound, quad_points)
    neg = neg.replace(inner=neg.inner * np.array([-1.0, 1.0]))
    return add(pos, neg)


def product_of(f: MeanFieldNet, g: MeanFieldNet, bound: float, quad_points: int):
    """f * g via the polarization identity ((f+g)^2 - (f-g)^2) / 4.

    Caller asserts |f|, |g| <= bound on the data cube; sup error is within
    2 * (2 bound)^2 / (4 quad_points).
    """
    sq = full_square_net(2.0 * float(bound), quad_points)
    plus = compose(sq, [add(f, g)])
    minus = compose(sq, [add(f, negate(g))])
    return add(scale(plus, 0.25), scale(minus, -0.25))
