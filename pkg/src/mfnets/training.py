"""Layer-scaled gradient descent on mean-field networks.

One explicit-Euler step with per-layer learning-rate factors (the product
of the adjacent widths) is the spatial discretization of the L2 gradient
flow on weight functions.  Training logs risk, layer norms, path proxy,
the energy-dissipation residual and the two norm-growth slacks at every
checkpoint.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import Diverged, ShapeError
from .nets import MeanFieldNet, augment, relu
from .norms import layer_l2_norms, path_norm_proxy


@dataclass(frozen=True)
class RiskSpec:
    """Loss + data.  data is either a Dataset (empirical risk on the fixed
    sample) or a (DataDistribution, target net) pair (population risk via
    fresh minibatches)."""

    loss: str = "squared"  # squared | clipped_squared
    cap: float = 1.0
    dataset: object = None
    dist: object = None
    target: object = None
    batch_size: int = 64

    def __post_init__(self):
        if self.loss not in ("squared", "clipped_squared"):
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.loss == "clipped_squared" and self.cap <= 0:
            raise ValueError("cap must be positive for clipped loss")
        if self.dataset is None and (self.dist is None or self.target is None):
            raise ValueError("need a dataset or a (dist, target) pair")

    def batch(self, rng):
        if self.dataset is not None:
            return self.dataset.xs, self.dataset.ys
        xs = self.dist.sample(self.batch_size, rng.integers(2**31))
        return xs, self.target.forward_many(xs)

    def eval_batch(self, n, seed):
        """Held-out evaluation sample (the fixed dataset in empirical mode)."""
        if self.dataset is not None:
            return self.dataset.xs, self.dataset.ys
        xs = self.dist.sample(n, seed)
        return xs, self.target.forward_many(xs)

    def pointwise(self, preds, ys):
        r = preds - ys
        if self.loss == "squared":
            return r**2
        return np.minimum(r**2, self.cap)

    def dloss(self, preds, ys):
        r = preds - ys
        g = 2.0 * r
        if self.loss == "clipped_squared":
            g = np.where(r**2 < self.cap, g, 0.0)
        return g


@dataclass(frozen=True)
class TrainConfig:
    step_size: float = 1e-3
    steps: int = 1000
    penalty: float = 0.0
    sigma_prime_at_zero: float = 0.0
    seed: int = 0
    checkpoint_every: int = 100
    eval_points: int = 10_000

    def __post_init__(self):
        if self.step_size <= 0 or self.steps < 0:
            raise ValueError("need step_size > 0 and steps >= 0")
        if self.sigma_prime_at_zero not in (0.0, 1.0):
            raise ValueError("sigma_prime_at_zero must be 0 or 1")


@dataclass
class TrajectoryLog:
    sigma_prime_at_zero: float
    penalty: float
    checkpoints: list = field(default_factory=list)

    HEADER = [
        "step", "t", "risk", "norms", "proxy", "Q",
        "dissipation_residual", "moment_slack", "proxy_slack",
    ]

    def append(self, **kw):
        self.checkpoints.append(kw)

    def column(self, name):
        return [c[name] for c in self.checkpoints]

    def to_csv(self, path):
        L = len(self.checkpoints[0]["norms"]) - 1 if self.checkpoints else 0
        cols = ["step", "t", "risk"]
        cols += [f"norm_l{i}" for i in range(L + 1)]
        cols += ["proxy", "Q", "dissipation_residual", "moment_slack", "proxy_slack"]
        with open(path, "w", newline="") as fh:
            fh.write(
                f"# sigma_prime_at_zero={self.sigma_prime_at_zero} "
                f"penalty={self.penalty}\n"
            )
            writer = csv.writer(fh)
            writer.writerow(cols)
            for c in self.checkpoints:
                row = [c["step"], repr(c["t"]), repr(c["risk"])]
                row += [repr(float(v)) for v in c["norms"]]
                row += [
                    repr(c["proxy"]), repr(c["Q"]),
                    repr(c["dissipation_residual"]),
                    repr(c["moment_slack"]), repr(c["proxy_slack"]),
                ]
                writer.writerow(row)


def lr_factors(net):
    """Per-layer learning-rate factors of the time-rescaled flow."""
    widths = net.widths
    d1 = net.input_dim + 1
    factors = [widths[0] * d1]
    factors += [widths[l + 1] * widths[l] for l in range(net.depth - 1)]
    factors.append(widths[-1])
    return factors


def _forward_pass(net, xs, sigma_prime_at_zero):
    d1 = net.input_dim + 1
    xa = augment(xs, net.input_dim)
    zs = [xa @ net.inner.T / d1]
    hs = [relu(zs[0])]
    for a, m in zip(net.mids, net.widths):
        zs.append(hs[-1] @ a.T / m)
        hs.append(relu(zs[-1]))
    preds = hs[-1] @ net.outer / net.widths[-1]
    dsig = [
        np.where(z > 0, 1.0, np.where(z < 0, 0.0, sigma_prime_at_zero))
        for z in zs
    ]
    return xa, zs, hs, dsig, preds


def output_gradients(net, xs, dout, sigma_prime_at_zero=0.0):
    """Per-layer gradients of sum_n dout_n * f(x_n) (hand backprop)."""
    d1 = net.input_dim + 1
    widths = net.widths
    xa, _, hs, dsig, _ = _forward_pass(net, xs, sigma_prime_at_zero)

    g_outer = hs[-1].T @ dout / widths[-1]
    delta = (dout[:, None] * net.outer[None, :] / widths[-1]) * dsig[-1]
    g_mids = [None] * len(net.mids)
    for l in range(len(net.mids) - 1, -1, -1):
        m = widths[l]
        g_mids[l] = delta.T @ hs[l] / m
        delta = (delta @ net.mids[l] / m) * dsig[l]
    g_inner = delta.T @ xa / d1
    return [g_inner, *g_mids, g_outer]


def gradients(net, spec, xs, ys, sigma_prime_at_zero=0.0):
    """Per-layer gradients of the batch-mean risk."""
    _, _, _, _, preds = _forward_pass(net, xs, sigma_prime_at_zero)
    dout = spec.dloss(preds, ys) / len(xs)
    return output_gradients(net, xs, dout, sigma_prime_at_zero)


def proxy_gradient(net):
    """Gradient of the path-norm proxy, by differentiating the layered DP.

    The subgradient at a zero weight is 0, so explicit zeros stay zero.
    """
    d1 = net.input_dim + 1
    widths = net.widths
    vs = [np.abs(net.inner).sum(axis=1) / d1]
    for a, m in zip(net.mids, net.widths):
        vs.append(np.abs(a) @ vs[-1] / m)

    g_outer = np.sign(net.outer) * vs[-1] / widths[-1]
    u = np.abs(net.outer) / widths[-1]
    g_mids = []
    for l in range(len(net.mids) - 1, -1, -1):
        m = widths[l]
        g_mids.insert(0, np.sign(net.mids[l]) * np.outer(u, vs[l]) / m)
        u = np.abs(net.mids[l]).T @ u / m
    g_inner = np.sign(net.inner) * u[:, None] / d1
    return [g_inner, *g_mids, g_outer]


def risk_value(net, spec, xs, ys):
    return float(np.mean(spec.pointwise(net.forward_many(xs), ys)))


def objective_gradients(net, spec, xs, ys, config):
    grads = gradients(net, spec, xs, ys, config.sigma_prime_at_zero)
    if config.penalty > 0:
        p = path_norm_proxy(net)
        pg = proxy_gradient(net)
        grads = [g + config.penalty * 2.0 * p * gp for g, gp in zip(grads, pg)]
    return grads


def apply_step(net, grads, step_size):
    factors = lr_factors(net)
    layers = [
        a - step_size * s * g for a, g, s in zip(net.layers(), grads, factors)
    ]
    return MeanFieldNet(layers[0], tuple(layers[1:-1]), layers[-1])


def gd_step(net, spec, config, rng=None):
    """One explicit-Euler step of the layer-scaled flow."""
    rng = rng or np.random.default_rng(config.seed)
    xs, ys = spec.batch(rng)
    return apply_step(net, objective_gradients(net, spec, xs, ys, config), config.step_size)


def dissipation_residual(net, spec, xs, ys, step_size, sigma_prime_at_zero=0.0):
    """|dR/h + sum_l factor_l ||grad_l||^2| for one step from this state."""
    grads = gradients(net, spec, xs, ys, sigma_prime_at_zero)
    diss = sum(
        s * float(np.sum(g**2)) for g, s in zip(grads, lr_factors(net))
    )
    nxt = apply_step(net, grads, step_size)
    dr = risk_value(nxt, spec, xs, ys) - risk_value(net, spec, xs, ys)
    return abs(dr / step_size + diss)


def train(net, spec, config):
    """Run T scaled-GD steps and log the monitored quantities.

    moment_slack is the largest ratio of any layer norm to its bound
    ||a(0)|| + sqrt(R0) sqrt(t); proxy_slack the analogous ratio for the
    path proxy against (C0 + sqrt(R0) sqrt(t))^(L+1).
    """
    rng = np.random.default_rng(config.seed)
    log = TrajectoryLog(config.sigma_prime_at_zero, config.penalty)
    eval_xs, eval_ys = spec.eval_batch(config.eval_points, config.seed + 77_777)
    r0 = risk_value(net, spec, eval_xs, eval_ys)
    norms0 = layer_l2_norms(net)
    c0 = float(norms0.max())
    L = net.depth
    initial = r0

    def checkpoint(step):
        t = step * config.step_size
        risk = risk_value(net, spec, eval_xs, eval_ys)
        norms = layer_l2_norms(net)
        proxy = path_norm_proxy(net)
        growth = np.sqrt(r0) * np.sqrt(t)
        moment_slack = float(np.max(norms / (norms0 + growth)))
        proxy_slack = float(proxy / (c0 + growth) ** (L + 1))
        xs, ys = spec.batch(rng)
        res = dissipation_residual(
            net, spec, xs, ys, config.step_size, config.sigma_prime_at_zero
        )
        log.append(
            step=step, t=t, risk=risk, norms=norms, proxy=proxy,
            Q=float(np.prod(norms)), dissipation_residual=res,
            moment_slack=moment_slack, proxy_slack=proxy_slack,
        )
        return risk

    checkpoint(0)
    # blowups are detected explicitly below; silence the overflow chatter
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, config.steps + 1):
            try:
                net = gd_step(net, spec, config, rng)
            except ShapeError:
                raise Diverged(f"non-finite weights at step {step}", partial_log=log)
            if step % config.checkpoint_every == 0 or step == config.steps:
                risk = checkpoint(step)
                # absolute floor so near-interpolating starts are not flagged
                if not np.isfinite(risk) or risk > 1e6 * (initial + 1.0):
                    raise Diverged(f"risk {risk} at step {step}", partial_log=log)
    log.final_net = net
    return log


def train_regularized(net, spec, config):
    """Training with the squared-path-proxy penalty already set in config."""
    if config.penalty < 0:
        raise ValueError("penalty must be nonnegative")
    return train(net, spec, config)


def probe_stable_step(net, spec, h0=1e-2, epoch=50, max_halvings=20, seed=0):
    """Halve the step size until one epoch of full-batch GD is monotone."""
    h = h0
    for _ in range(max_halvings):
        cfg = TrainConfig(step_size=h, steps=epoch, checkpoint_every=1, seed=seed)
        try:
            log = train(net, spec, cfg)
        except Diverged:
            h /= 2.0
            continue
        risks = log.column("risk")
        if all(b <= a + 1e-12 for a, b in zip(risks, risks[1:])):
            return h
        h /= 2.0
    raise RuntimeError("no stable step size found")
