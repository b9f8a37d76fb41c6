"""Empirical Rademacher complexity estimators and the generalization-gap
experiment.

The affine-class estimator is exact in the inner supremum (the l1-ball sup
is a coordinate max) and exhaustive over sign patterns for small samples.
The deep-class value is NP-hard, so we report lower estimates from
projected gradient ascent against the analytic 2^L upper bound; a gap is
expected and never treated as failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .data import DataDistribution, Dataset, random_net
from .errors import Diverged
from .nets import MeanFieldNet, augment
from .norms import path_norm_proxy
from .training import (
    RiskSpec,
    TrainConfig,
    apply_step,
    output_gradients,
    risk_value,
    train_regularized,
)

EXHAUSTIVE_SIGN_LIMIT = 20
EXHAUSTIVE_BINOMIAL_LIMIT = 30


@dataclass(frozen=True)
class SampleSet:
    """Sample points inside the unit cube [-1, 1]^d."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, float))
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("points must be a nonempty n x d matrix")
        if np.abs(pts).max() > 1.0 + 1e-12:
            raise ValueError("sample points must lie in [-1, 1]^d")

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]


def affine_rad_bound(d, N):
    """Analytic bound sqrt(2 log(2d+2)/N) for the l1-ball affine class."""
    return float(np.sqrt(2.0 * np.log(2.0 * d + 2.0) / N))


def deep_rad_bound(L, d, N):
    """Analytic bound 2^L sqrt(2 log(2d+2)/N) for the depth-L proxy ball."""
    return float(2.0**L * affine_rad_bound(d, N))


def _sign_matrix(lo, hi, N):
    """Sign patterns lo..hi-1 as rows of +-1, bit i = sign of point i."""
    codes = np.arange(lo, hi, dtype=np.int64)[:, None]
    return ((codes >> np.arange(N)) & 1) * 2.0 - 1.0


def _affine_sup(signs, xa, N):
    """Inner supremum per sign row: max_j |(1/N) sum_i xi_i (x_i, 1)_j|."""
    return np.abs(signs @ xa / N).max(axis=1)


def rademacher_affine_exact(S: SampleSet, n_draws=10_000, seed=0):
    """Empirical Rademacher complexity of the l1-unit-ball affine class.

    Exhaustive over the 2^N sign patterns when N <= 20, Monte-Carlo over
    n_draws sign vectors otherwise.
    """
    value, _ = rademacher_affine_estimate(S, n_draws, seed)
    return value


def rademacher_affine_estimate(S: SampleSet, n_draws=10_000, seed=0, force_mc=False):
    """(estimate, standard error); the error is 0 in the exhaustive regime.

    force_mc skips the exhaustive branch, for cross-checking the sampler."""
    N = S.n
    xa = augment(S.points, S.dim)
    if N <= EXHAUSTIVE_SIGN_LIMIT and not force_mc:
        total = 0.0
        chunk = 1 << 16
        for lo in range(0, 1 << N, chunk):
            hi = min(lo + chunk, 1 << N)
            total += _affine_sup(_sign_matrix(lo, hi, N), xa, N).sum()
        return total / (1 << N), 0.0
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1 in the Monte-Carlo regime")
    rng = np.random.default_rng(seed)
    signs = rng.choice([-1.0, 1.0], size=(n_draws, N))
    vals = _affine_sup(signs, xa, N)
    se = float(vals.std(ddof=1) / np.sqrt(n_draws)) if n_draws > 1 else 0.0
    return float(vals.mean()), se


def rademacher_constants(N, n_draws=100_000, seed=0):
    """E|sum_i xi_i| / N for the two-element class {-1, +1}.

    Exact via binomial enumeration for N <= 30."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N <= EXHAUSTIVE_BINOMIAL_LIMIT:
        total = sum(comb(N, k) * abs(2 * k - N) for k in range(N + 1))
        return total / (2**N * N)
    rng = np.random.default_rng(seed)
    signs = rng.choice([-1.0, 1.0], size=(n_draws, N))
    return float(np.mean(np.abs(signs.sum(axis=1))) / N)


def _project_unit_proxy(net):
    """Exact projection onto {proxy <= 1} by outer-layer rescaling."""
    p = path_norm_proxy(net)
    if p > 1.0:
        return net.replace(outer=net.outer / p)
    return net


def _ascend_correlation(xs, signs, L, seed, steps=150, lr=0.5):
    """Maximize (1/N) sum_i xi_i h(x_i) over the unit proxy ball by
    projected gradient ascent from one random start."""
    N, d = xs.shape
    net = random_net(L, (8,) * L, d, proxy_target=1.0, seed=seed)
    dout = signs / N
    for _ in range(steps):
        grads = output_gradients(net, xs, dout, sigma_prime_at_zero=0.0)
        net = apply_step(net, [-g for g in grads], lr)
        net = _project_unit_proxy(net)
    corr = float(dout @ net.forward_many(xs))
    return abs(corr)  # the ball is symmetric, so sup >= |corr|


def rademacher_deep_lower_estimate(S: SampleSet, L, budget, seed, n_draws=20):
    """(mean, se, per-draw maxima) of the ascent lower estimate.

    Restart seeds are nested, so the estimate is non-decreasing in budget
    (asserted); budget=0 returns the vacuous lower bound 0."""
    if budget < 0:
        raise ValueError("budget must be >= 0")
    if budget == 0:
        return 0.0, 0.0, np.zeros(n_draws)
    rng = np.random.default_rng(seed)
    xs = S.points
    maxima = np.zeros(n_draws)
    for t in range(n_draws):
        signs = rng.choice([-1.0, 1.0], size=S.n)
        running = 0.0
        for r in range(budget):
            val = _ascend_correlation(xs, signs, L, seed=seed + 1000 * t + r)
            prev = running
            running = max(running, val)
            assert running >= prev  # monotone in restarts by construction
        maxima[t] = running
    se = float(maxima.std(ddof=1) / np.sqrt(n_draws)) if n_draws > 1 else 0.0
    return float(maxima.mean()), se, maxima


def rademacher_deep_lower(S: SampleSet, L, budget, seed, n_draws=20):
    """Mean ascent lower estimate of the depth-L unit-proxy-ball complexity."""
    mean, _, _ = rademacher_deep_lower_estimate(S, L, budget, seed, n_draws)
    return mean


@dataclass(frozen=True)
class GapReport:
    seed: int
    train_risk: float
    test_risk: float
    term_approx: float
    term_rademacher: float
    term_concentration: float
    bound: float
    student_proxy: float
    bound_holds: bool

    CSV_HEADER = (
        "seed,train_risk,test_risk,term_approx,term_rademacher,"
        "term_concentration,bound,student_proxy,bound_holds"
    )

    def to_csv_row(self):
        return ",".join(
            [
                str(self.seed),
                repr(self.train_risk),
                repr(self.test_risk),
                repr(self.term_approx),
                repr(self.term_rademacher),
                repr(self.term_concentration),
                repr(self.bound),
                repr(self.student_proxy),
                str(int(self.bound_holds)),
            ]
        )


def a_priori_bound_terms(L, d, N, m, proxy_star, delta=0.1, radius=1.0):
    """The three terms of the a-priori risk bound for the regularized fit."""
    p = proxy_star
    cap = 4.0 * (1.0 + radius) ** 2 * p**2
    term1 = 18.0 * L**2 * p**2 / m
    term2 = 2.0 ** (L + 1.5) * p * np.sqrt(2.0 * np.log(2 * d + 2) / N)
    term3 = cap * np.sqrt(2.0 * np.log(2.0 / delta) / N)
    return float(term1), float(term2), float(term3)


def generalization_gap_experiment(
    f_star: MeanFieldNet,
    N,
    m,
    seeds,
    delta=0.1,
    steps=800,
    step_size=0.005,
    test_points=100_000,
):
    """Regularized fit of noiseless f*-labels on N samples, per seed.

    Trains a width-(m, ..., m) student with the path-proxy-squared penalty
    (strength 9 L^2 / m), measures clipped test risk on fresh points, and
    compares against the three-term a-priori bound at confidence delta.
    """
    L, d = f_star.depth, f_star.input_dim
    p = path_norm_proxy(f_star)
    cap = 4.0 * (1.0 + 1.0) ** 2 * p**2
    term1, term2, term3 = a_priori_bound_terms(L, d, N, m, p, delta)
    bound = term1 + term2 + term3
    dist = DataDistribution("uniform_cube", d)
    reports = []
    for seed in seeds:
        xs = dist.sample(N, seed)
        data = Dataset(xs, f_star.forward_many(xs))
        spec = RiskSpec(loss="clipped_squared", cap=cap, dataset=data)
        student = random_net(L, (m,) * L, d, proxy_target=p, seed=seed + 1)
        # retry with halved steps if the initial step size is unstable for
        # this target/penalty combination
        h = step_size
        for _ in range(8):
            cfg = TrainConfig(
                step_size=h,
                steps=steps,
                penalty=9.0 * L**2 / m,
                seed=seed,
                checkpoint_every=max(steps // 10, 1),
            )
            try:
                log = train_regularized(student, spec, cfg)
                break
            except Diverged:
                h /= 2.0
        else:
            raise Diverged(f"no stable step size found for seed {seed}")
        fitted = log.final_net
        test_xs = dist.sample(test_points, seed + 500_000)
        test_ys = f_star.forward_many(test_xs)
        test_risk = risk_value(fitted, spec, test_xs, test_ys)
        reports.append(
            GapReport(
                seed=seed,
                train_risk=risk_value(fitted, spec, xs, data.ys),
                test_risk=test_risk,
                term_approx=term1,
                term_rademacher=term2,
                term_concentration=term3,
                bound=bound,
                student_proxy=path_norm_proxy(fitted),
                bound_holds=bool(test_risk <= bound),
            )
        )
    return reports
