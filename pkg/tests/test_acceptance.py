"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest -v tests/test_acceptance.py`; the verbose listing gives one
PASSED/FAILED line per criterion, and each test also prints an explicit
summary line (visible with -s or on failure).
"""

import numpy as np
import pytest

import mfnets as mf
from mfnets.complexity import (
    SampleSet,
    affine_rad_bound,
    deep_rad_bound,
    rademacher_affine_estimate,
    rademacher_deep_lower_estimate,
)
from mfnets.training import _forward_pass, gradients, risk_value
from mfnets import calculus


def _report(idx, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {idx} ({name}): {status} {detail}".rstrip())
    assert ok, f"criterion {idx} ({name}) failed: {detail}"


def _random_arch(rng, max_depth=3, max_width=8, max_dim=4):
    depth = int(rng.integers(1, max_depth + 1))
    widths = tuple(int(rng.integers(1, max_width + 1)) for _ in range(depth))
    d = int(rng.integers(1, max_dim + 1))
    return depth, widths, d


def test_criterion_01_net_tree_equivalence():
    rng = np.random.default_rng(101)
    worst_val, worst_proxy = 0.0, 0.0
    for i in range(100):
        depth, widths, d = _random_arch(rng)
        net = mf.random_net(depth, widths, d, 0.5 + 2 * rng.random(), seed=1000 + i)
        tree = mf.net_to_tree(net)
        xs = np.random.default_rng(2000 + i).uniform(-1, 1, (50, d))
        fv, tv = net(xs), tree(xs)
        scale = np.maximum(np.abs(fv), 1.0)
        worst_val = max(worst_val, float(np.max(np.abs(fv - tv) / scale)))
        pn, pt = mf.path_norm_proxy(net), mf.path_norm_proxy_tree(tree)
        worst_proxy = max(worst_proxy, abs(pn - pt) / max(pn, 1.0))
    _report(1, "net/tree equivalence", worst_val <= 1e-12 and worst_proxy <= 1e-12,
            f"max rel value diff {worst_val:.2e}, proxy diff {worst_proxy:.2e}")


def test_criterion_02_pathnorm_dp_vs_brute():
    rng = np.random.default_rng(202)
    worst = 0.0
    checked = 0
    while checked < 50:
        depth, widths, d = _random_arch(rng, max_width=6)
        net = mf.random_net(depth, widths, d, 1.0, seed=3000 + checked)
        if mf.path_count(net) > 100_000:
            continue
        dp = mf.path_norm_proxy(net)
        brute = mf.path_norm_proxy_brute(net)
        worst = max(worst, abs(dp - brute) / max(dp, 1e-300))
        checked += 1
    _report(2, "DP vs brute-force path norm", worst <= 1e-12,
            f"max rel diff {worst:.2e}")


def test_criterion_03_proxy_below_q():
    rng = np.random.default_rng(303)
    ok = True
    for i in range(1000):
        depth, widths, d = _random_arch(rng)
        net = mf.random_net(depth, widths, d, 0.2 + 3 * rng.random(), seed=4000 + i)
        rep = mf.hilbert_complexity(net)
        ok = ok and rep.proxy <= rep.hilbert_q * (1 + 1e-12)
    # equality for constant-weight nets
    eq_gap = 0.0
    for c in (0.5, 1.0, 2.0):
        net = mf.MeanFieldNet(np.full((4, 3), c), (np.full((5, 4), -c),), np.full(5, c))
        rep = mf.hilbert_complexity(net)
        eq_gap = max(eq_gap, abs(rep.proxy - rep.hilbert_q) / rep.hilbert_q)
    _report(3, "proxy <= Q with constant-weight equality",
            ok and eq_gap <= 1e-10, f"equality gap {eq_gap:.2e}")


def test_criterion_04_maurey_rates():
    dist = mf.DataDistribution("uniform_cube", 2)
    src = mf.random_net(1, (256,), 2, 2.0, seed=44)
    proxy = mf.path_norm_proxy(src)
    ms = [4, 16, 64, 256]
    mses = []
    ok_mse = True
    for m in ms:
        errs = np.array(
            [mf.maurey_subsample(src, m, dist, seed=s, n_eval=2048).l2_error
             for s in range(200)]
        )
        mse = float(np.mean(errs**2))
        mses.append(float(np.mean(errs)))
        ok_mse = ok_mse and mse <= proxy**2 / m
    slope = float(np.polyfit(np.log(ms), np.log(mses), 1)[0])
    ok_slope = -0.65 <= slope <= -0.35

    src2 = mf.random_net(2, (64, 64), 2, 1.5, seed=45)
    hits = 0
    for s in range(50):
        res = mf.maurey_subsample(src2, 16, dist, seed=s, n_eval=2048)
        hits += res.l2_error <= res.bound
    ok_deep = hits / 50 >= 0.9
    _report(4, "Maurey approximation rate", ok_mse and ok_slope and ok_deep,
            f"slope {slope:.3f}, deep bound freq {hits}/50")


def test_criterion_05_gradient_check():
    rng = np.random.default_rng(505)
    worst = 0.0
    checked_nets = 0
    attempt = 0
    while checked_nets < 20:
        depth, widths, d = _random_arch(rng)
        net = mf.random_net(depth, widths, d, 1.0 + rng.random(), seed=5000 + attempt)
        attempt += 1
        xs = np.random.default_rng(6000 + attempt).uniform(-1, 1, (30, d))
        # keep only kink-free points: every preactivation away from 0
        _, zs, _, _, _ = _forward_pass(net, xs, 0.0)
        clear = np.ones(len(xs), bool)
        for z in zs:
            clear &= np.abs(z).min(axis=1) > 1e-3
        if clear.sum() < 5:
            continue
        xs, ys = xs[clear], np.sin(xs[clear].sum(axis=1))
        spec = mf.RiskSpec(dataset=mf.Dataset(xs, ys))
        grads = gradients(net, spec, xs, ys)
        layers = net.layers()
        for li, a in enumerate(layers):
            flat = a.ravel()
            idxs = rng.choice(flat.size, size=min(6, flat.size), replace=False)
            for i in idxs:
                def value_at(v):
                    ls = [x.copy() for x in layers]
                    ls[li].ravel()[i] = v
                    n2 = mf.MeanFieldNet(ls[0], tuple(ls[1:-1]), ls[-1])
                    return risk_value(n2, spec, xs, ys)

                orig = flat[i]
                fd = (value_at(orig + 1e-6) - value_at(orig - 1e-6)) / 2e-6
                an = grads[li].ravel()[i]
                # skip near-zero entries: cancellation noise in the central
                # difference dominates the quotient there
                if max(abs(fd), abs(an)) > 1e-5:
                    worst = max(worst, abs(fd - an) / max(abs(fd), abs(an)))
        checked_nets += 1
    _report(5, "backprop vs central differences", worst <= 1e-5,
            f"max rel error {worst:.2e}")


def test_criterion_06_norm_growth():
    dist = mf.DataDistribution("uniform_cube", 2)
    worst_moment, worst_proxy = 0.0, 0.0
    for seed in range(5):
        xs = dist.sample(512, 7000 + seed)
        target = mf.random_net(2, (8, 8), 2, 1.5, seed=7100 + seed)
        data = mf.Dataset(xs, target.forward_many(xs))
        spec = mf.RiskSpec(dataset=data)
        net = mf.random_net(2, (16, 16), 2, 1.0, seed=7200 + seed)
        log = mf.train(
            net, spec,
            mf.TrainConfig(step_size=1e-3, steps=10_000, checkpoint_every=100,
                           seed=seed),
        )
        worst_moment = max(worst_moment, max(log.column("moment_slack")))
        worst_proxy = max(worst_proxy, max(log.column("proxy_slack")))
    ok = worst_moment <= 1.05 and worst_proxy <= 1.05
    _report(6, "sqrt-t norm growth", ok,
            f"moment slack {worst_moment:.4f}, proxy slack {worst_proxy:.4f}")


def test_criterion_07_energy_dissipation():
    dist = mf.DataDistribution("uniform_cube", 2)
    ok = True
    worst_ratio = np.inf
    for state in range(5):
        xs = dist.sample(64, 8000 + state)
        ys = np.sin(xs.sum(axis=1))
        spec = mf.RiskSpec(dataset=mf.Dataset(xs, ys))
        net = mf.random_net(2, (8, 8), 2, 1.0 + 0.2 * state, seed=8100 + state)
        residuals = [
            mf.dissipation_residual(net, spec, xs, ys, h)
            for h in (1e-3, 5e-4, 2.5e-4)
        ]
        for a, b in zip(residuals, residuals[1:]):
            ratio = a / b if b > 0 else np.inf
            worst_ratio = min(worst_ratio, ratio)
            ok = ok and ratio >= 1.8
    _report(7, "energy dissipation residual O(h)", ok,
            f"worst halving ratio {worst_ratio:.2f}")


def test_criterion_08_rademacher():
    # (a) exhaustive affine value on the tiny instance
    val_a = mf.rademacher_affine_exact(SampleSet(np.array([[1.0], [-1.0]])))
    ok_a = abs(val_a - 1.0) <= 1e-12
    # (b) Monte-Carlo affine estimates against the analytic bound
    rng = np.random.default_rng(808)
    ok_b = True
    for i in range(20):
        d = int(rng.integers(1, 9))
        N = int(rng.integers(30, 501))
        S = SampleSet(rng.uniform(-1, 1, (N, d)))
        est, se = rademacher_affine_estimate(S, n_draws=2000, seed=i, force_mc=True)
        ok_b = ok_b and est <= affine_rad_bound(d, N) + 3 * se
    # (c) constants class vs asymptotics
    v30 = mf.rademacher_constants(30)
    asym = np.sqrt(2.0 / (np.pi * 30))
    ok_c = abs(v30 - asym) / asym <= 0.05
    # (d) deep lower estimates against the 2^L bound
    ok_d = True
    for L in (1, 2):
        S = SampleSet(np.random.default_rng(80 + L).uniform(-1, 1, (100, 2)))
        mean, se, _ = rademacher_deep_lower_estimate(S, L, budget=2, seed=0, n_draws=8)
        ok_d = ok_d and mean <= deep_rad_bound(L, 2, 100) + 3 * se
    _report(8, "Rademacher estimators", ok_a and ok_b and ok_c and ok_d,
            f"a={ok_a} b={ok_b} c={ok_c} d={ok_d}")


def test_criterion_09_calculus_semantics():
    rng = np.random.default_rng(909)
    xs = rng.uniform(-1, 1, (100, 3))
    f = mf.random_net(2, (5, 4), 3, 1.2, seed=91)
    g = mf.random_net(2, (3, 4), 3, 0.9, seed=92)
    fa, ga = f(xs), g(xs)
    worst = max(
        float(np.max(np.abs(calculus.abs_of(f)(xs) - np.abs(fa)))),
        float(np.max(np.abs(calculus.max_of(f, g)(xs) - np.maximum(fa, ga)))),
        float(np.max(np.abs(calculus.min_of(f, g)(xs) - np.minimum(fa, ga)))),
        float(np.max(np.abs(calculus.add(f, g)(xs) - (fa + ga)))),
        float(np.max(np.abs(
            calculus.compose(calculus.identity_net(), [f])(xs) - fa))),
    )
    ok_exact = worst <= 1e-12
    M, n = 2.0, 50
    grid = np.linspace(-M, M, 1000)[:, None]
    sq_err = float(np.max(np.abs(
        calculus.square_barron(M, n)(grid) - np.maximum(grid[:, 0], 0) ** 2)))
    ok_square = sq_err <= M**2 / (4 * n)
    bound = 2.0
    prod = calculus.product_of(f, g, bound, 200)
    prod_err = float(np.max(np.abs(prod(xs) - fa * ga)))
    ok_prod = prod_err <= 2 * (2 * bound) ** 2 / (4 * 200)
    _report(9, "calculus semantics", ok_exact and ok_square and ok_prod,
            f"exact {worst:.2e}, square {sq_err:.2e}, product {prod_err:.2e}")


def test_criterion_10_generalization_bound():
    f_star = mf.random_net(2, (4, 4), 2, 1.0, seed=1010)
    p_star = mf.path_norm_proxy(f_star)
    reports = mf.generalization_gap_experiment(f_star, 2000, 32, list(range(10)))
    held = sum(r.bound_holds for r in reports)
    proxy_ok = sum(
        r.student_proxy <= np.sqrt(2.0) * p_star * 1.5 for r in reports
    )
    _report(10, "a-priori generalization bound", held >= 9 and proxy_ok >= 8,
            f"bound {held}/10, proxy {proxy_ok}/10")
