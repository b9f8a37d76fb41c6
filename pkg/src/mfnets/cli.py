"""Experiment runner: one subcommand per capability, CSV outputs, explicit
seeds, flat key=value config files.

Exit codes: 0 success, 2 validation error (one-line diagnostic on stderr),
3 training divergence.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import calculus, complexity, maurey, serialize
from .data import DataDistribution, dataset_from_csv, label, random_net
from .errors import Diverged, MFNetsError
from .nets import net_to_tree, tree_to_net, MeanFieldNet, NeuralTree
from .norms import balance, hilbert_complexity, path_norm_proxy, path_norm_proxy_tree
from .training import (
    RiskSpec,
    TrainConfig,
    dissipation_residual,
    train,
    train_regularized,
)


def _floats(s):
    return [float(v) for v in s.split(",")]


def _ints(s):
    return [int(v) for v in s.split(",")]


def _dist(args):
    return DataDistribution(args.dist, args.dim, args.radius)


def _load_net(path):
    obj = serialize.load(path)
    if not isinstance(obj, MeanFieldNet):
        raise MFNetsError(f"{path}: expected a network file, got a tree")
    return obj


def _load_tree(path):
    obj = serialize.load(path)
    if not isinstance(obj, NeuralTree):
        raise MFNetsError(f"{path}: expected a tree file, got a network")
    return obj


def _config_argv(argv):
    """Expand --config key=value files into leading long options, so flags
    given on the command line override the file."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2 :]
    expanded = []
    with open(path) as fh:
        for ln in fh:
            ln = ln.split("#")[0].strip()
            if not ln:
                continue
            key, _, value = ln.partition("=")
            expanded += [f"--{key.strip().replace('_', '-')}", value.strip()]
    # keep the subcommand first
    return rest[:1] + expanded + rest[1:]


def _print_seed(seed):
    print(f"seed={seed}")


def cmd_eval(args):
    net = serialize.load(args.net)
    if args.x is not None:
        pts = np.array([_floats(args.x)])
    else:
        pts = dataset_from_csv(args.points).xs
    for v in net.forward_many(pts):
        print(repr(float(v)))
    return 0


def cmd_pathnorm(args):
    obj = serialize.load(args.net)
    if isinstance(obj, NeuralTree):
        print(f"proxy={path_norm_proxy_tree(obj)!r}")
        return 0
    report = hilbert_complexity(obj)
    print(f"proxy={report.proxy!r}")
    print(f"Q={report.hilbert_q!r}")
    print("layer_norms=" + ",".join(repr(float(v)) for v in report.per_layer_l2))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("proxy,Q," + ",".join(
                f"norm_l{i}" for i in range(len(report.per_layer_l2))) + "\n")
            fh.write(report.to_csv_row() + "\n")
    return 0


def cmd_balance(args):
    serialize.save(balance(_load_net(args.net)), args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_to_tree(args):
    serialize.save(net_to_tree(_load_net(args.net)), args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_flatten(args):
    serialize.save(tree_to_net(_load_tree(args.net)), args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_maurey(args):
    net = _load_net(args.net)
    _print_seed(args.seed)
    res = maurey.maurey_subsample(net, args.m, _dist(args), args.seed, args.n_eval)
    if args.check:
        tree_proxy = path_norm_proxy_tree(res.tree)
        if tree_proxy > res.target_proxy * (1 + 1e-9):
            print("check failed: tree proxy exceeds source proxy", file=sys.stderr)
            return 2
        if res.tree.branching != (args.m,) * net.depth:
            print("check failed: wrong branching", file=sys.stderr)
            return 2
    if args.tree_out:
        serialize.save(res.tree, args.tree_out)
    with open(args.out, "w") as fh:
        fh.write("m,proxy,l2_error,bound,seed\n")
        fh.write(
            f"{res.m},{res.target_proxy!r},{res.l2_error!r},{res.bound!r},{args.seed}\n"
        )
    print(f"l2_error={res.l2_error!r} bound={res.bound!r}")
    return 0


def cmd_rate_sweep(args):
    net = _load_net(args.net)
    _print_seed(args.seeds)
    rows, slope = maurey.rate_sweep(net, _ints(args.ms), _dist(args), args.seeds, args.out)
    print(f"slope={slope!r}")
    for r in rows:
        print(f"m={r['m']} mean_error={r['mean_error']!r} bound={r['bound']!r}")
    return 0


def _risk_spec(args, loss="squared"):
    if args.data:
        return RiskSpec(loss=loss, dataset=dataset_from_csv(args.data))
    if not args.target:
        raise MFNetsError("need --data or --target")
    return RiskSpec(
        loss=loss,
        dist=_dist(args),
        target=_load_net(args.target),
        batch_size=args.batch,
    )


def _run_train(args, penalty):
    net = _load_net(args.net)
    spec = _risk_spec(args)
    _print_seed(args.seed)
    cfg = TrainConfig(
        step_size=args.h,
        steps=args.steps,
        penalty=penalty,
        sigma_prime_at_zero=args.sigma_prime_at_zero,
        seed=args.seed,
        checkpoint_every=args.checkpoint_every,
    )
    log = train_regularized(net, spec, cfg) if penalty > 0 else train(net, spec, cfg)
    if args.check:
        rng = np.random.default_rng(args.seed)
        xs, ys = spec.batch(rng)
        r1 = dissipation_residual(net, spec, xs, ys, args.h)
        r2 = dissipation_residual(net, spec, xs, ys, args.h / 2.0)
        if r2 > r1 / 1.5 + 1e-12:
            print("check failed: dissipation residual not O(h)", file=sys.stderr)
            return 2
    log.to_csv(args.out)
    if args.net_out:
        serialize.save(log.final_net, args.net_out)
    last = log.checkpoints[-1]
    print(f"final_risk={last['risk']!r} proxy={last['proxy']!r}")
    return 0


def cmd_train(args):
    return _run_train(args, penalty=0.0)


def cmd_train_reg(args):
    return _run_train(args, penalty=args.penalty)


def cmd_rademacher(args):
    if args.mode == "constants":
        print(f"value={complexity.rademacher_constants(args.n)!r}")
        return 0
    if args.points:
        S = complexity.SampleSet(dataset_from_csv(args.points).xs)
    else:
        _print_seed(args.seed)
        S = complexity.SampleSet(_dist(args).sample(args.n, args.seed))
    if args.mode == "affine":
        value = complexity.rademacher_affine_exact(S, args.draws, args.seed)
        bound = complexity.affine_rad_bound(S.dim, S.n)
    else:  # deep
        value = complexity.rademacher_deep_lower(S, args.depth, args.budget, args.seed)
        bound = complexity.deep_rad_bound(args.depth, S.dim, S.n)
    print(f"value={value!r}")
    print(f"bound={bound!r}")
    return 0


def cmd_gen_gap(args):
    f_star = _load_net(args.target)
    seeds = _ints(args.seeds)
    _print_seed(args.seeds)
    reports = complexity.generalization_gap_experiment(
        f_star, args.n, args.m, seeds, steps=args.steps, step_size=args.h
    )
    with open(args.out, "w") as fh:
        fh.write(complexity.GapReport.CSV_HEADER + "\n")
        for r in reports:
            fh.write(r.to_csv_row() + "\n")
    held = sum(r.bound_holds for r in reports)
    print(f"bound_held={held}/{len(reports)}")
    return 0


def cmd_compose(args):
    g = _load_net(args.g)
    fs = [_load_net(p) for p in args.fs.split(",")]
    serialize.save(calculus.compose(g, fs), args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_make_target(args):
    _print_seed(args.seed)
    net = random_net(
        args.depth, _ints(args.widths), args.dim, args.proxy, args.law, args.seed
    )
    serialize.save(net, args.out)
    if args.sample:
        pts = _dist(args).sample(args.sample, args.seed + 1)
        label(net, pts, provenance={"seed": args.seed, "target": args.out}).to_csv(
            args.sample_out
        )
    print(f"wrote {args.out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="mfnets", description=__doc__)
    p.add_argument("--threads", type=int, default=1, help="reserved; default 1 for reproducibility")
    sub = p.add_subparsers(dest="command", required=True)

    def dist_flags(sp):
        sp.add_argument("--dist", default="uniform_cube", choices=DataDistribution.KINDS)
        sp.add_argument("--dim", type=int, default=2)
        sp.add_argument("--radius", type=float, default=1.0)

    sp = sub.add_parser("eval", help="evaluate a net or tree at points")
    sp.add_argument("net")
    sp.add_argument("--x", help="comma-separated coordinates of one point")
    sp.add_argument("--points", help="dataset CSV of evaluation points")
    sp.set_defaults(fn=cmd_eval)

    sp = sub.add_parser("pathnorm", help="path-norm proxy, Q and layer norms")
    sp.add_argument("net")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_pathnorm)

    sp = sub.add_parser("balance", help="equalize layer norms")
    sp.add_argument("net")
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_balance)

    sp = sub.add_parser("to-tree", help="unshare a net into a neural tree")
    sp.add_argument("net")
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_to_tree)

    sp = sub.add_parser("flatten", help="flatten a tree into a block-sparse net")
    sp.add_argument("net")
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_flatten)

    sp = sub.add_parser("maurey", help="subsample a net into a width-m tree")
    sp.add_argument("net")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--n-eval", type=int, default=4096)
    sp.add_argument("--out", default="maurey.csv")
    sp.add_argument("--tree-out")
    sp.add_argument("--check", action="store_true")
    dist_flags(sp)
    sp.set_defaults(fn=cmd_maurey)

    sp = sub.add_parser("rate-sweep", help="Maurey error rate over widths")
    sp.add_argument("net")
    sp.add_argument("--ms", required=True, help="increasing widths, e.g. 4,16,64")
    sp.add_argument("--seeds", type=int, default=20)
    sp.add_argument("--out", default="rate_sweep.csv")
    dist_flags(sp)
    sp.set_defaults(fn=cmd_rate_sweep)

    def train_flags(sp):
        sp.add_argument("net")
        sp.add_argument("--data", help="training dataset CSV (empirical risk)")
        sp.add_argument("--target", help="target net file (population risk)")
        sp.add_argument("--batch", type=int, default=64)
        sp.add_argument("--h", type=float, default=1e-3)
        sp.add_argument("--steps", type=int, default=1000)
        sp.add_argument("--seed", type=int, required=True)
        sp.add_argument("--checkpoint-every", type=int, default=100)
        sp.add_argument("--sigma-prime-at-zero", type=float, default=0.0)
        sp.add_argument("--out", default="trajectory.csv")
        sp.add_argument("--net-out")
        sp.add_argument("--check", action="store_true")
        dist_flags(sp)

    sp = sub.add_parser("train", help="layer-scaled gradient descent")
    train_flags(sp)
    sp.set_defaults(fn=cmd_train)

    sp = sub.add_parser("train-reg", help="training with the proxy^2 penalty")
    train_flags(sp)
    sp.add_argument("--penalty", type=float, required=True)
    sp.set_defaults(fn=cmd_train_reg)

    sp = sub.add_parser("rademacher", help="empirical complexity estimators")
    sp.add_argument("--mode", choices=["affine", "constants", "deep"], required=True)
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--draws", type=int, default=10_000)
    sp.add_argument("--depth", type=int, default=1)
    sp.add_argument("--budget", type=int, default=3)
    sp.add_argument("--points", help="dataset CSV providing the sample")
    dist_flags(sp)
    sp.set_defaults(fn=cmd_rademacher)

    sp = sub.add_parser("gen-gap", help="a-priori generalization bound experiment")
    sp.add_argument("--target", required=True)
    sp.add_argument("--n", type=int, default=2000)
    sp.add_argument("--m", type=int, default=32)
    sp.add_argument("--seeds", default="0,1,2,3,4,5,6,7,8,9")
    sp.add_argument("--steps", type=int, default=800)
    sp.add_argument("--h", type=float, default=0.005)
    sp.add_argument("--out", default="gen_gap.csv")
    sp.set_defaults(fn=cmd_gen_gap)

    sp = sub.add_parser("compose", help="compose an outer net with components")
    sp.add_argument("--g", required=True)
    sp.add_argument("--fs", required=True, help="comma-separated component net files")
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_compose)

    sp = sub.add_parser("make-target", help="random net with exact proxy")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--widths", required=True)
    sp.add_argument("--proxy", type=float, default=1.0)
    sp.add_argument("--law", default="gaussian", choices=["gaussian", "uniform"])
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--sample", type=int, default=0, help="also emit a labeled sample")
    sp.add_argument("--sample-out", default="sample.csv")
    dist_flags(sp)
    sp.set_defaults(fn=cmd_make_target)
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_config_argv(argv))
        return args.fn(args)
    except Diverged as exc:
        print(f"error: training diverged: {exc}", file=sys.stderr)
        return 3
    except (MFNetsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
