"""Maurey subsampling: O(1/sqrt(m)) approximation by width-m trees.

A wide network is a mixture over its top-layer neurons.  Sampling m of
them proportionally to their mixture mass (recursively through the
depth) yields a complete branching-m tree whose L2 error decays like
m^(-1/2) while its path proxy never exceeds the source's.
"""

import mfnets as mf

dist = mf.DataDistribution("uniform_cube", 2)
src = mf.random_net(depth=1, widths=(256,), input_dim=2, proxy_target=2.0, seed=3)

rows, slope = mf.rate_sweep(src, ms=[4, 8, 16, 32, 64, 128], dist=dist, seeds=50)
print("m      mean L2 error   analytic bound   tree params")
for r in rows:
    print(f"{r['m']:<6d} {r['mean_error']:<15.6f} {r['bound']:<16.4f} "
          f"{r['tree_param_count']}")
print(f"fitted log-log slope: {slope:.3f}  (theory: -1/2)")

# a deep source subsamples recursively into a tree, same guarantee per layer
deep = mf.random_net(depth=2, widths=(64, 64), input_dim=2, proxy_target=1.5, seed=4)
res = mf.maurey_subsample(deep, m=16, dist=dist, seed=0)
print(f"\ndepth-2 source -> branching {res.tree.branching} tree: "
      f"error {res.l2_error:.5f} <= bound {res.bound:.3f}, "
      f"tree proxy {mf.path_norm_proxy_tree(res.tree):.4f} "
      f"<= source proxy {res.target_proxy:.4f}")
