"""Path-norm proxy, the layerwise complexity Q, and balancing.

The proxy (mean absolute weight product over all paths) is computed by a
cheap layered dynamic program and never exceeds Q, the product of the
probability-normalized layer L2 norms.  Q is invariant under the
homogeneity rescalings that preserve the function; balancing picks the
canonical representative with all layer norms equal, the normal form used
when comparing two networks layer by layer.
"""

import numpy as np

import mfnets as mf

net = mf.random_net(depth=2, widths=(32, 32), input_dim=3, proxy_target=1.0, seed=7)
# deliberately unbalance: the function and Q are unchanged, the norms skew
lopsided = net.replace(outer=net.outer * 1000.0, inner=net.inner / 1000.0)

for name, n in [("balanced draw", net), ("lopsided", lopsided), ("re-balanced", mf.balance(lopsided))]:
    rep = mf.hilbert_complexity(n)
    print(f"{name:14s} proxy={rep.proxy:.6f}  Q={rep.hilbert_q:.6f}  "
          f"layer norms={np.round(rep.per_layer_l2, 4)}")

# the proxy also bounds the l-infinity Lipschitz constant
dist = mf.DataDistribution("uniform_cube", 3)
print("Lipschitz bound holds on 10^4 pairs:",
      mf.lipschitz_bound_check(net, dist, 10_000, seed=0))
