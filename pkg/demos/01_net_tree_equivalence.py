"""Networks and neural trees realize the same functions.

A mean-field network shares weights across paths; unsharing them into a
tree (one weight per partial path) changes the parameter count but not the
function or the path-norm proxy, and flattening the tree back gives a
block-sparse network that again agrees everywhere.
"""

import numpy as np

import mfnets as mf

net = mf.random_net(depth=3, widths=(4, 5, 3), input_dim=2, proxy_target=2.0, seed=0)
tree = mf.net_to_tree(net)
flat = mf.tree_to_net(tree)

xs = mf.DataDistribution("uniform_cube", 2).sample(1000, seed=1)
print("shared parameters:   ", sum(a.size for a in net.layers()))
print("tree parameters:     ", tree.n_weights())
print("paths:               ", mf.path_count(net))
print("max |net - tree|:    ", np.abs(net(xs) - tree(xs)).max())
print("max |net - flat|:    ", np.abs(net(xs) - flat(xs)).max())
print("proxy (net):         ", mf.path_norm_proxy(net))
print("proxy (tree):        ", mf.path_norm_proxy_tree(tree))
print("proxy (flattened):   ", mf.path_norm_proxy(flat))
