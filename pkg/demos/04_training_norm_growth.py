"""Layer-scaled gradient descent and the sqrt(t) norm-growth law.

With per-layer learning-rate factors equal to the product of adjacent
widths, explicit-Euler training discretizes the L2 gradient flow on weight
functions.  Along the flow the risk dissipates at rate equal to the scaled
gradient norm, and each layer norm grows at most like sqrt(R(0)) sqrt(t);
the path proxy inherits a (C0 + sqrt(R(0)t))^(L+1) envelope.
"""

import numpy as np

import mfnets as mf

dist = mf.DataDistribution("uniform_cube", 2)
xs = dist.sample(512, seed=0)
target = mf.random_net(2, (8, 8), 2, proxy_target=1.5, seed=1)
spec = mf.RiskSpec(dataset=mf.Dataset(xs, target.forward_many(xs)))

student = mf.random_net(2, (16, 16), 2, proxy_target=1.0, seed=2)
log = mf.train(student, spec,
               mf.TrainConfig(step_size=1e-3, steps=3000, checkpoint_every=500))

print("step   risk       proxy    diss.residual  moment_slack  proxy_slack")
for c in log.checkpoints:
    print(f"{c['step']:<6d} {c['risk']:<10.6f} {c['proxy']:<8.4f} "
          f"{c['dissipation_residual']:<14.2e} {c['moment_slack']:<13.5f} "
          f"{c['proxy_slack']:.2e}")

# the dissipation residual is O(h): halving the step halves it
ys = spec.dataset.ys
for h in (1e-3, 5e-4, 2.5e-4):
    r = mf.dissipation_residual(student, spec, xs, ys, h)
    print(f"h={h:.1e}  |dR/h + dissipation| = {r:.3e}")
print("slack <= 1.05 throughout:",
      max(log.column("moment_slack")) <= 1.05
      and max(log.column("proxy_slack")) <= 1.05)
