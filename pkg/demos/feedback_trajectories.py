# coding: utf-8

# # Where the feedback master equation comes from
#
# Each run below is a single conditioned evolution: the charger output is
# measured by homodyne detection and the photocurrent drives a rotation of
# the charger.  The ensemble average should follow the deterministic
# feedback master equation.

# In[1]:

import numpy as np

from qbatt import SystemParams
from qbatt.trajectories import TrajectoryConfig, deterministic_populations, ensemble_average, run_trajectory

g = 0.01
p = SystemParams(g=g, gammaC=2 * g, gammaB=0.1 * g, delta=1.0)
dt = 2e-3 / p.gammaC
cfg = TrajectoryConfig(p, dt=dt, steps=int(3 / g / dt), ensemble_size=300, seed=1, record_every=int(0.5 / g / dt))


# A single trajectory is noisy; its photocurrent is dominated by shot noise.

# In[2]:

one = run_trajectory(cfg, index=0)
print("battery population along one run:", np.round(one.populations[:, 1], 3))


# The ensemble mean sits within a few standard errors of the master equation.

# In[3]:

ens = ensemble_average(cfg)
det = deterministic_populations(p, ens.times)
for t, m, s, d in zip(ens.times * g, ens.mean_populations[:, 1], ens.stderr_populations[:, 1], det[:, 1]):
    print(f"g t = {t:4.1f}: mean {m:.4f} +- {s:.4f}   master equation {d:.4f}")
