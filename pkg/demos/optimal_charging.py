# coding: utf-8

# # Charging a qubit battery with measurement feedback
#
# A charger qubit is driven by homodyne feedback and passes its excitation to a
# battery qubit.  Here we find the steady state at the best operating point,
# check the closed form against the Liouvillian kernel, and scan the two
# control knobs: the charger decay rate gammaC and the feedback ratio delta.

# In[1]:

import numpy as np

from qbatt import SystemParams, single_cell_metrics, solve_steady
from qbatt.steady import steady_analytic, stored_energy_closed

g = 0.01  # coupling, in units of the qubit frequency
p = SystemParams(g=g, gammaC=2 * g, gammaB=0.1 * g, delta=1.0)


# The kernel of the Liouvillian and the closed-form steady state agree to
# rounding error.

# In[2]:

numeric = solve_steady(p).rho_inf
closed = steady_analytic(p).rho_inf
print("max |closed - kernel| =", np.abs(numeric - closed).max())

m = single_cell_metrics(numeric, p)
print(f"E = {m.stored_energy:.6f}   ergotropy = {m.ergotropy:.6f}   R = {m.efficiency_R:.4f}")
print("4g^2 / (2g + gammaB)^2 =", 4 / 2.1**2)


# # Scanning gammaC and delta
#
# The closed form is cheap, so a fine grid costs nothing.  The best point
# sits at gammaC = 2g and delta = 1.

# In[3]:

gcs = np.linspace(0.5, 6.0, 56)
deltas = np.linspace(0.0, 2.0, 41)
E = np.array([[stored_energy_closed(p.replace(gammaC=gc * g, delta=d)) for d in deltas] for gc in gcs])
i, j = np.unravel_index(E.argmax(), E.shape)
print(f"argmax: gammaC = {gcs[i]:.2f} g, delta = {deltas[j]:.2f}, E = {E[i, j]:.6f}")


# Without battery loss the charge is complete for any gammaC once delta = 1.

# In[4]:

for gc in (0.5, 2.0, 5.0):
    print(gc, stored_energy_closed(p.replace(gammaB=0.0, gammaC=gc * g)))
