# coding: utf-8

# # Thermal battery reservoirs
#
# The battery leaks into either a bosonic or a fermionic bath.  Heating a
# bosonic bath hurts both stored energy and efficiency; a fermionic bath
# saturates at half filling and behaves very differently.

# In[1]:

import numpy as np

from qbatt import SystemParams, single_cell_metrics, solve_steady
from qbatt.model import occupation
from qbatt.steady import critical_gammaB

g = 0.01
temps = np.geomspace(0.1, 50, 8)


# Efficiency R = ergotropy / stored energy at the optimal point, against T.

# In[2]:

print(f"{'T':>8} {'R bosonic':>10} {'R fermionic':>12}")
for T in temps:
    row = []
    for kind in ("bosonic", "fermionic"):
        p = SystemParams(g=g, gammaC=2 * g, gammaB=0.1 * g, delta=1.0, reservoir=kind, T=T)
        row.append(single_cell_metrics(solve_steady(p).rho_inf, p).efficiency_R)
    print(f"{T:8.3f} {row[0]:10.4f} {row[1]:12.4f}")


# Beyond a critical battery loss rate no work can be extracted at all.  The
# threshold shrinks as a bosonic bath warms and grows for a fermionic one.

# In[3]:

for T in (0.0, 1.0, 10.0):
    nb, nf = occupation("bosonic", T), occupation("fermionic", T)
    print(f"T = {T:5.1f}: bosonic {critical_gammaB('bosonic', nb):.4f} g, fermionic {critical_gammaB('fermionic', nf):.4f} g")
