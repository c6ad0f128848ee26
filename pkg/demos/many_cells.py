# coding: utf-8

# # Batteries made of several qubits
#
# One charger feeds N battery qubits through a collective coupling.  The
# dynamics never leaves the symmetric (Dicke) sector, so the state space is
# 2(N+1) instead of 2**(N+1).  The charger rate is re-optimized for each N.

# In[1]:

from qbatt import SystemParams
from qbatt.sweep import evaluate_point

g = 0.01


def best(N, T, J=0.0, kind="bosonic"):
    base = SystemParams(g=g, N=N, J=J * g, gammaB=0.05 * g, delta=1.0, reservoir=kind, T=T)
    _, row = evaluate_point(base, [], (), ("density", "optimal_gammaC"), "E")
    return row


# Energy per particle and the optimal charger rate, bosonic bath at T = 1.

# In[2]:

for N in range(1, 7):
    row = best(N, 1.0)
    print(f"N = {N}: density {row['density']:.4f}, optimal gammaC {row['optimal_gammaC']:.3f} g")


# Pairwise exchange between battery qubits lowers the energy density.

# In[3]:

for J in (0.0, 0.5, 1.0):
    print(f"J = {J} g: density {best(3, 0.0, J)['density']:.4f}")
