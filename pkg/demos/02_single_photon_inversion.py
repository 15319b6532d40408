# %% [markdown]
# Single-photon inversion
#
# A single photon whose envelope is the time reverse of spontaneous emission
# excites the qubit almost completely. Truncating the envelope at t0 = -5/gamma
# caps the inversion at 1 - exp(-5).

# %%
import math

from wgenergetics import (Statistics, TimeGrid, integrate_single_excitation, normalize_pulse,
                          rising_exponential)

photon = normalize_pulse(rising_exponential(statistics=Statistics.SINGLE_PHOTON))
traj = integrate_single_excitation(photon, TimeGrid(-5, 10, 1e-3))
pe0 = traj.excited_population[traj.grid.index_of(0.0)]
print(f"P_e(0) = {pe0:.6f}, expected {1 - math.exp(-5):.6f}")

# %% [markdown]
# The reduced qubit state stays diagonal, so its entropy measures how
# entangled it is with the photon.

# %%
for t in (-2.0, 0.0, 3.0, 10.0):
    i = traj.grid.index_of(t)
    print(f"t = {t:5.1f}  P_e = {traj.excited_population[i]:.4f}  S = {traj.entropy()[i]:.4f} nats")
