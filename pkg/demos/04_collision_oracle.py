# %% [markdown]
# Collision-model cross-checks
#
# The waveguide is cut into time bins that each meet the qubit once. The
# resulting dynamics approaches the Bloch equations linearly in the bin width.

# %%
import numpy as np

from wgenergetics import QubitState, TimeGrid, integrate_obe, normalize_pulse, rising_exponential
from wgenergetics.collision import (build_time_bins, simulate_coherent_collisions,
                                    simulate_full_fock)

pulse = normalize_pulse(rising_exponential(), 1.0)
for dt in (0.04, 0.02, 0.01):
    oracle = simulate_coherent_collisions(build_time_bins(pulse, dt, -5, 10), QubitState.ground())
    ref = integrate_obe(pulse, QubitState.ground(), TimeGrid(-5, 10, dt))
    print(f"dt = {dt:.2f}  n_max = {oracle.n_max}  max |dz| = {np.max(np.abs(oracle.z - ref.z)):.2e}  "
          f"max |W_q + W_f| = {np.max(np.abs(oracle.W_q + oracle.W_f)):.1e}")

# %% [markdown]
# Tracing out each bin after its collision is exact for coherent input.
# A full state vector over eight bins gives the same qubit marginals.

# %%
bins = build_time_bins(normalize_pulse(rising_exponential(t_start=-0.8), 0.5), 0.1)
full = simulate_full_fock(bins, 2, QubitState.plus())
traced = simulate_coherent_collisions(bins, QubitState.plus(), n_max=2)
print(f"{bins.n_bins} bins, max marginal difference {np.max(np.abs(full.z - traced.z)):.1e}")
