# %% [markdown]
# Optical Bloch dynamics of a qubit in a waveguide
#
# Drive a ground-state qubit with a constant coherent field of strength
# |beta|^2 / gamma = 1 and watch it settle to its saturated steady state.

# %%
import numpy as np

from wgenergetics import QubitState, TimeGrid, integrate_obe, square, vacuum

drive = square(0.0, 30.0, amplitude=1.0)
traj = integrate_obe(drive, QubitState.ground(), TimeGrid(0, 30, 1e-3))
print(f"z at t = 30/gamma: {traj.z[-1]:.6f}  (fixed point -1/9 = {-1 / 9:.6f})")

# %% [markdown]
# Without a drive the qubit decays; the population follows exp(-gamma t).

# %%
decay = integrate_obe(vacuum(), QubitState.excited(), TimeGrid(0, 5, 1e-3))
err = np.max(np.abs(decay.excited_population - np.exp(-decay.times)))
print(f"max deviation from exp(-t): {err:.2e}")

# %% [markdown]
# The output field is the input minus the field radiated by the dipole.

# %%
i = traj.grid.index_of(10.0)
print("beta_in, beta_out at t = 10:", traj.input_amplitude[i], np.round(traj.output_amplitude[i], 6))
