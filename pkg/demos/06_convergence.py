# %% [markdown]
# Step-size convergence
#
# The energy balance residual of the Bloch solver shrinks as dt^4, the
# collision model's deviation from it as dt.

# %%
from wgenergetics import convergence_sweep, fig2_configs

rep = convergence_sweep(fig2_configs()[0])
for dt, res, dev in zip(rep.dts, rep.balance_residuals, rep.oracle_deviations):
    print(f"dt = {dt:.3f}  balance residual = {res:.2e}  oracle deviation = {dev:.2e}")
print(f"fitted orders: balance {rep.balance_order:.2f}, oracle {rep.oracle_order:.2f}")
