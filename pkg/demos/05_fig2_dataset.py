# %% [markdown]
# Extra extractable work for coherent vs single-photon pulses
#
# Builds the four-curve comparison dataset and writes it as CSV.

# %%
import sys

import numpy as np

from wgenergetics import emit_fig2_dataset, fig2_configs

fig = emit_fig2_dataset(*fig2_configs())
c = fig.columns
for t in (-2.0, 0.0, 2.0, 5.0):
    i = int(np.argmin(np.abs(c["t_gamma"] - t)))
    print(f"t = {t:4.1f}  dWB_coh = {c['dWB_coherent'][i]:+.4f}  dWB_1ph = {c['dWB_single'][i]:+.4f}  "
          f"Q_coh = {c['Q_coherent'][i]:+.4f}  Q_1ph = {c['Q_single'][i]:+.4f}")

if len(sys.argv) > 1:
    with open(sys.argv[1], "w", encoding="utf-8") as fh:
        fh.write(fig.csv())
