# %% [markdown]
# # Vanishing-hbar rate study
#
# The same initial data is run with several hbar values and with hbar = 0.
# The sup-in-time H1 and H2 distances to the classical run are fitted against hbar
# on a log-log scale. This takes about half a minute on one core.

# %%
from qhd.config import SimConfig
from qhd.initial import InitialSpec
from qhd.limit import limit_study

cfg = SimConfig(dim=1, N=64, t_max=2.0, output_every=0.1, init=InitialSpec(eps=0.01))
study = limit_study(cfg, [0.0, 0.02, 0.04, 0.08, 0.16])

# %%
for h, e1, e2, status in study.rows():
    print(f"hbar={h:5.2f}  H1 {e1:.3e}  H2 {e2:.3e}  {status}")

# %%
print(study.fit.summary())
