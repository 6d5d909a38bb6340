# %% [markdown]
# # Manufactured-solution check
#
# Analytic periodic fields are fed to each term of the right-hand side and
# compared with exact sympy derivatives. The error should fall spectrally.

# %%
from qhd.mms import mms_table

rows = mms_table((8, 16, 32))
for r in rows:
    print(f"{r.term:24s}", "  ".join(f"{e:9.2e}" for e in r.errors))
