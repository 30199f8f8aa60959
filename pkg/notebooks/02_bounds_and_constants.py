# %% [markdown]
# Bounds and constants
#
# Upper and lower Kolmogorov-distance bounds for S_{n,d}, the N_d floor, and
# the small-d constant C_d next to the printed values it is compared with.

# %%
from hermite_lab.bounds import (
    PRINTED_C4,
    PRINTED_C6,
    bound_report,
    exact_constant_cd,
    lower_rate,
    min_Nd,
    printed_constant_expression,
)

for d in range(1, 9):
    r = bound_report(10_000, d)
    lower = "-" if r.lower is None else f"{r.lower:.3g}"
    print(f"d={d}  upper={r.upper:.4g}  lower={lower}  N_d floor={r.n_d_ceiling}")

# %% [markdown]
# Both bounds grow like e^{(3 ln 2 / 2) d}, so they become vacuous quickly.
# The N_d floor shows how large n must be before the lower bound can apply.

# %%
for d in (4, 8, 12, 16):
    val, ceil = min_Nd(d)
    print(d, float(val), ceil)

# %% [markdown]
# C_4 and C_6: exact values against the printed closed forms.

# %%
for d, printed in ((4, PRINTED_C4), (6, PRINTED_C6)):
    print(
        f"d={d}  printed={printed}  printed expression={float(printed_constant_expression(d)):.6f}"
        f"  exact={float(exact_constant_cd(d)):.6f}"
    )
print("exact C_2 =", float(exact_constant_cd(2)))

# %%
for d in (2, 4, 6, 8):
    cert = lower_rate(d)
    print(d, float(cert.exact_rate), float(cert.stirling_floor), cert.holds)
