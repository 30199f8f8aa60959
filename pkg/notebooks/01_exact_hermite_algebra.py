# %% [markdown]
# Exact Hermite algebra
#
# Probabilists' Hermite polynomials with rational coefficients, Gaussian
# expectations computed from the moment sequence, and the fourth moments
# that feed the small-d constants.

# %%
from math import factorial

from hermite_lab.hermite import (
    fourth_moment_expanded,
    fourth_moment_linearized,
    gaussian_expectation,
    hermite_coeffs,
    poly_mul,
)

for q in range(7):
    print(q, hermite_coeffs(q))

# %% [markdown]
# Orthogonality: E[H_p H_q] = q! when p = q and 0 otherwise.

# %%
gram = [[gaussian_expectation(poly_mul(hermite_coeffs(p), hermite_coeffs(q))) for q in range(6)] for p in range(6)]
for row in gram:
    print(" ".join(f"{int(v):4d}" for v in row))

# %% [markdown]
# E[H_q^4] two ways: expand H_q^4 and take moments, or use the product
# linearization sum_r (r!)^2 C(q, r)^4 (2q - 2r)!.

# %%
for q in range(1, 9):
    a, b = fourth_moment_expanded(q), fourth_moment_linearized(q)
    print(f"q={q}  E[H_q^4]={a}  agree={a == b}  ratio to (q!)^2 = {a / factorial(q) ** 2}")
