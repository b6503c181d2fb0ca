"""Tour of the four copula families: sampling, CDFs and ground truth.

Each model carries its theoretical residual dependence index eta and
second-order parameter tau, which later demos use to measure estimator
bias.  Here we draw large samples, verify the samplers against the
closed-form CDFs, and look at the induced rank correlation.
"""
import numpy as np
from scipy.stats import kendalltau

from residualdep import CopulaModel, copula_cdf, sample_copula

models = [
    CopulaModel("fgm", -0.25),
    CopulaModel("frank", 0.5),
    CopulaModel("amh", -1.0),
    CopulaModel("gaussian", 0.6),
]

n = 50_000
print(f"{'family':<10}{'theta':>7}{'eta':>8}{'tau':>8}{'kendall tau':>14}{'max |emp-cdf|':>16}")
for model in models:
    u, v = sample_copula(model, n, seed=20_26)
    tau_emp, _ = kendalltau(u, v)

    # empirical joint CDF vs the closed form on a grid
    grid = np.linspace(0.1, 0.9, 5)
    worst = 0.0
    for gu in grid:
        for gv in grid:
            emp = np.mean((u <= gu) & (v <= gv))
            worst = max(worst, abs(emp - copula_cdf(model, gu, gv)))

    eta = "n/a" if model.true_eta is None else f"{model.true_eta:.3f}"
    tau = "n/a" if model.true_tau is None else f"{model.true_tau:.3f}"
    print(f"{model.family.value:<10}{model.theta:>7.2f}{eta:>8}{tau:>8}"
          f"{tau_emp:>14.4f}{worst:>16.5f}")

print()
print("The Gaussian family has tau = 0: its convergence to the limit is so")
print("slow that bias-corrected theory does not cover it; the estimation")
print("demos treat it as a robustness case only.")

# Sampling is exact conditional inversion, so identical seeds reproduce
# identical samples bit for bit:
u1, v1 = sample_copula(models[1], 5, seed=7)
u2, v2 = sample_copula(models[1], 5, seed=7)
assert np.array_equal(u1, u2) and np.array_equal(v1, v2)
print("\nDeterminism check passed: same seed, same bits.")
