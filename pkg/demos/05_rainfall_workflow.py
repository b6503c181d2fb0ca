"""The applied workflow on synthetic daily-rainfall-style data.

Builds a CSV resembling two gauging stations' June measurements (dry
days, missing values, ISO dates), then runs the full chain: ingestion
filters (NA drop, dry-day cutoff, joint 90%-quantile exceedance), rank
pseudo-observations, and eta sample paths with confidence bands.

The same analysis from the command line:

    residualdep estimate --data rainfall.csv --x asu --y bri \\
        --date-col date --month 6 --q 0.5,1,1.5 --reduce-bias --kstar pow0.3
"""
import numpy as np

from residualdep import CopulaModel, EstimatorSpec, IngestionSpec, Margin, \
    PseudoSample, estimate_second_order, ingest, point_estimate, sample_copula

rng = np.random.default_rng(1830)

# --- synthesise the station file -------------------------------------------
# nearby stations: strongly dependent amounts (Frank, theta = 8), shared
# wet/dry occurrence, ~45% dry days, 8% missing values per station
n_days = 6_000
u, v = sample_copula(CopulaModel("frank", 8.0), n_days, seed=1830)
wet = rng.random(n_days) > 0.45
amounts_a = np.where(wet, 1.0 + 60.0 * u ** 3, rng.uniform(0, 0.9, n_days))
amounts_b = np.where(wet, 1.0 + 60.0 * v ** 3, rng.uniform(0, 0.9, n_days))

with open("rainfall.csv", "w", encoding="utf-8") as fh:
    fh.write("date,asu,bri\n")
    for i in range(n_days):
        year = 1950 + i // 30
        day = i % 30 + 1
        a = "NA" if rng.random() < 0.08 else f"{amounts_a[i]:.2f}"
        b = "NA" if rng.random() < 0.08 else f"{amounts_b[i]:.2f}"
        fh.write(f"{year:04d}-06-{day:02d},{a},{b}\n")
print(f"wrote rainfall.csv ({n_days} station-day rows)")

# --- ingestion: NA drop, dry-day filter, joint 90% quantile exceedance ------
spec = IngestionSpec(
    path="rainfall.csv", x_col="asu", y_col="bri", date_col="date",
    month=6, dry_threshold=1.0, quantile_filter=0.90,
)
sample = ingest(spec)
print(f"retained n = {sample.n} jointly heavy wet days")

# --- eta paths ---------------------------------------------------------------
pseudo = PseudoSample.from_sample(sample)
so = estimate_second_order(pseudo)
print(f"second-order estimates at k0 = {so.k0}: "
      f"tau_hat = {so.tau_hat:.3f}, beta_hat = {so.beta_hat:.3f}")

print(f"\n{'q':>5} {'k':>4} {'k/n':>6} {'eta':>8} {'95% CI':>19}")
for q in (0.5, 1.0, 1.5):
    spec_q = EstimatorSpec.conjugate(q, margin=Margin.FRECHET_SHIFTED)
    for frac in (0.06, 0.08, 0.10):
        k = int(sample.n * frac)
        est = point_estimate(pseudo, k, spec_q)
        ci = f"[{est.ci_low:.3f}, {est.ci_high:.3f}]"
        print(f"{q:>5.1f} {k:>4} {frac:>6.2f} {est.eta:>8.4f} {ci:>19}")

print()
print("The amounts were generated from a Frank copula, which is strongly")
print("dependent in the body (theta = 8) yet asymptotically independent with")
print("eta = 1/2: the paths hovering near 0.5 recover exactly that.  Values")
print("much nearer 1 would have signalled residual dependence persisting at")
print("extreme levels.")
