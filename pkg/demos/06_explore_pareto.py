# # Exploring the design space
#
# Six architectures x five precisions x three modalities x two processors
# give 180 design points. Accuracy comes from a results file; the bundled
# one is synthetic (see make_synthetic_results.py) and only exercises the
# join and the front extraction.

# -
from tinydse.archmodel import default_archs
from tinydse.dse import MODALITIES, explore, front_candidates, load_results, pareto_front
from tinydse.footprint import MB, DEFAULT_SCHEMES
from tinydse.hwcatalog import default_catalog, default_catalog_path, format_usd
from tinydse.perfmodel import load_coeffs

data = default_catalog_path().parent
catalog = default_catalog()
coeffs = load_coeffs(data / "coeffs_illustrative.csv")
results = load_results(data / "results_synthetic.csv")

points = explore(list(default_archs().values()), DEFAULT_SCHEMES, MODALITIES, catalog, coeffs, results)
infeasible = [p for p in points if not p.feasible]
print(f"{len(points)} points, {len(infeasible)} infeasible")
for p in infeasible[:3]:
    print(f"  {p.name}: {p.reason}")

# -
# EER against board cost. Voice-only boards skip the camera and sit at the
# cheap end; fusion buys the lowest error.

cands, _ = front_candidates(points, "cost_cents", "eer_pct")
for p in pareto_front(cands, "cost_cents", "eer_pct"):
    print(f"{format_usd(p.metrics.cost_cents):>7}  EER {p.metrics.eer_pct:6.3f}%  {p.name}")

# -
# EER against parameter size.

cands, _ = front_candidates(points, "param_bytes", "eer_pct")
for p in pareto_front(cands, "param_bytes", "eer_pct"):
    print(f"{p.metrics.param_bytes / MB:8.3f} MB  EER {p.metrics.eer_pct:6.3f}%  {p.name}")

# -
# Expected time to authenticate at 1% FAR against cost. A cheap but
# inaccurate model pays for its false rejects in retries.

cands, _ = front_candidates(points, "cost_cents", "effective_latency_s@1.0")
for p in pareto_front(cands, "cost_cents", "effective_latency_s@1.0"):
    print(f"{format_usd(p.metrics.cost_cents):>7}  {p.metrics.effective(1.0):8.3f} s  {p.name}")
