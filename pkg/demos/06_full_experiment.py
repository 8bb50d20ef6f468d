"""End-to-end experiment: generate an instance, run a method battery,
report indicators, statistics and figures.

This is the programmatic twin of the CLI flow:

    landalloc generate --grid 10x8 --seed 21 --out inst.landalloc.json
    landalloc run      --config experiment.json
    landalloc report   --bundle results/
    landalloc verify   --bundle results/
"""

import json
import tempfile
from pathlib import Path

from landalloc import GeneratorSpec, generate_synthetic, save_instance
from landalloc.harness import ExperimentConfig, run_experiment, verify_bundle
from landalloc.report import generate_report

workdir = Path(tempfile.mkdtemp(prefix="landalloc_demo_"))
inst = generate_synthetic(
    GeneratorSpec(grid_width=10, grid_height=8, use_count=3, floor_range=(1, 4), rng_seed=21)
)
instance_path = save_instance(inst, workdir / "demo.landalloc.json")
print(f"instance: {instance_path} ({inst.n_plots} plots)")

experiment = {
    "instance": str(instance_path),
    "output": str(workdir / "results"),
    "seeds": [1, 2, 3],
    "engines": [
        {"label": "CR+DES", "algorithm": "CR_DES",
         "population_size": 40, "generations": 60,
         "operators": {"crossover_plot_fraction": 0.3, "mutation_plot_budget": 2}},
        {"label": "CR+DES_C", "algorithm": "CR_DES",
         "population_size": 40, "generations": 60, "gamma_search": 0.8,
         "operators": {"crossover_plot_fraction": 0.3, "mutation_plot_budget": 2}},
        {"label": "Mutation+SBX NSGA-II", "algorithm": "MSBX_NSGA2",
         "population_size": 40, "generations": 60,
         "operators": {"mutation_plot_budget": 2}},
        {"label": "SOA", "algorithm": "SOA",
         "population_size": 40, "generations": 60, "soa_a": 0.5, "soa_b": 0.5},
    ],
}
(workdir / "experiment.json").write_text(json.dumps(experiment, indent=2))

result = run_experiment(ExperimentConfig.from_dict(experiment))
print(f"bundle: {result.bundle_dir} ({result.ok_runs} runs ok, {result.failed_runs} failed)")

issues, incomplete = verify_bundle(result.bundle_dir)
print(f"verify: {'clean' if not issues else issues}")

report_dir = generate_report(result.bundle_dir)
print(f"report: {report_dir}\n")
print((report_dir / "summary.txt").read_text())
print("indicator table:")
print((report_dir / "indicators.csv").read_text())
print("Type I/II/III picks (first lines):")
print("\n".join((report_dir / "types.csv").read_text().splitlines()[:6]))
stats = json.loads((report_dir / "stats.json").read_text())
for metric, entry in stats["metrics"].items():
    if "cld" in entry:
        letters = ", ".join(f"{k}={v}" for k, v in sorted(entry["cld"]["letters"].items()))
        print(f"CLD for {metric}: {letters} (KW p={entry['kruskal_wallis']['p']:.4f})")
