"""Generate synthetic city-grid instances and inspect their structure.

The generator stands in for real parcel data: plots sit on a W x H grid
with rook adjacency, actual uses come from a spatially correlated cluster
field, prices carry a center-distance trend, and the price box brackets
the as-built total price (+9.7% above, -1.65% below by default).
"""

import numpy as np

from landalloc import GeneratorSpec, generate_synthetic, load_instance, save_instance
from landalloc.model import evaluate_price

spec = GeneratorSpec(grid_width=6, grid_height=4, use_count=3, floor_range=(1, 5), rng_seed=42)
inst = generate_synthetic(spec)

print(f"grid {spec.grid_width}x{spec.grid_height} -> {inst.n_plots} plots, "
      f"{inst.total_floors} floors, {inst.n_uses} uses")
print(f"locked plots: {int(inst.locked.sum())}")

shares = inst.actual_areas / inst.actual_areas.sum()
for use, share in zip(inst.uses, shares):
    print(f"  {use.name:12s} {share:6.1%} of floor area")

actual_price = evaluate_price(inst, inst.actual_allocation())
print(f"\nactual total price: {actual_price:,.0f}")
print(f"price box: [{inst.price_min:,.0f}, {inst.price_max:,.0f}] "
      f"(x{inst.price_min / actual_price:.4f} .. x{inst.price_max / actual_price:.4f})")

print("\ncompatibility matrix (symmetric, unit diagonal):")
print(np.array_str(inst.compat, precision=2))

print("\nrook neighborhoods of the first grid row:")
for i in range(spec.grid_width):
    print(f"  plot {i}: {inst.plots[i].neighbors}")

path = save_instance(inst, "/tmp/demo.landalloc.json")
reloaded = load_instance(path)
print(f"\nsaved to {path} and reloaded: byte-stable round trip "
      f"{save_instance(reloaded, '/tmp/demo2.landalloc.json').read_bytes() == path.read_bytes()}")

print("\nthe paper-scale setting is a 43x30 grid:")
big = generate_synthetic(GeneratorSpec(grid_width=43, grid_height=30, rng_seed=7))
print(f"  -> {big.n_plots} plots, {big.total_floors} floors")
