"""Loading a 32-level log-normal onto 12 qubits, two ways.

The rotation tree writes every amplitude explicitly and so needs one
multi-controlled rotation per internal node.  The inverse-CDF lookup table
instead maps a uniform register onto level indices with comparators.
"""

import numpy as np

from qmixsig.encoding import baseline_state_prep, build_level_lut, discretize_lognormal, lut_synthesis_cost
from qmixsig.pricing import LinearPayoff, spread_to_register
from qmixsig.statevector import circuit_metrics, run

dist = discretize_lognormal(0.0, 0.1, 32)
print(f"32 levels, mode at level {int(np.argmax(dist.probabilities))}")

fine, _ = spread_to_register(dist, LinearPayoff.normalized(1.0, 1.0, 32), 12)
tree = baseline_state_prep(fine)
m = circuit_metrics(tree)
print(f"rotation tree:  {m.gate_count} gates, depth {m.depth}")
loaded = run(tree).probabilities()
print(f"  max |loaded - target| = {np.max(np.abs(loaded - fine)):.2e}")

lut = build_level_lut(dist, 12)
cost = lut_synthesis_cost(lut)
print(f"lookup table:   {cost.gate_count} gates, depth {cost.depth}  ({cost.model_name})")
err = np.max(np.abs(lut.frequencies() - dist.probabilities))
print(f"  worst level-frequency error {err:.2e}  (bound L/2^n = {32 / 4096:.2e})")

print("\ncost growth with register width:")
for n in range(6, 17, 2):
    c = lut_synthesis_cost(build_level_lut(dist, n))
    print(f"  n={n:2d}  tree {2**n - 1:6d}   table {c.gate_count:4d}")
