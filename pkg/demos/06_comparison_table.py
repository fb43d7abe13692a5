"""Both pricing pipelines on the 12-qubit, 32-level problem."""

from qmixsig.calibration import build_calibration_table
from qmixsig.encoding import build_level_lut, discretize_lognormal
from qmixsig.pricing import LinearPayoff, compare_pipelines
from qmixsig.reporting import emit_comparison_table

levels, bits = 32, 12
g = 2**bits // levels
dist = discretize_lognormal(0.0, 0.1, levels)
payoff = LinearPayoff.normalized(1.0, 1.0, levels, positions=[0.5 / g - 0.5, levels - 0.5 - 0.5 / g])
comp = compare_pipelines(dist, payoff, build_level_lut(dist, bits), build_calibration_table(bits))
print(emit_comparison_table(comp.reports).to_text())
