"""Why wide angle codes and the m = 1.54 scale factor.

Four symbols packed into a narrow angle window misdecode under a 0.05 rad
shift; spreading them over a wider window survives it.  Separately, the
analog readout f_theta is flattest at m near 1.54, not at the naive m = 2.
"""

import numpy as np

from qmixsig.calibration import f_theta, flatness_deviation, optimal_scale_search, perturbation_robustness

for delta in (0.01, 0.05, 0.1, 0.2):
    print(f"delta={delta:4.2f}  narrow {perturbation_robustness('narrow', delta):g}"
          f"  wide {perturbation_robustness('wide', delta):g}")

best = optimal_scale_search(-0.2, 0.2)
grid = np.linspace(-0.2, 0.2, 2001)
print(f"\noptimal m = {best.m_scale:.4f}, deviation {best.deviation:.5f}")
for m in (1.0, best.m_scale, 2.0):
    print(f"  m={m:.4f}  deviation {flatness_deviation(m, grid):.5f}"
          f"  f(-0.2)={f_theta(-0.2, m):.4f}  f(0.2)={f_theta(0.2, m):.4f}")
