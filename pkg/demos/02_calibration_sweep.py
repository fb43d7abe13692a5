"""How fine must the arcsin table be?

Each resolution is scored on its own native grid and on the fixed 1024-point
grid.  Coarse tables fail badly near x = 0, where the relative error blows up.
"""

import numpy as np

from qmixsig.calibration import build_calibration_table, calibrated_map, max_relative_error, uncalibrated_small_angle_map

fixed = np.arange(1, 1025) / 1024
print(f"uncalibrated small-angle map: {max_relative_error(uncalibrated_small_angle_map, fixed):6.2f}%")
print("bits   native-grid error   1024-grid error")
for bits in range(6, 17, 2):
    table = build_calibration_table(bits)
    native = np.arange(1, 2**bits + 1) / 2**bits
    f = calibrated_map(table)
    print(f"{bits:4d}   {max_relative_error(f, native):15.4f}%   {max_relative_error(f, fixed):13.4f}%")
