"""Digital (arcsin lookup) and analog (linear angle scaling) calibration of
rotation gates, plus the error and robustness measures used to compare them.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import CapacityError, DomainError
from .statevector import Circuit, marginal_prob_one, run

__all__ = [
    "CalibrationTable",
    "AngleScale",
    "CENTER_ANGLE",
    "WIDE_SLOPE",
    "NARROW_ANGLES",
    "WIDE_ANGLES",
    "digital_calibration_angle",
    "build_calibration_table",
    "calibrated_pipeline",
    "calibrated_map",
    "uncalibrated_small_angle_map",
    "max_relative_error",
    "f_theta",
    "flatness_deviation",
    "optimal_scale_search",
    "perturbation_robustness",
]

CENTER_ANGLE = math.pi / 4
# Affine slope that stretches x in [0, 1] over the full [0, pi/2] angle range.
WIDE_SLOPE = math.pi / 2
REL_ERROR_FLOOR = 1e-6

NARROW_ANGLES = (0.785, 0.786, 0.787, 0.788)
WIDE_ANGLES = (0.1, 0.2, 0.3, 0.4)


@dataclass(frozen=True)
class CalibrationTable:
    """``entries[j] = arcsin(sqrt(j / (2**bits - 1)))``."""

    resolution_bits: int
    entries: np.ndarray

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def step(self) -> float:
        """Spacing of the input grid."""
        return 1.0 / (self.size - 1)

    def index_of(self, x):
        """Nearest entry for input ``x``; ties go to the lower index."""
        x = np.asarray(x, dtype=float)
        j = np.ceil(x * (self.size - 1) - 0.5).astype(np.int64)
        return np.clip(j, 0, self.size - 1)

    def lookup(self, x):
        return self.entries[self.index_of(x)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("index,x,r_radians\n")
        xs = np.arange(self.size) / (self.size - 1)
        for j, (x, r) in enumerate(zip(xs, self.entries)):
            buf.write(f"{j},{x:.15g},{r:.15g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CalibrationTable":
        rows = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        data = np.array([[float(v) for v in r.split(",")] for r in rows[1:]], dtype=float)
        bits = int(round(math.log2(len(data))))
        return cls(bits, data[:, 2])


@dataclass(frozen=True)
class AngleScale:
    m_scale: float
    deviation: float = 0.0

    def __post_init__(self):
        if not self.m_scale > 0:
            raise DomainError(f"m_scale must be positive, got {self.m_scale}")


def digital_calibration_angle(x: float) -> float:
    """Angle ``r`` with ``sin(r)**2 == x``."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    return math.asin(math.sqrt(x))


def build_calibration_table(resolution_bits: int) -> CalibrationTable:
    if not 4 <= resolution_bits <= 16:
        raise CapacityError(f"resolution_bits must be in [4, 16], got {resolution_bits}")
    size = 2**resolution_bits
    xs = np.arange(size) / (size - 1)
    return CalibrationTable(resolution_bits, np.arcsin(np.sqrt(xs)))


def calibrated_pipeline(x: float, table: CalibrationTable) -> float:
    """Look up ``x``, rotate a fresh qubit by ``RY(2r)`` and read ``P(|1>)``."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    r = float(table.lookup(x))
    return marginal_prob_one(run(Circuit(1).ry(2.0 * r, 0)), 0)


def calibrated_map(table: CalibrationTable) -> Callable[[float], float]:
    return lambda x: calibrated_pipeline(x, table)


def uncalibrated_small_angle_map(x, center: float = CENTER_ANGLE, slope: float = WIDE_SLOPE):
    """Affine angle map ``r = center + slope * (x - 1/2)`` read out as ``sin(r)**2``."""
    r = center + slope * (np.asarray(x, dtype=float) - 0.5)
    y = np.sin(r) ** 2
    return float(y) if np.ndim(y) == 0 else y


def max_relative_error(mapping: Callable, x_grid) -> float:
    """Worst ``|y(x) - x| / max(x, 1e-6)`` over the grid, in percent."""
    xs = np.atleast_1d(np.asarray(x_grid, dtype=float))
    if xs.size == 0:
        raise DomainError("x_grid is empty")
    ys = np.array([mapping(float(x)) for x in xs], dtype=float)
    rel = np.abs(ys - xs) / np.maximum(xs, REL_ERROR_FLOOR)
    return float(rel.max() * 100.0)


def f_theta(theta: float, m_scale: float) -> float:
    """``sqrt(pi/4 + m*theta) / sin(pi/4 + theta)``, evaluated exactly."""
    num = CENTER_ANGLE + m_scale * theta
    den = math.sin(CENTER_ANGLE + theta)
    if num < 0 or den <= 0:
        raise DomainError(f"f_theta undefined at theta={theta}, m={m_scale}")
    return math.sqrt(num) / den


def flatness_deviation(m_scale: float, thetas) -> float:
    """Max ``|f_theta / sqrt(pi/2) - 1|`` over ``thetas``."""
    th = np.asarray(thetas, dtype=float)
    num = CENTER_ANGLE + m_scale * th
    den = np.sin(CENTER_ANGLE + th)
    if np.any(num < 0) or np.any(den <= 0):
        raise DomainError("theta grid leaves the domain of f_theta")
    return float(np.max(np.abs(np.sqrt(num) / den / math.sqrt(math.pi / 2) - 1.0)))


def optimal_scale_search(
    theta_lo: float,
    theta_hi: float,
    tolerance: float = 1e-6,
    grid_points: int = 2001,
    m_bounds: tuple[float, float] = (0.1, 4.0),
) -> AngleScale:
    """Minimax choice of ``m`` flattening ``f_theta`` over an angle interval."""
    if not theta_lo < theta_hi:
        raise DomainError(f"empty interval [{theta_lo}, {theta_hi}]")
    if math.sin(CENTER_ANGLE + theta_lo) <= 0 or math.sin(CENTER_ANGLE + theta_hi) <= 0:
        raise DomainError("interval leaves the domain of f_theta")
    lo, hi = m_bounds
    # keep pi/4 + m*theta >= 0 at both ends
    if theta_lo < 0:
        hi = min(hi, CENTER_ANGLE / -theta_lo)
    if theta_hi < 0:
        hi = min(hi, CENTER_ANGLE / -theta_hi)
    if not lo < hi:
        raise DomainError("no admissible scale for this interval")
    thetas = np.linspace(theta_lo, theta_hi, grid_points)
    res = minimize_scalar(
        flatness_deviation,
        bounds=(lo, hi),
        args=(thetas,),
        method="bounded",
        options={"xatol": tolerance},
    )
    return AngleScale(float(res.x), float(res.fun))


def perturbation_robustness(scheme, delta: float) -> float:
    """Worst-case misdecoding of a 4-symbol angle code under a shift of up to ``delta``.

    ``scheme`` is ``"narrow"``, ``"wide"`` or an explicit angle sequence.
    A symbol is read back as the nearest code angle; a received angle exactly
    halfway between two code angles still decodes correctly.  The shift is
    adversarial, so each symbol's misdecoding probability is 0 or 1 and the
    result is the maximum over symbols.  Decoding regions are intervals, so
    checking the two extreme shifts suffices.
    """
    if delta < 0:
        raise DomainError(f"delta must be non-negative, got {delta}")
    if isinstance(scheme, str):
        key = scheme.lower().replace("-interval", "")
        angles = {"narrow": NARROW_ANGLES, "wide": WIDE_ANGLES}.get(key)
        if angles is None:
            raise DomainError(f"unknown scheme {scheme!r}")
    else:
        angles = tuple(scheme)
    codes = np.asarray(angles, dtype=float)
    worst = 0.0
    for i, a in enumerate(codes):
        for shift in (-delta, delta):
            dist = np.abs(codes - (a + shift))
            # equal distances within rounding count as a correct read
            if np.any(np.delete(dist, i) < dist[i] - 1e-12):
                worst = 1.0
    return worst
