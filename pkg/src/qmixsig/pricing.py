"""Expected-payoff circuits: the rotation-tree averaging circuit with a
small-angle payoff ladder, and the LUT-loaded circuit with arcsin-calibrated
payoff rotations.

Both estimate ``E[slope * i + offset]`` over a discretized distribution,
``i`` being the level index.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .calibration import (
    CENTER_ANGLE,
    CalibrationTable,
    calibrated_map,
    max_relative_error,
    uncalibrated_small_angle_map,
)
from .encoding import (
    LevelLut,
    SynthesisCost,
    baseline_state_prep,
    level_bits,
    lut_state_prep,
    lut_synthesis_cost,
)
from .errors import DomainError, ShapeError
from .statevector import Circuit, CircuitMetrics, circuit_metrics, marginal_prob_one, run

__all__ = [
    "LinearPayoff",
    "PricingCircuit",
    "PricingReport",
    "Comparison",
    "PAYOFF_HEADROOM",
    "WIDE_ANGLE_SCALE",
    "default_error_grid",
    "expected_value_exact",
    "spread_to_register",
    "build_jpm_circuit",
    "build_proposed_circuit",
    "price_baseline",
    "price_proposed",
    "compare_pipelines",
]

PAYOFF_HEADROOM = 0.95
# Payoff angles spanning the whole [0, pi/2] rotation range.
WIDE_ANGLE_SCALE = math.pi / 4


@dataclass(frozen=True)
class LinearPayoff:
    """``slope * i + offset``, scaled by ``normalization`` into [0, 1]."""

    slope: float
    offset: float
    normalization: float

    def value(self, i):
        return self.slope * np.asarray(i, dtype=float) + self.offset

    def scaled(self, i):
        return self.normalization * self.value(i)

    def check_range(self, positions) -> None:
        g = self.scaled(positions)
        if np.any(g < -1e-15) or np.any(g > 1 + 1e-15):
            raise DomainError(
                f"normalized payoff leaves [0, 1] (range {float(np.min(g)):.6g} .. {float(np.max(g)):.6g})"
            )

    @classmethod
    def normalized(cls, slope: float, offset: float, levels: int, headroom: float = PAYOFF_HEADROOM,
                   positions=None) -> "LinearPayoff":
        """Pick the scale so the largest payoff over ``positions`` maps to ``headroom``.

        ``positions`` defaults to the level indices ``0 .. levels-1``.
        """
        pos = np.arange(levels, dtype=float) if positions is None else np.asarray(positions, float)
        values = slope * pos + offset
        top = float(np.max(values))
        if top <= 0:
            raise DomainError("payoff is non-positive on every level")
        payoff = cls(slope, offset, headroom / top)
        payoff.check_range(pos)
        return payoff


def _probs(dist) -> np.ndarray:
    return np.asarray(getattr(dist, "probabilities", dist), dtype=float)


def expected_value_exact(dist, payoff: LinearPayoff) -> float:
    """``sum_i (slope * i + offset) * p[i]``."""
    p = _probs(dist)
    return float(np.dot(payoff.value(np.arange(len(p))), p))


def spread_to_register(dist, payoff: LinearPayoff, input_bits: int):
    """Re-express an ``L``-level problem on a ``2**input_bits`` register.

    Each level's mass is split evenly over its ``2**input_bits / L``
    register values, and the payoff is re-parameterized so that register
    value ``x`` sits at fractional level ``(x + 0.5) / g - 0.5`` with
    ``g = 2**input_bits / L``.  The within-level average position is then
    exactly the level index, so the expected payoff is unchanged.
    """
    p = _probs(dist)
    levels = len(p)
    b = level_bits(levels)
    if 2**b != levels or levels > 2**input_bits:
        raise ShapeError(f"need a power-of-two level count <= 2**{input_bits}, got {levels}")
    g = 2 ** (input_bits - b)
    fine = np.repeat(p / g, g)
    fine_payoff = LinearPayoff(
        payoff.slope / g,
        payoff.offset + payoff.slope * (0.5 / g - 0.5),
        payoff.normalization,
    )
    fine_payoff.check_range(np.arange(2**input_bits))
    return fine, fine_payoff


@dataclass
class PricingCircuit:
    """A pricing circuit plus the rule turning ``P(objective = 1)`` into a price.

    Unpacks as ``(circuit, objective_qubit)``.
    """

    circuit: Circuit
    objective_qubit: int
    payoff: LinearPayoff
    kind: str
    angle_scale: float | None = None

    def __iter__(self):
        yield self.circuit
        yield self.objective_qubit

    def probability(self) -> float:
        return marginal_prob_one(run(self.circuit), self.objective_qubit)

    def decode(self, p1: float) -> float:
        if self.kind == "averaging":
            # sin^2(pi/4 + t) ~ 1/2 + t with t = c (2 g - 1)
            mean_scaled = (p1 - 0.5) / (2.0 * self.angle_scale) + 0.5
        else:
            mean_scaled = p1
        return mean_scaled / self.payoff.normalization


def build_jpm_circuit(dist, payoff: LinearPayoff, angle_scale: float = 0.1) -> PricingCircuit:
    """Rotation-tree loader followed by the linear payoff ladder.

    The objective qubit ends at angle ``pi/4 + c (2 g(i) - 1)`` for index
    ``i``, ``g`` the normalized payoff and ``c = angle_scale``: one
    unconditional RY sets the offset and one CRY per index bit adds the
    slope term.
    """
    p = _probs(dist)
    n = int(round(math.log2(len(p))))
    if 2**n != len(p):
        raise ShapeError("the averaging circuit needs 2**n levels")
    payoff.check_range(np.arange(len(p)))
    if not angle_scale > 0:
        raise DomainError("angle_scale must be positive")
    prep = baseline_state_prep(p)
    obj = n
    circuit = Circuit(n + 1, prep.ops)
    offset_angle = angle_scale * (2.0 * payoff.normalization * payoff.offset - 1.0)
    slope_angle = 2.0 * angle_scale * payoff.normalization * payoff.slope
    circuit.ry(2.0 * (CENTER_ANGLE + offset_angle), obj)
    for j in range(n):
        circuit.cry(2.0 * slope_angle * 2**j, j, obj)
    return PricingCircuit(circuit, obj, payoff, "averaging", angle_scale)


def build_proposed_circuit(lut: LevelLut, payoff: LinearPayoff, table: CalibrationTable) -> PricingCircuit:
    """LUT loader, then one calibrated rotation per level value.

    For level ``v`` the objective is rotated by ``RY(2 r_v)`` with ``r_v``
    the table angle for ``g(v)``, so ``P(1) = sum_v freq(v) sin^2(r_v)``.
    """
    n, b = lut.input_bits, lut.output_bits
    levels = np.arange(lut.levels)
    payoff.check_range(levels)
    level_qubits = tuple(range(n, n + b))
    obj = n + b
    circuit = Circuit(n + b + 1, lut_state_prep(lut, num_qubits=n + b + 1).ops)
    angles = table.lookup(payoff.scaled(levels))
    for v, r in zip(levels, angles):
        state = tuple((int(v) >> k) & 1 for k in range(b))
        circuit.mcry(2.0 * float(r), level_qubits, obj, state)
    return PricingCircuit(circuit, obj, payoff, "proposed")


@dataclass
class PricingReport:
    pipeline: str
    estimate: float
    exact: float
    probability: float
    max_error_pct: float
    metrics: CircuitMetrics
    prep_metrics: CircuitMetrics
    synthesis: SynthesisCost | None = None

    @property
    def relative_error(self) -> float:
        """Percent error of ``estimate`` against ``exact``."""
        if self.exact == 0:
            return abs(self.estimate) * 100.0
        return abs(self.estimate - self.exact) / abs(self.exact) * 100.0

    @property
    def prep_gate_count(self) -> int:
        return self.synthesis.gate_count if self.synthesis else self.prep_metrics.gate_count

    @property
    def prep_depth(self) -> int:
        return self.synthesis.depth if self.synthesis else self.prep_metrics.depth


@dataclass
class Comparison:
    baseline: PricingReport
    proposed: PricingReport
    reports: list[PricingReport] = field(init=False)

    def __post_init__(self):
        self.reports = [self.baseline, self.proposed]


def default_error_grid(points: int = 1024) -> np.ndarray:
    return np.arange(1, points + 1) / points


def price_baseline(dist, payoff: LinearPayoff, input_bits: int | None = None,
                   angle_scale: float = WIDE_ANGLE_SCALE, error_grid=None) -> PricingReport:
    """Run the averaging circuit; an ``L``-level dist is spread over ``input_bits`` qubits."""
    p = _probs(dist)
    exact = expected_value_exact(p, payoff)
    if input_bits is not None and 2**input_bits != len(p):
        p, fine_payoff = spread_to_register(p, payoff, input_bits)
    else:
        fine_payoff = payoff
    pc = build_jpm_circuit(p, fine_payoff, angle_scale)
    p1 = pc.probability()
    n = int(round(math.log2(len(p))))
    prep = Circuit(pc.circuit.num_qubits, pc.circuit.ops[: 2**n - 1])
    grid = default_error_grid() if error_grid is None else error_grid
    worst = max_relative_error(lambda x: uncalibrated_small_angle_map(x, slope=2.0 * angle_scale), grid)
    return PricingReport(
        "baseline",
        pc.decode(p1),
        exact,
        p1,
        worst,
        circuit_metrics(pc.circuit),
        circuit_metrics(prep),
    )


def price_proposed(dist, payoff: LinearPayoff, lut: LevelLut, table: CalibrationTable,
                   error_grid=None) -> PricingReport:
    if _probs(dist).shape[0] != lut.levels:
        raise ShapeError(f"distribution has {len(_probs(dist))} levels, LUT has {lut.levels}")
    pc = build_proposed_circuit(lut, payoff, table)
    p1 = pc.probability()
    n = lut.input_bits
    prep = Circuit(pc.circuit.num_qubits, pc.circuit.ops[: n + 1])
    grid = default_error_grid() if error_grid is None else error_grid
    worst = max_relative_error(calibrated_map(table), grid)
    return PricingReport(
        "proposed",
        pc.decode(p1),
        expected_value_exact(dist, payoff),
        p1,
        worst,
        circuit_metrics(pc.circuit),
        circuit_metrics(prep),
        lut_synthesis_cost(lut),
    )


def compare_pipelines(dist, payoff: LinearPayoff, lut: LevelLut, table: CalibrationTable,
                      angle_scale: float = WIDE_ANGLE_SCALE, error_grid=None) -> Comparison:
    """Price one problem both ways on the LUT's ``input_bits``-qubit register."""
    if len(_probs(dist)) != lut.levels:
        raise ShapeError("distribution and LUT disagree on the level count")
    base = price_baseline(dist, payoff, lut.input_bits, angle_scale, error_grid)
    prop = price_proposed(dist, payoff, lut, table, error_grid)
    return Comparison(base, prop)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    buf.write("pipeline,estimate,exact,relative_error_pct,gate_count,depth\n")
    for r in reports:
        buf.write(f"{r.pipeline},{float(r.estimate)!r},{float(r.exact)!r},{float(r.relative_error)!r},{r.prep_gate_count},{r.prep_depth}\n")
    return buf.getvalue()
