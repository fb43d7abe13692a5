"""Monte Carlo price walks with a single-qubit rotation accumulator.

Each day draws a step index ``r`` from ``q`` Hadamard-prepared qubits; the
accumulator qubit is rotated by an angle affine in the step value, so after
``d`` days its angle is ``pi/4 + lambda * (sum of log-returns)``.  Prices
are reconstructed classically as ``S0 * exp(sum)``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .calibration import CENTER_ANGLE
from .errors import CapacityError, DomainError, EncodingError, ModelError
from .qae import AmplitudeProblem, EstimateResult, QaeConfig, canonical_qae
from .statevector import MAX_QUBITS, Circuit, marginal_prob_one, run

__all__ = [
    "WalkModel",
    "AccumulatorEncoding",
    "PriceDistribution",
    "WalkEstimate",
    "ANGLE_BUDGET",
    "AUTO_ANGLE_TARGET",
    "MAX_PATHS",
    "auto_encoding",
    "build_walk_circuit",
    "decode_mean_sum",
    "quantum_price_distribution",
    "classical_enumeration",
    "classical_monte_carlo",
    "exp_reconstruct",
    "estimate_mean_qae",
    "direct_mean_sum",
    "distribution_linf",
]

# |theta| stays inside the region where f_theta is flat for m = pi/2.
ANGLE_BUDGET = 0.2
AUTO_ANGLE_TARGET = 0.15
MAX_PATHS = 2**24
MAX_WALK_QUBITS = 25
SUM_TOL = 1e-9


@dataclass(frozen=True)
class WalkModel:
    days: int
    step_bits: int
    step_values: np.ndarray
    step_probabilities: np.ndarray | None = None
    drift: float = 0.0
    s0: float = 1.0

    def __post_init__(self):
        if self.days < 1 or self.step_bits < 1:
            raise DomainError("days and step_bits must be >= 1")
        size = 2**self.step_bits
        vals = np.asarray(self.step_values, dtype=float)
        if vals.shape != (size,):
            raise ModelError(f"need {size} step values, got {vals.shape}")
        probs = (np.full(size, 1.0 / size) if self.step_probabilities is None
                 else np.asarray(self.step_probabilities, dtype=float))
        if probs.shape != (size,) or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ModelError("step probabilities must be non-negative and sum to 1")
        object.__setattr__(self, "step_values", vals)
        object.__setattr__(self, "step_probabilities", probs)

    @classmethod
    def affine(cls, days: int, step_bits: int, step_min: float, step_delta: float,
               drift: float = 0.0, s0: float = 1.0) -> "WalkModel":
        values = step_min + step_delta * np.arange(2**step_bits)
        return cls(days, step_bits, values, None, drift, s0)

    @classmethod
    def symmetric(cls, days: int, step: float = 0.01, drift: float = 0.0, s0: float = 1.0) -> "WalkModel":
        """+/- ``step`` each day with no unchanged-price outcome."""
        return cls.affine(days, 1, -step, 2 * step, drift, s0)

    @property
    def is_uniform(self) -> bool:
        return bool(np.allclose(self.step_probabilities, self.step_probabilities[0], rtol=0, atol=1e-15))

    def affine_steps(self) -> tuple[float, float]:
        """``(s_min, delta)`` with ``step_values[r] == s_min + delta * r``."""
        vals = self.step_values
        s_min = float(vals[0])
        delta = float(vals[1] - vals[0])
        expect = s_min + delta * np.arange(len(vals))
        if not np.allclose(vals, expect, rtol=0, atol=1e-12 * max(1.0, np.abs(vals).max())):
            raise ModelError("step values are not an evenly spaced lattice")
        return s_min, delta

    @property
    def num_paths(self) -> int:
        return 2 ** (self.step_bits * self.days)

    def extreme_sums(self) -> tuple[float, float]:
        lo = self.days * (float(self.step_values.min()) + self.drift)
        hi = self.days * (float(self.step_values.max()) + self.drift)
        return lo, hi


@dataclass(frozen=True)
class AccumulatorEncoding:
    """Angle ``pi/4 + lam * sum``; ``m_scale`` is the analog-calibration slope."""

    lam: float
    m_scale: float = math.pi / 2
    base_angle: float = CENTER_ANGLE

    def __post_init__(self):
        if not self.lam > 0 or not self.m_scale > 0:
            raise DomainError("lam and m_scale must be positive")


def auto_encoding(model: WalkModel, target: float = AUTO_ANGLE_TARGET, m_scale: float = math.pi / 2) -> AccumulatorEncoding:
    """Scale ``lam`` so the widest path sits at ``|theta| = target``."""
    worst = max(abs(v) for v in model.extreme_sums())
    return AccumulatorEncoding(target / worst if worst > 0 else 1.0, m_scale)


@dataclass
class PriceDistribution:
    sums: np.ndarray
    probabilities: np.ndarray
    s0: float = 1.0
    counts: np.ndarray | None = None

    @property
    def mean_sum(self) -> float:
        return float(np.dot(self.sums, self.probabilities))

    @property
    def prices(self) -> np.ndarray:
        return exp_reconstruct(self.sums, self.s0)

    @property
    def mean_price(self) -> float:
        return float(np.dot(self.prices, self.probabilities))

    def as_dict(self) -> dict[float, float]:
        return {float(s): float(p) for s, p in zip(self.sums, self.probabilities)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.counts is not None:
            buf.write("sum,count\n")
            for s, c in zip(self.sums, self.counts):
                buf.write(f"{float(s)!r},{int(c)}\n")
        else:
            buf.write("sum,probability,price\n")
            for s, p, x in zip(self.sums, self.probabilities, self.prices):
                buf.write(f"{float(s)!r},{float(p)!r},{float(x)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, s0: float = 1.0) -> "PriceDistribution":
        rows = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        header = rows[0].replace(" ", "").split(",")
        data = np.array([[float(v) for v in r.split(",")] for r in rows[1:]], dtype=float).reshape(-1, len(header))
        if header == ["sum", "count"]:
            counts = data[:, 1].astype(np.int64)
            return cls(data[:, 0], counts / counts.sum(), s0, counts)
        return cls(data[:, 0], data[:, 1], s0)


def _bucket(sums: np.ndarray, weights: np.ndarray, tol: float = SUM_TOL):
    """Merge outcomes whose sums agree within ``tol``; returns sorted unique sums."""
    order = np.argsort(sums, kind="stable")
    s = sums[order]
    w = weights[order]
    if len(s) == 0:
        return s, w
    starts = np.concatenate(([True], np.diff(s) > tol))
    group = np.cumsum(starts) - 1
    total = np.bincount(group, weights=w)
    # representative sum: weight-free mean of the cluster
    rep = np.bincount(group, weights=s) / np.bincount(group)
    return rep, total


def distribution_linf(a: PriceDistribution, b: PriceDistribution, tol: float = SUM_TOL) -> float:
    """L-infinity distance between two outcome tables, matching sums within ``tol``."""
    sums = np.concatenate([a.sums, b.sums])
    w = np.concatenate([a.probabilities, -np.asarray(b.probabilities)])
    _, diff = _bucket(sums, w, tol)
    return float(np.max(np.abs(diff))) if len(diff) else 0.0


def build_walk_circuit(model: WalkModel, enc: AccumulatorEncoding) -> tuple[Circuit, int]:
    """Hadamard step registers feeding one accumulator qubit.

    Day ``t`` uses qubits ``t*q .. t*q+q-1``; the accumulator is the last
    qubit.
    """
    if not model.is_uniform:
        raise ModelError("Hadamard step registers need uniform step probabilities")
    s_min, delta = model.affine_steps()
    q, d = model.step_bits, model.days
    width = d * q + 1
    if width > MAX_WALK_QUBITS:
        raise CapacityError(f"walk needs {width} qubits, limit is {MAX_WALK_QUBITS}")
    worst = enc.lam * max(abs(v) for v in model.extreme_sums())
    if worst > ANGLE_BUDGET + 1e-12:
        raise EncodingError(f"path angle {worst:.4g} exceeds the {ANGLE_BUDGET} rad budget")
    acc = d * q
    circuit = Circuit(width)
    circuit.ry(2.0 * enc.base_angle, acc)
    for day in range(d):
        reg = range(day * q, (day + 1) * q)
        for qb in reg:
            circuit.h(qb)
        circuit.ry(2.0 * enc.lam * (s_min + model.drift), acc)
        for j, qb in enumerate(reg):
            circuit.cry(2.0 * enc.lam * delta * 2**j, qb, acc)
    return circuit, acc


def decode_mean_sum(p1: float, enc: AccumulatorEncoding) -> float:
    """Invert ``P(1) ~ (2/pi)(pi/4 + m theta)`` and divide by ``lam``."""
    if not 0.0 <= p1 <= 1.0:
        raise DomainError(f"p1 must lie in [0, 1], got {p1}")
    theta = (p1 - 0.5) * (math.pi / 2) / enc.m_scale
    return theta / enc.lam


def quantum_price_distribution(model: WalkModel, enc: AccumulatorEncoding) -> PriceDistribution:
    """Read every path's accumulated sum off the final statevector.

    For each step-register basis state the accumulator holds
    ``cos(a)|0> + sin(a)|1>``; the path sum is ``(a - pi/4) / lam``.
    """
    circuit, acc = build_walk_circuit(model, enc)
    psi = run(circuit).amplitudes.reshape(2, -1)  # accumulator is the top bit
    a0, a1 = psi[0], psi[1]
    weight = np.abs(a0) ** 2 + np.abs(a1) ** 2
    angle = np.arctan2(a1.real, a0.real)
    sums = (angle - enc.base_angle) / enc.lam
    keep = weight > 0
    rep, total = _bucket(sums[keep], weight[keep])
    return PriceDistribution(rep, total, model.s0)


def classical_enumeration(model: WalkModel) -> PriceDistribution:
    """Every path with its exact probability, bucketed by total log-return."""
    if model.num_paths > MAX_PATHS:
        raise CapacityError(f"{model.num_paths} paths exceed the {MAX_PATHS} enumeration limit")
    sums = np.zeros(1)
    probs = np.ones(1)
    steps = model.step_values + model.drift
    for _ in range(model.days):
        sums = (sums[:, None] + steps[None, :]).ravel()
        probs = (probs[:, None] * model.step_probabilities[None, :]).ravel()
    rep, total = _bucket(sums, probs)
    return PriceDistribution(rep, total, model.s0)


def classical_monte_carlo(model: WalkModel, samples: int, seed: int | None = None) -> PriceDistribution:
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(model.step_values), size=(samples, model.days), p=model.step_probabilities)
    sums = (model.step_values[idx] + model.drift).sum(axis=1)
    rep, counts = _bucket(sums, np.ones(samples))
    counts = np.rint(counts).astype(np.int64)
    return PriceDistribution(rep, counts / samples, model.s0, counts)


def exp_reconstruct(total, s0: float = 1.0):
    """Price after accumulating log-return ``total``."""
    out = s0 * np.exp(np.asarray(total, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class WalkEstimate:
    mean_sum: float
    p1: float
    qae: EstimateResult | None = field(default=None, repr=False)


def direct_mean_sum(model: WalkModel, enc: AccumulatorEncoding) -> WalkEstimate:
    """Decode the exact accumulator probability of the statevector."""
    circuit, acc = build_walk_circuit(model, enc)
    p1 = marginal_prob_one(run(circuit), acc)
    return WalkEstimate(decode_mean_sum(p1, enc), p1)


def estimate_mean_qae(model: WalkModel, enc: AccumulatorEncoding, m_eval: int) -> WalkEstimate:
    """Mean accumulated log-return from exact-mode amplitude estimation.

    The walk circuit is the preparation, the accumulator the objective.
    The returned mean is the linear (pre-exponential) quantity.
    """
    circuit, acc = build_walk_circuit(model, enc)
    if circuit.num_qubits + m_eval > MAX_QUBITS:
        raise CapacityError(f"{circuit.num_qubits + m_eval} qubits exceed the {MAX_QUBITS}-qubit limit")
    result = canonical_qae(AmplitudeProblem(circuit, acc), QaeConfig(m_eval))
    return WalkEstimate(decode_mean_sum(result.amplitude_estimate, enc), result.amplitude_estimate, result)
