"""Distribution loading: lognormal discretization, the exponential
rotation-tree loader, and the thread-ID lookup-table loader with its
reversible-logic cost model.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError, ModelError, ShapeError
from .statevector import Circuit

__all__ = [
    "DiscretizedDistribution",
    "LevelLut",
    "SynthesisCost",
    "COST_MODEL",
    "discretize_lognormal",
    "build_level_lut",
    "baseline_state_prep",
    "lut_state_prep",
    "lut_synthesis_cost",
    "level_bits",
]

COST_MODEL = "monotone-threshold-v1"
TAIL_SIGMAS = 3.0


@dataclass(frozen=True)
class DiscretizedDistribution:
    probabilities: np.ndarray
    support_values: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        s = np.asarray(self.support_values, dtype=float)
        if p.ndim != 1 or p.shape != s.shape or len(p) < 1:
            raise ShapeError("probabilities and support_values must be equal-length 1-D arrays")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise DomainError("probabilities must be non-negative and sum to 1")
        if np.any(np.diff(s) <= 0):
            raise DomainError("support_values must be strictly increasing")
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "support_values", s)

    @property
    def levels(self) -> int:
        return len(self.probabilities)

    @classmethod
    def from_probabilities(cls, probabilities, support_values=None) -> "DiscretizedDistribution":
        """Normalize ``probabilities``; support defaults to the level index."""
        p = np.asarray(probabilities, dtype=float)
        if support_values is None:
            support_values = np.arange(len(p), dtype=float)
        return cls(p / p.sum(), support_values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("level,support_value,probability\n")
        for j, (s, p) in enumerate(zip(self.support_values, self.probabilities)):
            buf.write(f"{j},{float(s)!r},{float(p)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DiscretizedDistribution":
        rows = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not rows or rows[0].replace(" ", "") != "level,support_value,probability":
            raise ShapeError("distribution CSV must start with 'level,support_value,probability'")
        data = np.array([[float(v) for v in r.split(",")] for r in rows[1:]], dtype=float)
        order = np.argsort(data[:, 0], kind="stable")
        return cls(data[order, 2], data[order, 1])


def level_bits(levels: int) -> int:
    """Width of a register able to hold ``levels`` distinct values."""
    return max(1, math.ceil(math.log2(levels)))


@dataclass(frozen=True)
class LevelLut:
    """Thread-ID to level map: ``table[i]`` is the level of input ``i``."""

    levels: int
    input_bits: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        if t.shape != (2**self.input_bits,):
            raise ShapeError(f"table must have 2**{self.input_bits} entries")
        if np.any(t < 0) or np.any(t >= self.levels):
            raise DomainError("table entries must lie in [0, levels)")
        object.__setattr__(self, "table", t)

    @property
    def output_bits(self) -> int:
        return level_bits(self.levels)

    def frequencies(self) -> np.ndarray:
        return np.bincount(self.table, minlength=self.levels) / 2**self.input_bits

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.table) >= 0))

    def to_text(self) -> str:
        lines = [f"levels={self.levels} input_bits={self.input_bits}"]
        lines.extend(f"{i} {v}" for i, v in enumerate(self.table))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LevelLut":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines:
            raise ShapeError("empty LUT file")
        header = dict(kv.split("=") for kv in lines[0].split())
        try:
            levels, bits = int(header["levels"]), int(header["input_bits"])
        except KeyError as exc:
            raise ShapeError(f"LUT header lacks {exc}") from None
        pairs = np.array([[int(v) for v in ln.split()] for ln in lines[1:]], dtype=np.int64)
        if len(pairs) != 2**bits or np.any(pairs[:, 0] != np.arange(2**bits)):
            raise ShapeError("LUT body must list every index in ascending order")
        return cls(levels, bits, pairs[:, 1])


@dataclass(frozen=True)
class SynthesisCost:
    gate_count: int
    depth: int
    model_name: str
    thresholds: int = 0


def _lognormal_pdf(x, mu, sigma):
    return np.exp(-((np.log(x) - mu) ** 2) / (2 * sigma**2)) / (x * sigma * math.sqrt(2 * math.pi))


def discretize_lognormal(mu: float, sigma: float, levels: int) -> DiscretizedDistribution:
    """Equal-width price bins over ``exp(mu +/- 3 sigma)``, midpoint rule."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if levels < 2:
        raise DomainError(f"need at least 2 levels, got {levels}")
    lo = math.exp(mu - TAIL_SIGMAS * sigma)
    hi = math.exp(mu + TAIL_SIGMAS * sigma)
    width = (hi - lo) / levels
    mids = lo + (np.arange(levels) + 0.5) * width
    dens = _lognormal_pdf(mids, mu, sigma)
    return DiscretizedDistribution(dens / dens.sum(), mids)


def build_level_lut(dist: DiscretizedDistribution, input_bits: int) -> LevelLut:
    """Inverse-CDF thread assignment.

    Input ``i`` goes to the first level whose cumulative probability reaches
    ``(i + 0.5) / 2**input_bits``.
    """
    levels = dist.levels
    if input_bits < 1 or 2**input_bits < levels:
        raise CapacityError(f"2**{input_bits} inputs cannot cover {levels} levels")
    cdf = np.cumsum(dist.probabilities)
    points = (np.arange(2**input_bits) + 0.5) / 2**input_bits
    table = np.searchsorted(cdf, points, side="left")
    return LevelLut(levels, input_bits, np.minimum(table, levels - 1))


def baseline_state_prep(probabilities) -> Circuit:
    """Binary rotation tree loading ``sqrt(p[i])`` onto basis state ``i``.

    Qubit ``n-1`` (the most significant bit) is split first; every later
    split is one uniformly controlled RY per prefix pattern, giving exactly
    ``2**n - 1`` gates.
    """
    p = np.asarray(getattr(probabilities, "probabilities", probabilities), dtype=float)
    n = int(round(math.log2(len(p)))) if len(p) > 1 else 0
    if len(p) < 2 or 2**n != len(p):
        raise ShapeError(f"outcome count must be a power of two >= 2, got {len(p)}")
    if np.any(p < 0):
        raise DomainError("probabilities must be non-negative")
    p = p / p.sum()

    circuit = Circuit(n)
    for level in range(n):
        target = n - 1 - level
        controls = tuple(range(n - 1, target, -1))
        # mass[prefix, child] over the top (level+1) bits
        mass = p.reshape(2**level, 2, -1).sum(axis=2)
        for prefix in range(2**level):
            total = mass[prefix].sum()
            angle = 2.0 * math.asin(math.sqrt(min(1.0, mass[prefix, 1] / total))) if total > 0 else 0.0
            if level == 0:
                circuit.ry(angle, target)
            else:
                # prefix bit (level-1-k) belongs to controls[k]
                state = tuple((prefix >> (level - 1 - k)) & 1 for k in range(level))
                circuit.mcry(angle, controls, target, state)
    return circuit


def lut_state_prep(lut: LevelLut, thread_qubits=None, level_qubits=None, num_qubits=None) -> Circuit:
    """Hadamards over the thread register, then one level-writing ORACLE."""
    n, b = lut.input_bits, lut.output_bits
    thread = tuple(range(n)) if thread_qubits is None else tuple(thread_qubits)
    level = tuple(range(n, n + b)) if level_qubits is None else tuple(level_qubits)
    if len(thread) != n or len(level) != b:
        raise ShapeError(f"need {n} thread and {b} level qubits")
    if set(thread) & set(level):
        raise ShapeError("thread and level registers overlap")
    width = num_qubits if num_qubits is not None else 1 + max(thread + level)
    circuit = Circuit(width)
    for q in thread:
        circuit.h(q)
    circuit.oracle(lut.table, thread, level)
    return circuit


def lut_synthesis_cost(lut: LevelLut) -> SynthesisCost:
    """Comparator-network estimate for the LUT as combinational logic.

    Each realized level boundary costs one ``n``-bit threshold comparator
    (``n`` gates) plus one gate per output bit to fold it into the level
    code.  Depth is a comparator tree over the input bits followed by an
    OR-tree over the boundaries.
    """
    if not lut.is_monotone():
        raise ModelError(f"{COST_MODEL} applies only to monotone LUTs")
    n, b = lut.input_bits, lut.output_bits
    thresholds = int(np.count_nonzero(np.diff(lut.table)))
    if thresholds == 0:
        return SynthesisCost(0, 0, COST_MODEL, 0)
    gates = thresholds * n + b * thresholds
    depth = math.ceil(math.log2(n)) + math.ceil(math.log2(lut.levels))
    return SynthesisCost(gates, depth, COST_MODEL, thresholds)
