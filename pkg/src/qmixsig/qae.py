"""Canonical (phase-estimation) quantum amplitude estimation.

Register layout for the full estimation circuit: the problem's state
qubits keep their indices ``0 .. n-1`` and the evaluation register sits on
``n .. n+m-1``, evaluation qubit ``k`` controlling ``Q**(2**k)``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError, QubitIndexError
from .statevector import (
    MAX_QUBITS,
    Circuit,
    GateOp,
    apply_circuit,
    marginal_prob_one,
    register_probabilities,
    run,
    sample_counts,
)

__all__ = [
    "AmplitudeProblem",
    "QaeConfig",
    "EstimateResult",
    "MAX_EVAL_QUBITS",
    "qft",
    "inverse_qft",
    "build_grover_operator",
    "build_qae_circuit",
    "canonical_qae",
    "direct_measure_estimate",
]

MAX_EVAL_QUBITS = 12


@dataclass(frozen=True)
class AmplitudeProblem:
    """``A|0>`` with objective qubit; the target is ``a = P(objective = 1)``."""

    prep_circuit: Circuit
    objective_qubit: int

    def __post_init__(self):
        if not 0 <= self.objective_qubit < self.prep_circuit.num_qubits:
            raise QubitIndexError(
                f"objective qubit {self.objective_qubit} outside a "
                f"{self.prep_circuit.num_qubits}-qubit preparation"
            )

    @property
    def num_state_qubits(self) -> int:
        return self.prep_circuit.num_qubits

    def amplitude(self) -> float:
        return marginal_prob_one(run(self.prep_circuit), self.objective_qubit)


@dataclass(frozen=True)
class QaeConfig:
    eval_qubits: int
    mode: str = "exact"
    shots: int = 1000
    seed: int | None = None

    def __post_init__(self):
        if not 1 <= self.eval_qubits <= MAX_EVAL_QUBITS:
            raise CapacityError(f"eval_qubits must be in [1, {MAX_EVAL_QUBITS}], got {self.eval_qubits}")
        if self.mode not in ("exact", "sampled"):
            raise DomainError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        if self.mode == "sampled" and self.shots < 1:
            raise DomainError("sampled mode needs shots >= 1")


@dataclass(frozen=True)
class EstimateResult:
    amplitude_estimate: float
    grid_index: int
    eval_qubits: int
    posterior: np.ndarray = field(repr=False, compare=False)

    def posterior_table(self, cutoff: float = 0.0) -> dict[int, float]:
        return {int(y): float(p) for y, p in enumerate(self.posterior) if p > cutoff}

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("m_eval,y,amplitude,posterior_prob\n")
        size = 2**self.eval_qubits
        for y, p in enumerate(self.posterior):
            amp = math.sin(math.pi * y / size) ** 2
            buf.write(f"{self.eval_qubits},{y},{amp!r},{float(p)!r}\n")
        return buf.getvalue()


def _swap(circuit: Circuit, a: int, b: int) -> None:
    circuit.mcx((a,), b).mcx((b,), a).mcx((a,), b)


def qft(qubits, num_qubits: int | None = None) -> Circuit:
    """``|y> -> 2**-m/2 sum_k exp(2 pi i y k / 2**m) |k>`` on ``qubits`` (LSB first)."""
    reg = tuple(qubits)
    if not reg:
        raise DomainError("QFT register must be non-empty")
    width = num_qubits if num_qubits is not None else 1 + max(reg)
    circuit = Circuit(width)
    m = len(reg)
    for j in range(m - 1, -1, -1):
        circuit.h(reg[j])
        for k in range(j - 1, -1, -1):
            circuit.p(math.pi / 2 ** (j - k), reg[j], (reg[k],))
    for i in range(m // 2):
        _swap(circuit, reg[i], reg[m - 1 - i])
    return circuit


def inverse_qft(qubits, num_qubits: int | None = None) -> Circuit:
    return qft(qubits, num_qubits).inverse()


def _grover_ops(problem: AmplitudeProblem, control: int | None = None) -> list[GateOp]:
    """Ops of ``Q = A S0 A^dagger S_psi`` (applied right to left).

    With ``control`` set, only the two reflections carry the extra control:
    when it is 0 the remaining ``A A^dagger`` cancels.
    """
    prep = problem.prep_circuit
    n = prep.num_qubits
    extra = () if control is None else (control,)

    ops = [GateOp("P", (problem.objective_qubit,), extra, math.pi)]
    ops.extend(prep.inverse().ops)
    flips = [GateOp("X", (q,)) for q in range(n)]
    ops.extend(flips)
    ops.append(GateOp("P", (0,), tuple(range(1, n)) + extra, math.pi))
    ops.extend(flips)
    # RY(2 pi) = -I: the overall sign turns I - 2|0><0| into the reflection 2|0><0| - I
    if control is None:
        ops.append(GateOp("RY", (0,), (), 2 * math.pi))
    else:
        ops.append(GateOp("CRY", (0,), extra, 2 * math.pi))
    ops.extend(prep.ops)
    return ops


def build_grover_operator(problem: AmplitudeProblem) -> Circuit:
    """Grover iterate rotating ``A|0>`` by ``2 arcsin(sqrt(a))`` in its 2-plane."""
    return Circuit(problem.num_state_qubits, _grover_ops(problem))


def build_qae_circuit(problem: AmplitudeProblem, eval_qubits: int) -> Circuit:
    n = problem.num_state_qubits
    total = n + eval_qubits
    if not 1 <= eval_qubits <= MAX_EVAL_QUBITS:
        raise CapacityError(f"eval_qubits must be in [1, {MAX_EVAL_QUBITS}]")
    if total > MAX_QUBITS:
        raise CapacityError(f"{total} qubits exceed the {MAX_QUBITS}-qubit limit")
    evals = tuple(range(n, total))
    circuit = Circuit(total)
    circuit.extend(problem.prep_circuit.ops)
    for q in evals:
        circuit.h(q)
    for k, q in enumerate(evals):
        block = _grover_ops(problem, control=q)
        for _ in range(2**k):
            circuit.extend(block)
    circuit.extend(inverse_qft(evals, total).ops)
    return circuit


def _fold(weights: np.ndarray) -> np.ndarray:
    """Merge conjugate outcomes ``y`` and ``2**m - y`` onto ``y <= 2**(m-1)``."""
    size = len(weights)
    half = size // 2
    folded = weights[: half + 1].astype(float).copy()
    folded[1:half] += weights[size - 1 : half : -1]
    return folded


def _posterior_circuit(problem: AmplitudeProblem, m: int) -> np.ndarray:
    circuit = build_qae_circuit(problem, m)
    n = problem.num_state_qubits
    return register_probabilities(run(circuit), range(n, n + m))


def _posterior_spectral(problem: AmplitudeProblem, m: int) -> np.ndarray:
    """Same posterior without simulating the evaluation register.

    Before the inverse QFT the joint state is ``M**-1/2 sum_y |y> Q**y |psi>``,
    so outcome ``k`` carries ``M**-1 sum_y exp(-2 pi i y k / M) Q**y |psi>``:
    a discrete Fourier transform over the power index.
    """
    size = 2**m
    grover = build_grover_operator(problem)
    state = run(problem.prep_circuit)
    powers = np.empty((size, 2**problem.num_state_qubits), dtype=np.complex128)
    for y in range(size):
        powers[y] = state.amplitudes
        if y + 1 < size:
            state = apply_circuit(state, grover)
    out = np.fft.fft(powers, axis=0) / size
    return np.sum(np.abs(out) ** 2, axis=1)


# Above this many simulated amplitude-updates the spectral route is used.
_CIRCUIT_WORK_LIMIT = 2e7


def canonical_qae(problem: AmplitudeProblem, config: QaeConfig | int, method: str = "auto") -> EstimateResult:
    """Estimate ``a`` as ``sin(pi y / 2**m)**2`` for the most likely outcome ``y``.

    Conjugate outcomes ``y`` and ``2**m - y`` give the same amplitude and are
    pooled; ``grid_index`` is the smaller of the two.  ``method="circuit"``
    simulates the full phase-estimation circuit, ``"spectral"`` evaluates the
    identical posterior from the sequence of Grover powers.
    """
    if isinstance(config, int):
        config = QaeConfig(config)
    m = config.eval_qubits
    n = problem.num_state_qubits
    if n + m > MAX_QUBITS:
        raise CapacityError(f"{n + m} qubits exceed the {MAX_QUBITS}-qubit limit")
    if method == "auto":
        work = 2**m * (2 * len(problem.prep_circuit) + 8) * 2 ** (n + m)
        method = "circuit" if work <= _CIRCUIT_WORK_LIMIT else "spectral"
    if method == "circuit":
        posterior = _posterior_circuit(problem, m)
    elif method == "spectral":
        posterior = _posterior_spectral(problem, m)
    else:
        raise DomainError(f"unknown method {method!r}")
    if config.mode == "exact":
        weights = posterior
    else:
        rng = np.random.default_rng(config.seed)
        weights = rng.multinomial(config.shots, posterior / posterior.sum()).astype(float)
    y = int(np.argmax(_fold(weights)))
    estimate = math.sin(math.pi * y / 2**m) ** 2
    return EstimateResult(estimate, y, m, posterior)


def direct_measure_estimate(problem: AmplitudeProblem, shots: int, seed: int | None = None) -> float:
    """Fraction of measured shots with the objective qubit in ``|1>``."""
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    counts = sample_counts(run(problem.prep_circuit), shots, seed)
    bit = 1 << problem.objective_qubit
    hits = sum(c for idx, c in counts.items() if idx & bit)
    return hits / shots
