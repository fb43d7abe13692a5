"""Dense statevector simulation and circuit metrics.

Qubit ordering is little-endian: qubit ``q`` is bit ``q`` of the basis
index, so ``|q2 q1 q0>`` sits at index ``4*q2 + 2*q1 + q0``.

Rotation convention::

    RY(phi) = [[cos(phi/2), -sin(phi/2)],
               [sin(phi/2),  cos(phi/2)]]

so ``RY(2*r)|0>`` has amplitude ``sin(r)`` on ``|1>``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DomainError, QubitIndexError, ShapeError

__all__ = [
    "MAX_QUBITS",
    "GATE_KINDS",
    "GateOp",
    "Circuit",
    "CircuitMetrics",
    "StateVector",
    "new_state",
    "apply_gate",
    "apply_circuit",
    "run",
    "marginal_prob_one",
    "register_probabilities",
    "sample_counts",
    "circuit_metrics",
]

MAX_QUBITS = 26
NORM_TOL = 1e-12

# P is a (multi-)controlled phase diag(1, e^{i angle}); it is needed by the
# inverse QFT and by the Grover reflections, which RY-family gates cannot express.
GATE_KINDS = ("H", "X", "RY", "CRY", "MCX", "MCRY", "P", "ORACLE")
_ANGLED = frozenset({"RY", "CRY", "MCRY", "P"})

_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class GateOp:
    """One gate application.

    ``ctrl_state`` gives the required value of each control (default all
    ones).  For ``ORACLE`` the controls are the input register, the targets
    the output register, and ``table[v]`` is XOR-ed into the output when the
    input register holds ``v`` (bit ``k`` of ``v`` is ``controls[k]``).
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    angle: float | None = None
    ctrl_state: tuple[int, ...] | None = None
    table: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        if self.ctrl_state is not None:
            object.__setattr__(self, "ctrl_state", tuple(int(v) for v in self.ctrl_state))
        if self.table is not None:
            object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))
        self._check_shape()

    def _check_shape(self):
        kind = self.kind
        if kind not in GATE_KINDS:
            raise DomainError(f"unknown gate kind {kind!r}")
        if kind in _ANGLED:
            if self.angle is None or not math.isfinite(self.angle):
                raise DomainError(f"{kind} needs a finite angle, got {self.angle!r}")
        elif self.angle is not None:
            raise DomainError(f"{kind} takes no angle")
        ncontrols = len(self.controls)
        if kind != "ORACLE" and len(self.targets) != 1:
            raise ShapeError(f"{kind} acts on exactly one target")
        if kind in ("H", "X", "RY") and ncontrols:
            raise ShapeError(f"{kind} is uncontrolled; use the controlled kind")
        if kind == "CRY" and ncontrols != 1:
            raise ShapeError("CRY takes exactly one control")
        if kind in ("MCX", "MCRY") and ncontrols < 1:
            raise ShapeError(f"{kind} needs at least one control")
        if self.ctrl_state is not None:
            if len(self.ctrl_state) != ncontrols:
                raise ShapeError("ctrl_state length must match controls")
            if any(v not in (0, 1) for v in self.ctrl_state):
                raise DomainError("ctrl_state entries must be 0 or 1")
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits):
            raise QubitIndexError(f"{kind}: targets and controls must be distinct, got {qubits}")
        if any(q < 0 for q in qubits):
            raise QubitIndexError(f"{kind}: negative qubit index in {qubits}")
        if kind == "ORACLE":
            if not self.targets or not self.controls:
                raise ShapeError("ORACLE needs input (controls) and output (targets) registers")
            if self.table is None or len(self.table) != 2 ** ncontrols:
                raise ShapeError("ORACLE table must have 2**len(controls) entries")
            hi = 2 ** len(self.targets)
            if any(v < 0 or v >= hi for v in self.table):
                raise DomainError("ORACLE table value does not fit the output register")
            if self.ctrl_state is not None:
                raise ShapeError("ORACLE takes no ctrl_state")
        elif self.table is not None:
            raise ShapeError(f"{kind} takes no table")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + self.controls

    def check_against(self, num_qubits: int) -> None:
        bad = [q for q in self.qubits if q >= num_qubits]
        if bad:
            raise QubitIndexError(f"{self.kind}: qubits {bad} outside a {num_qubits}-qubit register")

    def inverse(self) -> "GateOp":
        if self.kind in _ANGLED:
            return GateOp(self.kind, self.targets, self.controls, -self.angle, self.ctrl_state)
        # H, X, MCX and XOR-oracles are self-inverse.
        return self

    def with_control(self, qubit: int) -> "GateOp":
        """Same gate with one extra (value-1) control."""
        kind = {"X": "MCX", "MCX": "MCX", "RY": "CRY", "CRY": "MCRY", "MCRY": "MCRY", "P": "P"}.get(self.kind)
        if kind is None:
            raise ShapeError(f"cannot add a control to {self.kind}")
        state = None if self.ctrl_state is None else self.ctrl_state + (1,)
        return GateOp(kind, self.targets, self.controls + (qubit,), self.angle, state)

    def to_text(self) -> str:
        parts = [self.kind]
        if self.angle is not None:
            parts.append(format(self.angle, ".17g"))
        parts.append("targets=" + _fmt_list(self.targets))
        parts.append("controls=" + _fmt_list(self.controls))
        if self.ctrl_state is not None:
            parts.append("ctrl_state=" + _fmt_list(self.ctrl_state))
        if self.table is not None:
            parts.append("table=" + _fmt_list(self.table))
        return " ".join(parts)

    @classmethod
    def from_text(cls, line: str) -> "GateOp":
        tokens = line.split()
        if not tokens:
            raise ShapeError("empty gate line")
        kind, rest = tokens[0], tokens[1:]
        angle = None
        if rest and "=" not in rest[0]:
            angle = float(rest[0])
            rest = rest[1:]
        fields = {}
        for tok in rest:
            m = _FIELD_RE.fullmatch(tok)
            if m is None:
                raise ShapeError(f"malformed gate field {tok!r}")
            body = m.group(2).strip()
            fields[m.group(1)] = tuple(int(v) for v in body.split(",")) if body else ()
        if "targets" not in fields:
            raise ShapeError(f"gate line without targets: {line!r}")
        return cls(
            kind,
            fields["targets"],
            fields.get("controls", ()),
            angle,
            fields.get("ctrl_state"),
            fields.get("table"),
        )


_FIELD_RE = re.compile(r"(targets|controls|ctrl_state|table)=\[([0-9,\s]*)\]")


def _fmt_list(values: Sequence[int]) -> str:
    return "[" + ",".join(str(v) for v in values) + "]"


@dataclass(frozen=True)
class CircuitMetrics:
    gate_count: int
    depth: int
    oracle_count: int = 0


@dataclass
class Circuit:
    """Ordered gate list on a fixed register.

    The builder methods return ``self`` so short circuits can be chained.
    """

    num_qubits: int
    ops: list[GateOp] = field(default_factory=list)

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise CapacityError(f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}")
        self.ops = list(self.ops)
        for op in self.ops:
            op.check_against(self.num_qubits)

    def append(self, op: GateOp) -> "Circuit":
        op.check_against(self.num_qubits)
        self.ops.append(op)
        return self

    def extend(self, ops: Iterable[GateOp]) -> "Circuit":
        for op in ops:
            self.append(op)
        return self

    def h(self, q):
        return self.append(GateOp("H", (q,)))

    def x(self, q):
        return self.append(GateOp("X", (q,)))

    def ry(self, angle, q):
        return self.append(GateOp("RY", (q,), (), angle))

    def cry(self, angle, control, target):
        return self.append(GateOp("CRY", (target,), (control,), angle))

    def mcry(self, angle, controls, target, ctrl_state=None):
        return self.append(GateOp("MCRY", (target,), tuple(controls), angle, ctrl_state))

    def mcx(self, controls, target, ctrl_state=None):
        return self.append(GateOp("MCX", (target,), tuple(controls), None, ctrl_state))

    def p(self, angle, target, controls=()):
        return self.append(GateOp("P", (target,), tuple(controls), angle))

    def oracle(self, table, inputs, outputs):
        return self.append(GateOp("ORACLE", tuple(outputs), tuple(inputs), table=tuple(table)))

    def inverse(self) -> "Circuit":
        return Circuit(self.num_qubits, [op.inverse() for op in reversed(self.ops)])

    def __len__(self):
        return len(self.ops)

    def metrics(self) -> CircuitMetrics:
        return circuit_metrics(self)

    def to_text(self) -> str:
        lines = [f"# qubits={self.num_qubits}"]
        lines.extend(op.to_text() for op in self.ops)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        num_qubits = None
        ops = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = re.search(r"qubits=(\d+)", line)
                if m:
                    num_qubits = int(m.group(1))
                continue
            ops.append(GateOp.from_text(line))
        if num_qubits is None:
            num_qubits = 1 + max((q for op in ops for q in op.qubits), default=0)
        return cls(num_qubits, ops)


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise CapacityError(f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}")
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2**self.num_qubits,):
            raise ShapeError(f"expected {2**self.num_qubits} amplitudes, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise DomainError("amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalized (|psi|^2 = {norm!r})")
        self.amplitudes = amps

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128)
        n = int(round(math.log2(len(amps)))) if len(amps) else 0
        if len(amps) == 0 or 2**n != len(amps):
            raise ShapeError("amplitude count must be a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))


def new_state(num_qubits: int) -> StateVector:
    """Return ``|0...0>`` on ``num_qubits`` qubits."""
    if not isinstance(num_qubits, (int, np.integer)) or not 1 <= num_qubits <= MAX_QUBITS:
        raise CapacityError(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits!r}")
    amps = np.zeros(2**num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(int(num_qubits), amps)


# -- kernels ---------------------------------------------------------------
#
# The flat amplitude array is viewed as an n-dimensional (2, ..., 2) tensor in
# which qubit q is axis n-1-q.  Fixing the control axes by integer indexing
# yields views, so basis states failing a control condition are never touched.


def _axis(n: int, q: int) -> int:
    return n - 1 - q


def _control_index(op: GateOp, n: int) -> list:
    idx: list = [slice(None)] * n
    values = op.ctrl_state if op.ctrl_state is not None else (1,) * len(op.controls)
    for q, v in zip(op.controls, values):
        idx[_axis(n, q)] = v
    return idx


def _apply_inplace(psi: np.ndarray, op: GateOp, n: int) -> None:
    if op.kind == "ORACLE":
        _apply_oracle_inplace(psi, op, n)
        return
    tensor = psi.reshape((2,) * n)
    idx = _control_index(op, n)
    ax = _axis(n, op.targets[0])
    idx0 = list(idx)
    idx1 = list(idx)
    idx0[ax] = 0
    idx1[ax] = 1
    idx0, idx1 = tuple(idx0), tuple(idx1)

    kind = op.kind
    if kind == "P":
        tensor[idx1] *= complex(math.cos(op.angle), math.sin(op.angle))
        return
    a0 = tensor[idx0].copy()
    a1 = tensor[idx1].copy()
    if kind in ("X", "MCX"):
        tensor[idx0] = a1
        tensor[idx1] = a0
    elif kind == "H":
        tensor[idx0] = (a0 + a1) * _SQRT_HALF
        tensor[idx1] = (a0 - a1) * _SQRT_HALF
    else:  # RY family
        c = math.cos(op.angle / 2.0)
        s = math.sin(op.angle / 2.0)
        tensor[idx0] = c * a0 - s * a1
        tensor[idx1] = s * a0 + c * a1


def _register_values(n: int, qubits: Sequence[int]) -> np.ndarray:
    """Integer value of ``qubits`` (little-endian) for every basis index."""
    basis = np.arange(2**n, dtype=np.int64)
    out = np.zeros(2**n, dtype=np.int64)
    for k, q in enumerate(qubits):
        out |= ((basis >> q) & 1) << k
    return out


def _apply_oracle_inplace(psi: np.ndarray, op: GateOp, n: int) -> None:
    inputs = _register_values(n, op.controls)
    table = np.asarray(op.table, dtype=np.int64)
    xor_value = table[inputs]
    mask = np.zeros(2**n, dtype=np.int64)
    for k, q in enumerate(op.targets):
        mask |= ((xor_value >> k) & 1) << q
    dest = np.arange(2**n, dtype=np.int64) ^ mask
    out = np.empty_like(psi)
    out[dest] = psi
    psi[:] = out


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Apply one gate, returning a new state."""
    gate.check_against(state.num_qubits)
    psi = state.amplitudes.copy()
    _apply_inplace(psi, gate, state.num_qubits)
    return StateVector(state.num_qubits, psi)


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """Apply every op of ``circuit`` in order, returning a new state."""
    if state.num_qubits != circuit.num_qubits:
        raise ShapeError(
            f"state has {state.num_qubits} qubits but circuit expects {circuit.num_qubits}"
        )
    psi = state.amplitudes.copy()
    n = state.num_qubits
    for op in circuit.ops:
        _apply_inplace(psi, op, n)
    return StateVector(n, psi)


def run(circuit: Circuit) -> StateVector:
    """Shorthand for applying ``circuit`` to ``|0...0>``."""
    return apply_circuit(new_state(circuit.num_qubits), circuit)


def marginal_prob_one(state: StateVector, qubit: int) -> float:
    """Probability of measuring ``qubit`` in ``|1>``."""
    if not 0 <= qubit < state.num_qubits:
        raise QubitIndexError(f"qubit {qubit} outside a {state.num_qubits}-qubit register")
    probs = state.probabilities().reshape((2,) * state.num_qubits)
    p1 = float(np.take(probs, 1, axis=_axis(state.num_qubits, qubit)).sum())
    return min(max(p1, 0.0), 1.0)


def register_probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Marginal distribution of the register formed by ``qubits``.

    Entry ``v`` is the probability that the register reads ``v`` with
    ``qubits[k]`` as bit ``k``.
    """
    for q in qubits:
        if not 0 <= q < state.num_qubits:
            raise QubitIndexError(f"qubit {q} outside a {state.num_qubits}-qubit register")
    values = _register_values(state.num_qubits, qubits)
    return np.bincount(values, weights=state.probabilities(), minlength=2 ** len(qubits))


def sample_counts(state: StateVector, shots: int, seed: int | None = None) -> dict[int, int]:
    """Multinomial measurement of all qubits.

    Returns ``{basis_index: count}`` for outcomes seen at least once.
    """
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    probs = state.probabilities()
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(int(shots), probs)
    nz = np.flatnonzero(counts)
    return {int(i): int(counts[i]) for i in nz}


def circuit_metrics(circuit: Circuit) -> CircuitMetrics:
    """Gate count and ASAP depth.

    ORACLE ops are classical functions costed elsewhere; they are excluded
    from both numbers and reported as ``oracle_count``.
    """
    level = [0] * circuit.num_qubits
    depth = 0
    count = 0
    oracles = 0
    for op in circuit.ops:
        if op.kind == "ORACLE":
            oracles += 1
            continue
        count += 1
        layer = 1 + max(level[q] for q in op.qubits)
        for q in op.qubits:
            level[q] = layer
        depth = max(depth, layer)
    return CircuitMetrics(count, depth, oracles)
