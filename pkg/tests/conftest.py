import math
import sys

import numpy as np
import pytest

from qmixsig.statevector import Circuit, StateVector


def random_state(n: int, rng: np.random.Generator) -> StateVector:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector.from_amplitudes(v, normalize=True)


def random_circuit(n: int, gates: int, rng: np.random.Generator) -> Circuit:
    """Mix of every non-oracle gate kind on ``n`` qubits."""
    c = Circuit(n)
    kinds = ["H", "X", "RY"] + (["CRY", "MCX", "MCRY", "P"] if n > 1 else [])
    for _ in range(gates):
        kind = kinds[rng.integers(len(kinds))]
        angle = float(rng.uniform(-2 * math.pi, 2 * math.pi))
        if kind in ("H", "X", "RY"):
            q = int(rng.integers(n))
            {"H": lambda: c.h(q), "X": lambda: c.x(q), "RY": lambda: c.ry(angle, q)}[kind]()
            continue
        k = 1 if kind == "CRY" else int(rng.integers(1, n))
        qs = [int(v) for v in rng.permutation(n)[: k + 1]]
        target, controls = qs[0], tuple(qs[1:])
        if kind == "CRY":
            c.cry(angle, controls[0], target)
        elif kind == "MCX":
            c.mcx(controls, target)
        elif kind == "MCRY":
            state = tuple(int(v) for v in rng.integers(0, 2, size=k))
            c.mcry(angle, controls, target, state)
        else:
            c.p(angle, target, controls)
    return c


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
