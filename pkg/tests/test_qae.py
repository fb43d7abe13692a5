import math

import numpy as np
import pytest
from conftest import random_state
from hypothesis import given, settings
from hypothesis import strategies as st

from qmixsig.errors import CapacityError, DomainError, QubitIndexError
from qmixsig.qae import (
    AmplitudeProblem,
    QaeConfig,
    build_grover_operator,
    build_qae_circuit,
    canonical_qae,
    direct_measure_estimate,
    inverse_qft,
    qft,
)
from qmixsig.statevector import (
    Circuit,
    StateVector,
    apply_circuit,
    circuit_metrics,
    new_state,
    run,
)


def ry_problem(a: float, extra_qubits: int = 0) -> AmplitudeProblem:
    c = Circuit(1 + extra_qubits).ry(2 * math.asin(math.sqrt(a)), 0)
    for q in range(1, 1 + extra_qubits):
        c.h(q)
    return AmplitudeProblem(c, 0)


def overlap(problem):
    psi = run(problem.prep_circuit)
    return np.vdot(psi.amplitudes, apply_circuit(psi, build_grover_operator(problem)).amplitudes)


def conjugate_mass(result, j):
    m = 2**result.eval_qubits
    idx = {j % m, (m - j) % m}
    return sum(result.posterior[i] for i in idx)


class TestGrover:
    def test_zero_amplitude(self):
        assert abs(overlap(AmplitudeProblem(Circuit(1), 0))) == pytest.approx(1, abs=1e-12)

    def test_unit_amplitude(self):
        assert abs(overlap(AmplitudeProblem(Circuit(1).x(0), 0))) == pytest.approx(1, abs=1e-12)

    def test_rotation_angle(self):
        p = AmplitudeProblem(Circuit(1).ry(2 * math.pi / 8, 0), 0)
        assert overlap(p).real == pytest.approx(math.cos(2 * math.pi / 8), abs=1e-10)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.01, 0.99), st.integers(0, 3))
    def test_two_plane_rotation(self, a, extra):
        p = ry_problem(a, extra)
        theta = math.asin(math.sqrt(a))
        assert overlap(p).real == pytest.approx(math.cos(2 * theta), abs=1e-10)

    def test_bad_objective(self):
        with pytest.raises(QubitIndexError):
            AmplitudeProblem(Circuit(2), 2)


class TestQft:
    def test_one_qubit_is_h(self):
        assert [op.kind for op in inverse_qft([0]).ops] == ["H"]

    def test_matches_dft(self, rng):
        m = 4
        s = random_state(m, rng)
        out = apply_circuit(s, qft(range(m)))
        k = np.arange(2**m)
        dft = np.exp(2j * np.pi * np.outer(k, k) / 2**m) / 2 ** (m / 2)
        np.testing.assert_allclose(out.amplitudes, dft @ s.amplitudes, atol=1e-12)

    def test_round_trip(self, rng):
        s = random_state(4, rng)
        back = apply_circuit(apply_circuit(s, qft(range(4))), inverse_qft(range(4)))
        np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-10)

    def test_uniform_to_zero(self):
        uniform = StateVector.from_amplitudes(np.ones(16), normalize=True)
        out = apply_circuit(uniform, inverse_qft(range(4)))
        np.testing.assert_allclose(out.amplitudes, new_state(4).amplitudes, atol=1e-10)

    def test_empty(self):
        with pytest.raises(DomainError):
            qft([])


class TestCanonicalQae:
    def test_half_on_grid(self):
        r = canonical_qae(ry_problem(0.5), 3)
        assert r.amplitude_estimate == pytest.approx(0.5, abs=1e-15)
        assert r.grid_index == 2
        assert conjugate_mass(r, 2) >= 1 - 1e-10

    def test_sin2_pi_over_8(self):
        r = canonical_qae(ry_problem(math.sin(math.pi / 8) ** 2), 3)
        assert r.grid_index == 1
        assert r.posterior[1] + r.posterior[7] >= 1 - 1e-10

    def test_off_grid(self):
        r = canonical_qae(ry_problem(0.3), 6)
        assert abs(r.amplitude_estimate - 0.3) <= 0.0225

    @pytest.mark.parametrize("m", range(3, 9))
    def test_grid_exactness(self, m):
        for j in range(0, 2 ** (m - 1) + 1, max(1, 2 ** (m - 3))):
            a = math.sin(math.pi * j / 2**m) ** 2
            r = canonical_qae(ry_problem(a), m)
            assert r.amplitude_estimate == pytest.approx(a, abs=1e-12)
            assert conjugate_mass(r, j) >= 1 - 1e-9

    def test_resolution_bound(self):
        rng = np.random.default_rng(11)
        for a in rng.uniform(0, 1, 100):
            m = int(rng.integers(3, 9))
            r = canonical_qae(ry_problem(float(a)), m)
            step = math.pi / 2**m
            assert abs(r.amplitude_estimate - a) <= step + step**2

    def test_estimate_matches_grid_index(self):
        r = canonical_qae(ry_problem(0.37, 2), 5)
        assert r.amplitude_estimate == math.sin(math.pi * r.grid_index / 32) ** 2
        assert 0 <= r.grid_index <= 16

    @pytest.mark.parametrize("a,m,extra", [(0.2, 4, 0), (0.37, 5, 2), (0.81, 3, 3)])
    def test_routes_agree(self, a, m, extra):
        p = ry_problem(a, extra)
        circ = canonical_qae(p, m, method="circuit")
        spec = canonical_qae(p, m, method="spectral")
        np.testing.assert_allclose(circ.posterior, spec.posterior, atol=1e-12)
        assert circ.grid_index == spec.grid_index

    def test_exact_mode_repeatable(self):
        p = ry_problem(0.42, 1)
        a, b = canonical_qae(p, QaeConfig(6, seed=1)), canonical_qae(p, QaeConfig(6, seed=99))
        np.testing.assert_array_equal(a.posterior, b.posterior)
        assert a.grid_index == b.grid_index

    def test_sampled_mode_seeded(self):
        p = ry_problem(0.3)
        a = canonical_qae(p, QaeConfig(5, "sampled", 200, seed=4))
        b = canonical_qae(p, QaeConfig(5, "sampled", 200, seed=4))
        assert a.grid_index == b.grid_index

    def test_capacity(self):
        with pytest.raises(CapacityError):
            QaeConfig(13)
        with pytest.raises(CapacityError):
            canonical_qae(AmplitudeProblem(Circuit(20), 0), 8)

    def test_unknown_method(self):
        with pytest.raises(DomainError):
            canonical_qae(ry_problem(0.5), 3, method="magic")

    def test_circuit_shape(self):
        c = build_qae_circuit(ry_problem(0.3), 3)
        assert c.num_qubits == 4
        assert circuit_metrics(c).gate_count > 0

    def test_csv(self):
        r = canonical_qae(ry_problem(0.5), 3)
        lines = r.to_csv().splitlines()
        assert lines[0] == "m_eval,y,amplitude,posterior_prob"
        assert len(lines) == 9
        y, amp, prob = lines[3].split(",")[1:]
        assert (int(y), float(amp), float(prob)) == (2, pytest.approx(0.5), pytest.approx(r.posterior[2]))


class TestDirectMeasure:
    def test_zero(self):
        assert direct_measure_estimate(AmplitudeProblem(Circuit(1), 0), 500, seed=0) == 0.0

    def test_one(self):
        assert direct_measure_estimate(AmplitudeProblem(Circuit(1).x(0), 0), 500, seed=0) == 1.0

    def test_half(self):
        assert abs(direct_measure_estimate(ry_problem(0.5), 10**5, seed=5) - 0.5) <= 0.005

    @pytest.mark.parametrize("a", [0.1, 0.37, 0.9])
    def test_consistent_with_marginal(self, a):
        p = ry_problem(a, 2)
        est = direct_measure_estimate(p, 10**5, seed=2)
        assert abs(est - p.amplitude()) <= 3 * math.sqrt(a * (1 - a) / 10**5)

    def test_deterministic(self):
        p = ry_problem(0.3)
        assert direct_measure_estimate(p, 1000, 8) == direct_measure_estimate(p, 1000, 8)

    def test_zero_shots(self):
        with pytest.raises(DomainError):
            direct_measure_estimate(ry_problem(0.3), 0)
