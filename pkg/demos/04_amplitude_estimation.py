"""Canonical amplitude estimation against direct sampling."""

import math

from qmixsig.qae import AmplitudeProblem, canonical_qae, direct_measure_estimate
from qmixsig.statevector import Circuit

a = 0.3
problem = AmplitudeProblem(Circuit(1).ry(2 * math.asin(math.sqrt(a)), 0), 0)
print(f"true amplitude {a}")
for m in range(3, 9):
    r = canonical_qae(problem, m)
    step = math.pi / 2**m
    print(f"  m_eval={m}  estimate {r.amplitude_estimate:.5f}  error {abs(r.amplitude_estimate - a):.5f}"
          f"  bound {step + step**2:.5f}")
for shots in (100, 10_000):
    est = direct_measure_estimate(problem, shots, seed=1)
    print(f"  direct, {shots:5d} shots: {est:.5f}")
