"""Grow an observation level and watch the estimate sharpen.

Starting from no data (estimate: the maximally depolarizing channel,
2 bits of process entropy) we simulate more and more measurements of a
fixed "true" channel and re-estimate after each batch.  With an
informationally complete set of 12 Pauli means the channel is recovered
exactly and the entropy drops to the true value.
"""

import numpy as np

from procmaxent import (
    ObservationLevel,
    ProcessMeasurementSpec,
    process_entropy,
    random_channel,
    simulate_means,
    solve_maxent,
)
from procmaxent.linalg import ID2, PAULI_X, PAULI_Y, PAULI_Z, bloch_to_density

rng = np.random.default_rng(7)
truth = random_channel(2, kraus_rank=2, rng=rng)
print(f"true channel: process entropy {process_entropy(truth):.6f} bits\n")

# Measurement plan: output tomography of four test states (the maximally
# mixed state and the +1 eigenstates of each Pauli).
states = [
    ("mixed", 0.5 * ID2),
    ("+x", bloch_to_density([1.0, 0.0, 0.0])),
    ("+y", bloch_to_density([0.0, 1.0, 0.0])),
    ("+z", bloch_to_density([0.0, 0.0, 1.0])),
]
plan = [
    ProcessMeasurementSpec("ancilla_free", state=rho, observable=P,
                           label=f"{name}:{axis}")
    for name, rho in states
    for axis, P in zip("xyz", (PAULI_X, PAULI_Y, PAULI_Z))
]

print(f"{'measurements':>12}  {'entropy [bits]':>14}  {'Choi distance':>13}")
sol = solve_maxent(ObservationLevel(d=2, constraints=()))
dist = np.linalg.norm(sol.choi.matrix - truth.matrix)
print(f"{0:>12}  {sol.entropy_bits:>14.6f}  {dist:>13.2e}")

for n in (3, 6, 9, 12):
    obs = simulate_means(truth, plan[:n])
    sol = solve_maxent(obs)
    dist = np.linalg.norm(sol.choi.matrix - truth.matrix)
    print(f"{n:>12}  {sol.entropy_bits:>14.6f}  {dist:>13.2e}")

print("\nThe entropy decreases monotonically as constraints accumulate, and")
print("the final (informationally complete) estimate coincides with the")
print("true channel.")
