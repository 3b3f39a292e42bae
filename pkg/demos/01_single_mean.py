"""Estimate a qubit channel from a single measured mean.

We probe an unknown channel once: send in a test state, measure sigma_z
on the output, record the mean m.  Maximum-entropy estimation turns that
single number into a full channel, and the answer depends strongly on
how pure the test state was.
"""

import numpy as np

from procmaxent import (
    Constraint,
    ObservationLevel,
    bloch_affine_map,
    oracle_O1_pure,
    reduce_ancilla_free,
    solve_maxent,
)
from procmaxent.linalg import ID2, PAULI_Z, bloch_to_density

np.set_printoptions(precision=4, suppress=True)

m = 0.6


def estimate(rho, label):
    obs = ObservationLevel(d=2, constraints=(
        Constraint(reduce_ancilla_free(rho, PAULI_Z), m, label="m"),))
    sol = solve_maxent(obs)
    bm = bloch_affine_map(sol.choi)
    print(f"--- {label} ---")
    print(f"entropy: {sol.entropy_bits:.6f} bits "
          f"(iterations: {sol.iterations}, boundary: {sol.boundary_flag})")
    print("Bloch map, linear part:")
    print(bm.linear)
    print(f"translation: {bm.translation}")
    print()
    return sol


print(f"measured <sigma_z> = {m} on the channel output\n")

# Maximally mixed test state: the data says nothing about how the channel
# depends on its input, so the estimate is the constant channel onto
# (I + m sigma_z)/2.
estimate(0.5 * ID2, "maximally mixed test state")

# Pure test state along z: now the data does correlate input and output,
# and the estimate picks up a nonzero linear part m/2 * r.
r_hat = np.array([0.0, 0.0, 1.0])
sol = estimate(bloch_to_density(r_hat), "pure test state along z")

# Cross-check against the closed-form solution.
oracle = oracle_O1_pure(m, r_hat)
gap = np.linalg.norm(sol.choi.matrix - oracle.choi.matrix)
print(f"distance to the closed-form Choi state: {gap:.2e}")
print(f"closed-form multipliers: lam = {oracle.multipliers['lam']:+.6f}, "
      f"d = {oracle.multipliers['dd']:+.6f}")
