"""
The non-relativistic reference model
====================================

The s-wave model with u = r psi: E0 - (hbar^2/2m) u'' in the one-particle
sector, c_{-1} = -g m / (2 pi hbar^2) psi0 at the origin. Same pipeline,
different operator, so it is a good sanity check for the Dirac case.
"""

import numpy as np

from ibclab import (CutoffSpec, NonRelCoeffs, NonRelParams, NonRelTestFunction, RadialGrid,
                    nr_assemble, nr_build_basis, nr_ibc_constant, nr_symmetry_defect, spectrum)
from ibclab.evolution import default_time_step
from ibclab.nonrel import nr_assemble_and_evolve

p = NonRelParams(g=1.0, E0=1.0, mass=0.5)
cut = CutoffSpec(0.5, 1.5)
print("IBC constant:", nr_ibc_constant(p))

# Boundary term of Green's identity vs quadrature
psi = NonRelTestFunction(0, NonRelCoeffs(1, 0), cut)
phi = NonRelTestFunction(0, NonRelCoeffs(0, 1), cut)
print("one-particle defect:", nr_symmetry_defect(phi, psi, p, sectors="one"), " expected", -4 * np.pi)

# Galerkin consistency: the lowest level only goes down as the hat space grows
grid = RadialGrid(1e-3, 10.0, 129)
for n_hats in (15, 31, 63, 127):
    sys = nr_assemble(nr_build_basis(grid, p, cut, n_hats), p)
    print(f"n_hats = {n_hats:3d}: lowest E = {spectrum(sys)[0]:.6f}")

traj = nr_assemble_and_evolve(grid, p, cut, 127, default_time_step(sys), 200)
print("P0 at the end:", traj.observables["P0"][-1])
