"""
Where self-adjointness comes from
=================================

Near r = 0 a field in the critical sector behaves like
c- f- r**-B + c+ f+ r**B. The antisymmetric part of the energy form is a
pure boundary term, so two states can only fail to be symmetric through
their short-distance coefficients.
"""

import numpy as np

from ibclab import (CouplingConstants, CutoffSpec, PhysicalParams, ShortDistanceCoeffs,
                    boundary_pairing, boundary_vectors, classify_sector, symmetry_defect)
from ibclab.short_distance import TestFunction

# Which sectors admit more than one self-adjoint extension?
for q in (0.5, 0.8, 0.866, 0.87, 0.9, 0.99):
    print(f"q = {q:5.3f}   kappa=1: {classify_sector(1, q)!s:20s} kappa=2: {classify_sector(2, q)}")

# The boundary vectors pair to zero with themselves and to -4B(1+q) with each other
c = CouplingConstants(0.9)
fp, fm = boundary_vectors(c)
print("\nf+ =", fp, " f- =", fm)
print("<f+, i a f+> =", boundary_pairing(fp, fp))
print("<f-, i a f+> =", boundary_pairing(fm, fp), " vs -4B(1+q) =", -c.pairing_constant)

# The same number falls out of a plain quadrature of <phi, h psi> - <h phi, psi>
cut = CutoffSpec(0.5, 1.5)
psi = TestFunction(c, ShortDistanceCoeffs(1.0, 0.0), cut)
phi = TestFunction(c, ShortDistanceCoeffs(0.0, 1.0), cut)
for mass in (0.0, 1.0, 5.0):
    print(f"mass {mass}: defect = {symmetry_defect(phi, psi, c, PhysicalParams(mass=mass)).real:.12f}")
