"""Numerical laboratory for interior-boundary-condition Dirac-Coulomb Hamiltonians."""

from .angular import (AngularSector, BoundaryVectors, CouplingConstants, boundary_pairing,
                      boundary_vectors, sector_matrices)
from .assembly import (GalerkinBasis, GalerkinSystem, IbcParams, assemble_operator, build_basis,
                       spectrum, validate_ibc_params)
from .errors import IbcError
from .evolution import Trajectory, evolve, observables, project_vacuum
from .nonrel import (NonRelCoeffs, NonRelParams, NonRelTestFunction, nr_assemble,
                     nr_assemble_and_evolve, nr_build_basis, nr_ibc_constant, nr_symmetry_defect)
from .radial import (EsaVerdict, PhysicalParams, RadialField, RadialGrid, apply_radial_dirac,
                     classify_sector, indicial_exponents, l2_integrability_check)
from .short_distance import (CutoffSpec, ShortDistanceCoeffs, TestFunction, extract_coeffs,
                             fock_symmetry_defect, make_test_function, symmetry_defect)

__version__ = "0.1.0"
