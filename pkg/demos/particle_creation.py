"""
Particle creation at the origin
===============================

Couple the vacuum to the kappa = 1 sector through an interior boundary
condition, assemble the Galerkin pencil and watch the vacuum amplitude leak
into the one-particle sector. The onset is quadratic in time and in g.
"""

import numpy as np

from ibclab import (CouplingConstants, CutoffSpec, IbcParams, PhysicalParams, RadialGrid,
                    assemble_operator, build_basis, evolve, project_vacuum)
from ibclab.evolution import default_time_step, estimate_norm

c = CouplingConstants(0.9)
grid = RadialGrid(1e-3, 10.0, 200)
cut = CutoffSpec(0.5, 1.5)


def system(g):
    params = IbcParams.default(c, g=g)
    return assemble_operator(build_basis(grid, c, params, cut, 100), c, PhysicalParams(mass=1.0),
                             params)


sys = system(0.5)
print(f"basis size {sys.size}, Hermiticity defect {sys.hermiticity_defect:.1e}, "
      f"cond(S) {sys.s_cond:.1e}")

# The bare vacuum violates the IBC, so start from its projection onto the domain
dt = default_time_step(sys)
traj = evolve(sys, project_vacuum(sys), dt, 1000)
obs = traj.observables
for k in (0, 10, 100, 500, 1000):
    print(f"t = {obs['t'][k]:.3e}  P0 = {obs['P0'][k]:.6f}  P1 = {obs['P1'][k]:.6f}  "
          f"|norm - 1| = {abs(obs['norm2'][k] - 1):.1e}")

# Short-time growth of the excited population, for a tiny coupling and its double
for g in (0.01, 0.02):
    s = system(g)
    tr = evolve(s, project_vacuum(s), 0.01 / estimate_norm(s), 10)
    p1 = tr.observables["P1"]
    slope = np.polyfit(np.log(tr.times[1:]), np.log(p1[1:] - p1[0]), 1)[0]
    print(f"g = {g}: growth after 10 steps {p1[-1] - p1[0]:.3e}, log-log slope {slope:.3f}")
