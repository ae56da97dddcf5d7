"""Bimodal refinements of the minimum dwell bound.

With two modes the only cycle is 1 -> 2 -> 1, and the product of the two
transition gains is the condition number of S = V2^-1 V1.  Any diagonal
rescaling of the eigenvectors is still an eigenbasis, so the bound can use the
smallest condition number over such scalings.
"""

import numpy as np

from dwellgraph import (bimodal_min_dwell_corollary1, bimodal_min_dwell_corollary2,
                        bimodal_min_dwell_pnorm, catalog, fully_connected,
                        min_dwell_nondefective)
from dwellgraph.dwell import nondefective_forms

A1, A2 = catalog.example2_matrices()

plain = min_dwell_nondefective(nondefective_forms([A1, A2]), fully_connected(2))
print(f"unit-norm eigenvectors   bound={plain.bound_real:.6f}  tau={plain.tau_int}")

eq = bimodal_min_dwell_corollary1(A1, A2)
d_left, d_right = eq.scaling
print(f"two-sided equilibration  bound={eq.bound_real:.6f}  tau={eq.tau_int}  "
      f"kappa={eq.diagnostics['kappa_scaled']:.5f}")
print("  D_left  =", np.round(np.real(np.diag(d_left)), 4))
print("  D_right =", np.round(np.real(np.diag(d_right)), 4))

# optimal diagonal scaling for the 1- and inf-norms has a closed form
for p in (1, "inf"):
    raw = bimodal_min_dwell_pnorm(A1, A2, p)
    best = bimodal_min_dwell_corollary2(A1, A2, p)
    print(f"p={p!s:3}  unscaled bound={raw.bound_real:.6f}  "
          f"optimal scaling bound={best.bound_real:.6f}  tau={best.tau_int}")
