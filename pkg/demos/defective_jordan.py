"""Dwell bounds for subsystems without a full set of eigenvectors.

A Jordan block has norm above one even when its eigenvalue is small.  Scaling
the chain by powers of epsilon puts epsilon on the superdiagonal instead of
one, which pulls the norm below one at the price of a worse conditioned basis.
"""

import numpy as np

from dwellgraph import (avg_dwell, choose_epsilon, jordan_decompose, min_dwell_defective,
                        ring, spectral_norm)

rng = np.random.default_rng(3)
J = np.array([[0.6, 1.0, 0.0],
              [0.0, 0.6, 1.0],
              [0.0, 0.0, 0.6]])
P = rng.standard_normal((3, 3))
A1 = P @ J @ np.linalg.inv(P)
A2 = np.diag([0.5, -0.4, 0.3]) + np.diag([1.0, 0.0], 1)

print("||A1|| =", round(spectral_norm(A1), 4), " rho =", 0.6)
for eps in (1.0, 0.5, choose_epsilon(A1), 0.05):
    f = jordan_decompose(A1, eps)
    print(f"  eps={eps:.3f}  ||J_eps||={f.factor_norm:.4f}  "
          f"cond(P_eps)={np.linalg.cond(f.basis):.1f}")

adj = ring(2)
default = min_dwell_defective([A1, A2], adj)
searched = min_dwell_defective([A1, A2], adj, search=True)
print(f"minimum dwell, default eps   bound={default.bound_real:.4f}  tau={default.tau_int}")
print(f"minimum dwell, eps searched  bound={searched.bound_real:.4f}  tau={searched.tau_int}")

avg = avg_dwell([A1, A2], adj)
print(f"average dwell                bound={avg.bound_real:.4f}  tau={avg.tau_int}")
