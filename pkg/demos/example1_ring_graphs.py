"""Minimum dwell time of a four-mode system under three switching graphs.

The four subsystems share one spectrum (each is a similarity transform of the
same matrix), so every dwell requirement comes from the eigenvector gains on
the edges the graph allows.  Removing edges can only lower the bound.
"""

import numpy as np

from dwellgraph import build_graph, catalog, min_dwell_nondefective
from dwellgraph.dwell import nondefective_forms

mats, graphs = catalog.get_example("example1")
forms = nondefective_forms(mats)

print("spectral radii:", np.round([f.spectral_radius for f in forms], 6))

for label, adj in graphs.items():
    g = build_graph(forms, adj)
    report = min_dwell_nondefective(forms, adj)
    cycle = [k + 1 for k in report.critical_cycle]
    print(f"{label}: {len(g.edges):2d} edges  nu={report.bound_real:.6f}  "
          f"tau={report.tau_int}  critical cycle={cycle}")

# the one-sided ring keeps only the cheap direction around the loop
g2 = build_graph(forms, graphs["G2"])
for e in g2.edges:
    print(f"  {e.i + 1}->{e.j + 1}  w+={e.w_plus:.6f}  w-={e.w_minus:.6f}")
