"""Monte Carlo check of a minimum dwell certificate.

Random admissible switching signals that respect the certified dwell time
should drive every trajectory to zero, and the norm must stay under the
running bound gamma * exp(alpha(n)) on every dwell interval.
"""

import numpy as np

from dwellgraph import catalog, empirical_decay, min_dwell_nondefective
from dwellgraph.dwell import nondefective_forms

mats, graphs = catalog.get_example("example1")
adj = graphs["G1"]
forms = nondefective_forms(mats)
report = min_dwell_nondefective(forms, adj)
tau = report.tau_int

stats = empirical_decay(mats, adj, tau, trials=500, horizon=60 * tau, seed=1, forms=forms)
print(f"tau={tau}: max final ratio={stats.max_ratio:.2e}, "
      f"peak amplification={stats.peak_amplification.max():.2f}, "
      f"bound violations={stats.violations}")

# looping on the critical cycle at the certified dwell is the worst case
adv = empirical_decay(mats, adj, tau, trials=20, horizon=60 * tau, seed=1, forms=forms,
                      adversarial_cycle=report.critical_cycle)
print(f"critical cycle at tau: max final ratio={adv.max_ratio:.2e}")

# dwelling one step instead of tau may or may not diverge; nothing is certified
fast = empirical_decay(mats, adj, 1, trials=500, horizon=60 * tau, seed=1)
print(f"tau=1 (uncertified): max final ratio={fast.max_ratio:.2e}")
print("log10 of final ratios, quartiles:",
      np.round(np.percentile(np.log10(stats.final_ratios), [25, 50, 75]), 1))
