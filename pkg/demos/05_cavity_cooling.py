# Cavity cooling and self-organization of a slow ensemble
#
# A transversely pumped cavity scatters light from the molecules. Above a
# threshold pump strength the molecules arrange on a checkerboard lattice and
# the delayed cavity field removes kinetic energy along the cavity axis.

import numpy as np

from slowbeams.cooling import CavityPump, CoolingEnsemble, detect_threshold, evolve, pump_at_power

ens = CoolingEnsemble.sample(n=500, seed=3)
template = CavityPump()

for P in (1e3 / 3, 1e3, 3e3):
    tr = evolve(ens, pump_at_power(P, template, ens))
    print("%6.0f W: KE ratio %.2f, peak order %.2f, max photons %.3g"
          % (P, tr.ke_ratio, tr.late_order(), tr.photon_number.max()))

# A finer scan locates the threshold
scan = detect_threshold(np.geomspace(250.0, 4000.0, 9), ens, template)
print("threshold %.0f W, bracketed by [%.0f, %.0f] W" % (scan.estimate, *scan.bracket))
