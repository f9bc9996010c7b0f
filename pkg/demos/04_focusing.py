# Focusing a molecular beam with crossed laser fields
#
# Molecules leave a 50 um source, pass through one or two focused light fields
# and are counted on a 2 mm detector half a metre downstream. The gain is the
# hit rate relative to the unperturbed beam.

from slowbeams import get_molecule
from slowbeams.focus import (DetectorSpec, EnsembleSpec, collimation_power, crossed_beams,
                             forward_gain, geometric_hit_fraction, simulate_ensemble)

mol = get_molecule("perfluoroC60-n7")
spec = EnsembleSpec(n_particles=5000, seed=2)
det = DetectorSpec()
waist = 100e-6

base = simulate_ensemble(spec, (), mol, det)
print("no light: %.4f hit, geometry predicts %.4f"
      % (base.hit_fraction, geometric_hit_fraction(spec, det)))

# The power at which the lens images the source onto the detector
Pc = collimation_power(spec, waist, mol)
print("collimating power %.3g W" % Pc)

for P in (6e4, Pc):
    for dual in (False, True):
        res = simulate_ensemble(spec, crossed_beams(P, waist, dual=dual), mol, det)
        p50, p90, _ = res.dose_percentiles()
        print("%8.3g W %-6s gain %.2f  vy width %.3f m/s  photons %.0f (median) %.0f (90%%)"
              % (P, "dual" if dual else "single", forward_gain(res, base),
                 res.transverse_width(1), p50, p90))

# Only one transverse axis is focused by a single field, so the dual
# arrangement roughly squares the gain.
