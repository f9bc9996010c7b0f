# Velocity distribution of a slow effusive beam
#
# A thermal source with a slightly supersonic expansion gives a Maxwell-Boltzmann
# distribution shifted by a drift speed. Here we draw molecules from that
# distribution, histogram them, and fit the three-parameter model back.

import numpy as np

from slowbeams import get_molecule
from slowbeams.source import (SourceParams, VelocityHistogram, effusive_most_probable_speed,
                              fit_floating_mb, floating_mb_mode, sample_velocities)

mol = get_molecule("perfluoroC60-n7")
params = SourceParams(temperature=302.0, drift=51.0, molecule=mol)

# For reference, a purely effusive source at the sublimation temperature
print("effusive most probable speed at 585 K: %.1f m/s"
      % effusive_most_probable_speed(mol.mass, 585.0))

# Draw a million molecules and bin them in 2 m/s bins.
v = sample_velocities(1_000_000, params, seed=1)
hist = VelocityHistogram.from_samples(v, 2.0)
print("slowest molecule: %.1f m/s, fastest: %.1f m/s" % (v.min(), v.max()))

fit = fit_floating_mb(hist, mol.mass)
print("drift %.2f +- %.2f m/s" % (fit.drift, fit.drift_err))
print("temperature %.1f +- %.1f K" % (fit.temperature, fit.temperature_err))
print("chi2/dof %.2f" % (fit.chi2 / fit.dof))

# The peak of the distribution sits above the drift speed, since the thermal part
# is weighted by v^3.
print("model mode %.2f m/s vs fitted %.2f m/s" % (floating_mb_mode(params), fit.mode))

# How many of them are slower than 20 m/s?
print("fraction below 20 m/s: %.2e" % np.mean(v < 20.0))
