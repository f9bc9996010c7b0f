# Sublimation enthalpy from a slow temperature ramp
#
# The oven is heated at 0.7 K/min and the beam count rate follows an Arrhenius
# law. The slope of ln(rate) against 1/T gives the enthalpy, independent of the
# unknown absolute prefactor.

import numpy as np

from slowbeams.sublimation import HEATING_RATE, REFERENCE_ENTHALPIES, fit_enthalpy, synthesize_ramp

T0, T_end = 540.0, 563.0
duration = (T_end - T0) / HEATING_RATE

for name, mass, dH, err in REFERENCE_ENTHALPIES:
    fits = [fit_enthalpy(synthesize_ramp(T0, HEATING_RATE, duration, dH * 1e3, 1e25, 0.02,
                                         seed=s)) for s in range(50)]
    vals = np.array([f.delta_H for f in fits])
    print("%-16s %5d amu  reference %5.0f +- %2.0f  recovered %6.1f (scatter %.1f) kJ/mol"
          % (name, mass, dH, err, vals.mean(), vals.std()))

# With 2% noise the scatter between ramps is comparable to the quoted
# uncertainties, which is why several ramps are averaged.
