# Back-of-the-envelope numbers for optical manipulation
#
# All quantities follow from the polarizability, the laser power and the waist.

from slowbeams.constants import AMU, ev_to_joule, joule_to_ev
from slowbeams.optics import (dipole_potential_depth, photons_absorbed, pulsed_deceleration,
                              stopping_power, transit_photon_dose, transverse_capture_speed)

alpha = 200e-30  # m^3
waist = 100e-6
mass = 5053 * AMU

print("well depth per watt: %.2f neV" % (joule_to_ev(dipole_potential_depth(alpha, 1.0, waist)) * 1e9))

# Stopping a 50 meV molecule head-on with a continuous beam
P = stopping_power(ev_to_joule(50e-3), alpha, waist)
print("power to stop 50 meV: %.2g W" % P)

# A nanosecond pulse of that power heats the molecule badly...
print("photons absorbed in 5 ns: %.0f" % photons_absorbed(P, 3e-23, 5e-9, waist, 1064e-9))
# ...a picosecond pulse does not.
P_ps = 3e-3 / 7.5e-12
print("photons absorbed in 7.5 ps: %.2f" % photons_absorbed(P_ps, 3e-23, 7.5e-12, 1e-3, 1064e-9))

U = dipole_potential_depth(alpha, P_ps, 1e-3)
print("picosecond hill %.1f meV slows 50 m/s molecules by %.1f m/s"
      % (joule_to_ev(U) * 1e3, pulsed_deceleration(50.0, U, mass)))

# A 10 kW standing focus captures slow transverse motion
U = dipole_potential_depth(alpha, 1e4, waist)
print("10 kW: depth %.3f meV, capture up to %.2f m/s, %.0f photons per transit"
      % (joule_to_ev(U) * 1e3, transverse_capture_speed(U, mass),
         transit_photon_dose(1e4, waist, 50.0, 3e-23, 1064e-9)))
