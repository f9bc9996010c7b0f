"""Simulation and analysis tools for slow beams of massive molecules."""

__version__ = "0.1.0"

from .constants import CATALOGUE, Molecule, get_molecule, kinetic_energy, de_broglie_wavelength
from .errors import (DomainError, FitError, IntegrationError, StepSizeError,
                     ThresholdNotFound)
from .optics import (GaussianBeam, LaserPulse, dipole_potential_depth, photons_absorbed,
                     pulsed_deceleration, stopping_power, transit_photon_dose,
                     transverse_capture_speed)
from .source import (FluxReport, SourceParams, VelocityHistogram, beam_flux_density,
                     fit_floating_mb, floating_mb_pdf, sample_velocities)
from .selector import SelectorParams, apply_selector, selector_setpoint, transmission
from .sublimation import RampSeries, arrhenius_rate, fit_enthalpy, synthesize_ramp
from .focus import (DetectorSpec, EnsembleSpec, ParticleState, forward_gain, gaussian_field,
                    integrate_trajectory, simulate_ensemble)
from .cooling import (CavityPump, CoolingEnsemble, coupling_from_power, detect_threshold,
                      evolve, order_parameter, steady_state_field)
from .config import RunConfig, load_config
