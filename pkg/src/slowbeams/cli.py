"""Command-line entry point: ``slowbeams <subcommand> [options]``.

Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure.
Results go to standard output as ``key=value`` lines (or one JSON object with
``--json-summary``) and to CSV files in the output directory; diagnostics go
to standard error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, derive_seed, load_config, write_manifest
from .constants import AMU, EV, get_molecule, joule_to_ev, kinetic_energy
from .cooling import (CavityPump, CoolingEnsemble, detect_threshold, evolve, pump_at_power)
from .errors import DomainError, FitError, IntegrationError, StepSizeError, ThresholdNotFound
from .focus import (DetectorSpec, EnsembleSpec, crossed_beams, forward_gain, geometric_hit_fraction,
                    simulate_ensemble)
from .optics import (dipole_potential_depth, photons_absorbed, pulsed_deceleration,
                     stopping_power, transit_photon_dose, transverse_capture_speed)
from .report import ReportError, write_report
from .selector import SelectorParams, apply_selector, selector_setpoint, transmission
from .source import (FluxReport, SourceParams, VelocityHistogram, beam_flux_density,
                     fit_floating_mb, floating_mb_mean, floating_mb_mode, sample_velocities)
from .sublimation import REFERENCE_ENTHALPIES, RampSeries, fit_enthalpy, synthesize_ramp
from .tables import SeriesTable, histogram_table, read_csv, write_csv
from .units import quantity

log = logging.getLogger("slowbeams")

OUTPUT_ENV = "SLOWBEAMS_OUTPUT_DIR"
NUMERICAL_ERRORS = (FitError, IntegrationError, StepSizeError, ThresholdNotFound,
                    FloatingPointError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _common(parser):
    g = parser.add_argument_group("global options")
    g.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="run configuration file")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="global seed")
    g.add_argument("--output-dir", type=Path, default=argparse.SUPPRESS,
                   help=f"output directory (overrides ${OUTPUT_ENV} and the config)")
    g.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                   help="print only key=value lines")
    g.add_argument("--json-summary", action="store_true", default=argparse.SUPPRESS,
                   help="print one JSON object instead of key=value lines")
    g.add_argument("--digits", type=int, default=argparse.SUPPRESS,
                   help="significant digits of printed values (default 2)")


def build_parser():
    parser = _Parser(prog="slowbeams", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"slowbeams {__version__}")
    _common(parser)
    sub = parser.add_subparsers(dest="command", metavar="subcommand", parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        _common(p)
        p.set_defaults(func=func)
        return p

    length, power, time_, energy = (quantity("length"), quantity("power"), quantity("time"),
                                    quantity("energy"))
    mass, volume, area = quantity("mass"), quantity("volume"), quantity("area")

    p = add("potential", cmd_potential, "dipole well depth of a focused beam")
    p.add_argument("--alpha", type=volume, help="polarizability, e.g. 200A3")
    p.add_argument("--power", type=power)
    p.add_argument("--waist", type=length)

    p = add("absorption", cmd_absorption, "photons absorbed at peak intensity during a pulse")
    p.add_argument("--power", type=power)
    p.add_argument("--sigma", type=area, help="absorption cross section")
    p.add_argument("--tau", type=time_, help="pulse duration")
    p.add_argument("--waist", type=length)
    p.add_argument("--wavelength", type=length)

    p = add("stop-power", cmd_stop_power, "beam power whose well matches a kinetic energy")
    p.add_argument("--energy", type=energy, help="kinetic energy, e.g. 50meV")
    p.add_argument("--alpha", type=volume)
    p.add_argument("--waist", type=length)

    p = add("pulse-slow", cmd_pulse_slow, "speed lost on a pulsed potential hill")
    p.add_argument("--speed", type=float)
    p.add_argument("--pulse-energy", type=energy)
    p.add_argument("--duration", type=time_)
    p.add_argument("--waist", type=length)
    p.add_argument("--alpha", type=volume)
    p.add_argument("--mass", type=mass)

    p = add("capture", cmd_capture, "transverse capture speed and transit photon dose")
    p.add_argument("--depth", type=energy, help="well depth; default from --power")
    p.add_argument("--power", type=power)
    p.add_argument("--waist", type=length)
    p.add_argument("--mass", type=mass)
    p.add_argument("--speed", type=float, help="forward speed for the photon dose")

    p = add("sample-source", cmd_sample_source, "sample the floating Maxwell-Boltzmann source")
    p.add_argument("--n", type=int)
    p.add_argument("--temperature", type=float)
    p.add_argument("--drift", type=float)
    p.add_argument("--bin-width", type=float)

    p = add("fit-velocity", cmd_fit_velocity, "fit a velocity histogram CSV")
    p.add_argument("histogram", type=Path)

    p = add("selector", cmd_selector, "pass a beam through the velocity selector")
    p.add_argument("--rotor-freq", type=float)
    p.add_argument("--fwhm-rel", type=float)
    p.add_argument("--calibration", type=float)
    p.add_argument("--input", type=Path, help="velocity histogram CSV to filter")

    p = add("fit-arrhenius", cmd_fit_arrhenius, "sublimation enthalpy from a ramp CSV")
    p.add_argument("ramp", type=Path)
    p.add_argument("--molecule")

    p = add("synth-ramp", cmd_synth_ramp, "synthetic Arrhenius temperature ramp")
    p.add_argument("--delta-h", type=float, help="kJ/mol")
    p.add_argument("--compound", help="take delta-h from the reference table for this molecule")
    p.add_argument("--T0", type=float)
    p.add_argument("--T-end", type=float)
    p.add_argument("--rate", type=float, help="heating rate in K/min")
    p.add_argument("--noise", type=float, help="relative noise")

    p = add("focus-sim", cmd_focus_sim, "trajectory ensemble through the focusing field")
    p.add_argument("--power", type=power, nargs="+")
    p.add_argument("--dual", action="store_true", default=None)
    p.add_argument("--n", type=int)
    p.add_argument("--waist", type=length)

    p = add("cool-sim", cmd_cool_sim, "collective cavity cooling runs")
    p.add_argument("--power", type=power, nargs="+")
    p.add_argument("--n", type=int)

    p = add("threshold-scan", cmd_threshold_scan, "locate the self-organization threshold")
    p.add_argument("--power", type=power, nargs="+")
    p.add_argument("--n", type=int)

    p = add("report", cmd_report, "summarize a run directory")
    p.add_argument("run_dir", type=Path)
    return parser


def _pick(value, default):
    return default if value is None else value


# closed-form estimates

def cmd_potential(args, cfg, out):
    mol = cfg.molecule_obj()
    alpha = _pick(args.alpha, mol.alpha_vol)
    P = _pick(args.power, cfg.optics.power)
    w0 = _pick(args.waist, cfg.optics.waist)
    U = dipole_potential_depth(alpha, P, w0)
    return {"U_eV": joule_to_ev(U), "U_J": U}, [f"well depth {joule_to_ev(U):.3g} eV"]


def cmd_absorption(args, cfg, out):
    o = cfg.optics
    mol = cfg.molecule_obj()
    P = _pick(args.power, o.pulse_energy / o.pulse_duration)
    n = photons_absorbed(P, _pick(args.sigma, mol.sigma_abs * o.sigma_scale),
                         _pick(args.tau, o.pulse_duration), _pick(args.waist, o.pulse_waist),
                         _pick(args.wavelength, o.wavelength))
    return {"N_abs": n}, [f"{n:.3g} photons absorbed"]


def cmd_stop_power(args, cfg, out):
    mol = cfg.molecule_obj()
    e = _pick(args.energy, kinetic_energy(mol.mass, cfg.optics.speed))
    P = stopping_power(e, _pick(args.alpha, mol.alpha_vol), _pick(args.waist, cfg.optics.waist))
    return {"P_W": P}, [f"stopping power {P:.3g} W"]


def cmd_pulse_slow(args, cfg, out):
    o = cfg.optics
    mol = cfg.molecule_obj()
    duration = _pick(args.duration, o.pulse_duration)
    P = _pick(args.pulse_energy, o.pulse_energy) / duration
    w0 = _pick(args.waist, o.pulse_waist)
    U = dipole_potential_depth(_pick(args.alpha, mol.alpha_vol), P, w0)
    dv = pulsed_deceleration(_pick(args.speed, o.speed), U, _pick(args.mass, mol.mass))
    n = photons_absorbed(P, mol.sigma_abs * o.sigma_scale, duration, w0, o.wavelength)
    return ({"U_eV": joule_to_ev(U), "dv_mps": dv, "N_abs": n},
            [f"hill {joule_to_ev(U) * 1e3:.3g} meV, speed loss {dv:.3g} m/s, "
             f"{n:.2g} photons absorbed"])


def cmd_capture(args, cfg, out):
    o = cfg.optics
    mol = cfg.molecule_obj()
    w0 = _pick(args.waist, o.waist)
    if args.depth is not None:
        U = args.depth
        P = stopping_power(U, mol.alpha_vol, w0)
    else:
        P = _pick(args.power, o.power)
        U = dipole_potential_depth(mol.alpha_vol, P, w0)
    v = transverse_capture_speed(U, _pick(args.mass, mol.mass))
    dose = transit_photon_dose(P, w0, _pick(args.speed, o.speed), mol.sigma_abs * o.sigma_scale,
                               o.wavelength)
    return ({"v_capture_mps": v, "dose_photons": dose, "P_W": P},
            [f"captures transverse speeds up to {v:.3g} m/s; {dose:.3g} photons per transit"])


# source and selector

def _source_params(args, cfg):
    return SourceParams(_pick(getattr(args, "temperature", None), cfg.source.temperature),
                        _pick(getattr(args, "drift", None), cfg.source.drift),
                        cfg.molecule_obj())


def cmd_sample_source(args, cfg, out):
    params = _source_params(args, cfg)
    n = _pick(args.n, cfg.source.n_samples)
    v = sample_velocities(n, params, seed=derive_seed(cfg.run.seed, "source"))
    hist = VelocityHistogram.from_samples(v, _pick(args.bin_width, cfg.source.bin_width))
    path = write_csv(histogram_table(hist.bin_edges, hist.counts), out / "velocities.csv")
    s = cfg.source
    flux, density = beam_flux_density(
        FluxReport(s.count_rate, s.detection_efficiency, s.detector_area, s.distance_detector,
                   s.mean_speed), s.density_distance)
    summary = {"n": n, "mean_mps": float(np.mean(v)), "pdf_mean_mps": floating_mb_mean(params),
               "mode_mps": floating_mb_mode(params), "min_mps": float(v.min()),
               "flux_m2s": flux, "density_m3": density}
    return summary, [f"wrote {path}"]


def cmd_fit_velocity(args, cfg, out):
    t = read_csv(args.histogram, name="velocities")
    hist = VelocityHistogram.from_centers(t.column("v_mps"), t.column("count"))
    fit = fit_floating_mb(hist, cfg.molecule_obj().mass)
    table = SeriesTable.from_columns(
        "velocity_fit", drift_mps=fit.drift, drift_err=fit.drift_err, T_K=fit.temperature,
        T_err=fit.temperature_err, amplitude=fit.amplitude, amplitude_err=fit.amplitude_err,
        mode_mps=fit.mode, chi2=fit.chi2, dof=fit.dof)
    path = write_csv(table, out / "velocity_fit.csv")
    return ({"drift_mps": fit.drift, "drift_err": fit.drift_err, "T_K": fit.temperature,
             "T_err": fit.temperature_err, "mode_mps": fit.mode, "chi2_dof": fit.chi2 / fit.dof},
            [f"drift {fit.drift:.2f} +- {fit.drift_err:.2f} m/s, "
             f"T {fit.temperature:.1f} +- {fit.temperature_err:.1f} K; wrote {path}"])


def cmd_selector(args, cfg, out):
    s = dataclasses.asdict(cfg.selector)
    for key in ("rotor_freq", "fwhm_rel", "calibration"):
        if getattr(args, key) is not None:
            s[key] = getattr(args, key)
    p = SelectorParams(**s)
    seed = derive_seed(cfg.run.seed, "selector")
    if args.input is not None:
        t = read_csv(args.input, name="velocities")
        v, counts = t.column("v_mps"), t.column("count")
        kept = counts * transmission(v, p)
        table = SeriesTable.from_columns("velocities", v_mps=v, count=kept)
        fraction = kept.sum() / counts.sum()
    else:
        samples = sample_velocities(cfg.source.n_samples, _source_params(args, cfg),
                                    seed=derive_seed(cfg.run.seed, "source"))
        kept = apply_selector(samples, p, seed=seed)
        hist = VelocityHistogram.from_samples(samples, cfg.source.bin_width)
        counts, _ = np.histogram(kept, bins=hist.bin_edges)
        table = histogram_table(hist.bin_edges, counts)
        fraction = kept.size / samples.size
    path = write_csv(table, out / "selected_velocities.csv")
    return ({"setpoint_mps": selector_setpoint(p), "kept_fraction": fraction},
            [f"setpoint {selector_setpoint(p):.3g} m/s; wrote {path}"])


# sublimation

def cmd_fit_arrhenius(args, cfg, out):
    t = read_csv(args.ramp, name="ramp")
    series = RampSeries(t.column("t_s"), t.column("T_K"), t.column("rate_cps"))
    res = fit_enthalpy(series)
    name = _pick(args.molecule, cfg.molecule.name)
    mass_amu = get_molecule(name).mass_amu
    table = SeriesTable.from_columns("enthalpy", molecule=[name], mass_amu=[mass_amu],
                                     dH_kJmol=[res.delta_H], err_kJmol=[res.stderr])
    path = write_csv(table, out / "enthalpy.csv")
    return ({"dH_kJmol": res.delta_H, "err_kJmol": res.stderr, "n_points": res.n_points},
            [f"sublimation enthalpy {res.delta_H:.1f} +- {res.stderr:.1f} kJ/mol; wrote {path}"])


def cmd_synth_ramp(args, cfg, out):
    b = cfg.sublimation
    dH = _pick(args.delta_h, b.delta_H)
    if args.compound is not None:
        ref = {name: d for name, _, d, _ in REFERENCE_ENTHALPIES}
        if args.compound not in ref:
            raise DomainError(f"no reference enthalpy for {args.compound!r}")
        dH = ref[args.compound]
    T0, T_end = _pick(args.T0, b.T0), _pick(args.T_end, b.T_end)
    rate = _pick(args.rate, b.heating_rate) / 60.0
    series = synthesize_ramp(T0, rate, (T_end - T0) / rate, dH * 1e3, b.prefactor,
                             _pick(args.noise, b.noise_rel),
                             seed=derive_seed(cfg.run.seed, "sublimation"),
                             sample_interval=b.sample_interval, noise=b.noise)
    table = SeriesTable.from_columns("ramp", t_s=series.time, T_K=series.temperature,
                                     rate_cps=series.count_rate)
    path = write_csv(table, out / "ramp.csv")
    return ({"n_points": len(series),
             "rate_ratio": series.count_rate[-1] / series.count_rate[0]}, [f"wrote {path}"])


# simulations

def cmd_focus_sim(args, cfg, out):
    f = cfg.focus
    mol = cfg.molecule_obj()
    powers = _pick(args.power, f.powers)
    dual = _pick(args.dual, f.dual)
    waist = _pick(args.waist, f.waist)
    spec = EnsembleSpec(_pick(args.n, f.n_particles), f.source_side, f.source_distance,
                        f.v_mean, f.v_spread, seed=derive_seed(cfg.run.seed, "focus"))
    det = DetectorSpec(f.detector_distance, f.detector_half_width)
    kw = dict(dt=f.dt, gravity=f.gravity, n_record=f.n_record, record_every=f.record_every)
    base = simulate_ensemble(spec, (), mol, det, **kw)
    runs = [(0.0, base)]
    for P in powers:
        if P > 0:
            log.info("focus-sim: %g W", P)
            runs.append((P, simulate_ensemble(spec, crossed_beams(P, waist, f.wavelength, dual),
                                              mol, det, **kw)))
    summary = {"hit_fraction_0W": base.hit_fraction,
               "geometric_fraction": geometric_hit_fraction(spec, det)}
    rows = {k: [] for k in ("power_W", "dual", "hit_fraction", "gain", "width_vy",
                            "dose_p50", "dose_p90", "dose_p99")}
    fv = {k: [] for k in ("power_W", "vx", "vy", "vz", "hit")}
    for P, res in runs:
        gain = forward_gain(res, base)
        doses = res.dose_percentiles()
        for k, val in zip(rows, (P, float(dual), res.hit_fraction, gain,
                                 res.transverse_width(1), *doses)):
            rows[k].append(val)
        fv["power_W"].append(np.full(spec.n_particles, P))
        for j, k in enumerate(("vx", "vy", "vz")):
            fv[k].append(res.final_velocity[:, j])
        fv["hit"].append(res.hit.astype(float))
        if P > 0:
            summary[f"gain_{P:g}W"] = gain
            summary[f"dose_p50_{P:g}W"] = doses[0]
    write_csv(SeriesTable.from_columns("focus_summary", **rows), out / "summary.csv")
    write_csv(SeriesTable.from_columns("final_velocities",
                                       **{k: np.concatenate(v) for k, v in fv.items()}),
              out / "final_velocities.csv")
    traj = runs[1][1] if len(runs) > 1 else base
    cols = {k: [] for k in ("id", "t", "x", "y", "z", "vx", "vy", "vz")}
    for i, arr in traj.trajectories.items():
        cols["id"].append(np.full(len(arr), i, dtype=float))
        for j, k in enumerate(("t", "x", "y", "z", "vx", "vy", "vz")):
            cols[k].append(arr[:, j])
    if cols["id"]:
        write_csv(SeriesTable.from_columns("trajectories",
                                           **{k: np.concatenate(v) for k, v in cols.items()}),
                  out / "trajectories.csv")
    return summary, [f"wrote summary.csv, final_velocities.csv, trajectories.csv to {out}"]


def _cooling_setup(args, cfg):
    c = cfg.cooling
    ens = CoolingEnsemble.sample(_pick(getattr(args, "n", None), c.n), c.mass_amu * AMU,
                                 c.v_mean, c.v_spread, seed=derive_seed(cfg.run.seed, "cooling"))
    pump = CavityPump(kappa=c.kappa, detuning=c.detuning, waist=c.waist, rescale=c.rescale)
    return ens, pump


def _velocity_table(v, width=0.1):
    top = max(abs(float(v.min())), abs(float(v.max()))) + width
    edges = np.arange(-math.ceil(top / width) * width, top + width, width)
    counts, _ = np.histogram(v, bins=edges)
    return histogram_table(edges, counts)


def cmd_cool_sim(args, cfg, out):
    c = cfg.cooling
    mol_alpha = cfg.molecule_obj().alpha_vol
    ens, template = _cooling_setup(args, cfg)
    powers = _pick(args.power, c.powers)
    rows = {k: [] for k in ("power_W", "ke_initial_J", "ke_final_J", "ke_ratio", "late_theta")}
    summary = {}
    write_csv(_velocity_table(ens.v), out / "cool_velocities_initial.csv")
    for P in powers:
        log.info("cool-sim: %g W", P)
        pump = pump_at_power(P, template, ens, alpha_vol=mol_alpha,
                             threshold_power=c.threshold_power)
        tr = evolve(ens, pump, c.t_end, c.dt, transit=c.transit)
        tag = f"{P:g}W"
        write_csv(SeriesTable.from_columns("cooling_trace", t_s=tr.time, KE_J=tr.mean_KE_axis,
                                           photon_n=tr.photon_number, theta=tr.order_param),
                  out / f"cooling_trace_{tag}.csv")
        write_csv(_velocity_table(tr.final_v), out / f"cool_velocities_{tag}.csv")
        for k, val in zip(rows, (P, tr.mean_KE_axis[0], tr.mean_KE_axis[-1], tr.ke_ratio,
                                 tr.late_order())):
            rows[k].append(val)
        summary[f"ke_ratio_{tag}"] = tr.ke_ratio
        summary[f"theta_{tag}"] = tr.late_order()
    write_csv(SeriesTable.from_columns("cool_summary", **rows), out / "cool_summary.csv")
    return summary, [f"wrote cooling traces for {len(powers)} powers to {out}"]


def cmd_threshold_scan(args, cfg, out):
    c = cfg.cooling
    ens, template = _cooling_setup(args, cfg)
    powers = _pick(args.power, c.powers)
    if len(powers) < 3:
        raise DomainError("threshold-scan needs at least three powers")
    scan = detect_threshold(powers, ens, template, c.t_end, transit=c.transit, dt=c.dt,
                            alpha_vol=cfg.molecule_obj().alpha_vol)
    crossed = (scan.powers >= scan.estimate).astype(float)
    write_csv(SeriesTable.from_columns("threshold", power_W=scan.powers,
                                       late_theta=scan.late_order, crossed=crossed),
              out / "threshold.csv")
    lo, hi = scan.bracket
    return ({"P_T_W": scan.estimate, "bracket_low_W": lo, "bracket_high_W": hi},
            [f"threshold between {lo:g} and {hi:g} W"])


def cmd_report(args, cfg, out):
    rep, path = write_report(args.run_dir)
    if not getattr(args, "quiet", False):
        sys.stdout.write(rep.text())
    if rep.failed:
        cols = ", ".join(f"{f}:{c}" for f, c in rep.broken)
        raise FloatingPointError(f"non-finite data in {cols}")
    passed = sum(ok for _, ok in rep.verdicts)
    return {"verdicts": len(rep.verdicts), "passed": passed}, []


def _format(value, digits):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return f"{float(value):.{max(digits, 1) - 1}e}"


def _output_dir(args, cfg):
    if hasattr(args, "output_dir"):
        return Path(args.output_dir)
    env = os.environ.get(OUTPUT_ENV)
    return Path(env) if env else Path(cfg.run.output_dir)


def run_command(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        parser.print_help(sys.stderr)
        return 1
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        print("slowbeams: error: a subcommand is required", file=sys.stderr)
        return 1
    quiet = getattr(args, "quiet", False)
    logging.basicConfig(level=logging.WARNING if quiet else logging.INFO,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config) if hasattr(args, "config") else RunConfig()
        if hasattr(args, "seed"):
            cfg.run.seed = args.seed
        out = _output_dir(args, cfg)
        if args.command != "report":
            out.mkdir(parents=True, exist_ok=True)
            cfg.run.output_dir = str(out)
            write_manifest(cfg, out / "manifest.ini", ["slowbeams"] + argv, __version__)
        summary, notes = args.func(args, cfg, out)
    except (ConfigError, DomainError, ReportError, KeyError, ValueError, OSError) as exc:
        if isinstance(exc, NUMERICAL_ERRORS):
            print(f"slowbeams: numerical failure: {exc}", file=sys.stderr)
            return 2
        print(f"slowbeams: error: {exc}", file=sys.stderr)
        return 1
    except NUMERICAL_ERRORS as exc:
        print(f"slowbeams: numerical failure: {exc}", file=sys.stderr)
        return 2

    digits = getattr(args, "digits", 2)
    if getattr(args, "json_summary", False):
        print(json.dumps({k: (v if isinstance(v, (int, str)) else float(v))
                          for k, v in summary.items()}, sort_keys=False))
    else:
        if not quiet:
            for note in notes:
                print(note)
        for k, v in summary.items():
            print(f"{k}={_format(v, digits)}")
    return 0


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
