"""Run configuration: an INI-style file of ``[section]`` / ``key = value`` lines.

Every section has defaults taken from the measured or proposed experimental
values, so an empty file is a complete configuration. Unknown sections and
keys are rejected.
"""
from __future__ import annotations

import configparser
import dataclasses
import math
import zlib
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import DomainError


class ConfigError(Exception):
    """Base class for configuration problems."""


class ConfigFileNotFound(ConfigError):
    pass


class ConfigSyntaxError(ConfigError):
    def __init__(self, message, lineno=None):
        super().__init__(message)
        self.lineno = lineno


class UnknownKeyError(ConfigError):
    pass


class ConfigValueError(ConfigError):
    def __init__(self, message, section=None, key=None):
        super().__init__(message)
        self.section = section
        self.key = key


@dataclass
class RunSection:
    seed: int = 0
    output_dir: str = "slowbeams-out"


@dataclass
class MoleculeSection:
    name: str = "perfluoroC60-n7"
    # optional overrides of the catalogue entry
    mass_amu: float | None = None
    alpha_A3: float | None = None
    sigma_abs: float | None = None
    sigma_ion: float | None = None


@dataclass
class SourceSection:
    temperature: float = 302.0
    drift: float = 51.0
    n_samples: int = 1_000_000
    bin_width: float = 2.0
    count_rate: float = 7.5e5
    detection_efficiency: float = 1e-4
    detector_area: float = 0.075e-4
    distance_detector: float = 0.8
    mean_speed: float = 44.0
    density_distance: float = 3e-3


@dataclass
class SelectorSection:
    rotor_freq: float = 47.2
    calibration: float = 1.08
    fwhm_rel: float = 0.05
    freq_stability: float = 1e-3
    shape: str = "triangle"
    jitter: bool = False


@dataclass
class SublimationSection:
    delta_H: float = 222.0  # kJ/mol
    prefactor: float = 1e25  # 1/s
    T0: float = 540.0
    T_end: float = 563.0
    heating_rate: float = 0.7  # K/min
    noise_rel: float = 0.02
    noise: str = "gaussian"
    sample_interval: float = 10.0


@dataclass
class OpticsSection:
    power: float = 1.0
    waist: float = 100e-6
    wavelength: float = 1064e-9
    pulse_energy: float = 3e-3
    pulse_duration: float = 7.5e-12
    pulse_waist: float = 1e-3
    speed: float = 50.0
    sigma_scale: float = 1.0


@dataclass
class FocusSection:
    powers: list = field(default_factory=lambda: [6e4])
    waist: float = 100e-6
    wavelength: float = 1064e-9
    dual: bool = False
    n_particles: int = 10_000
    source_side: float = 50e-6
    source_distance: float = 3e-3
    v_mean: float = 50.0
    v_spread: float = 1.0
    detector_distance: float = 0.5
    detector_half_width: float = 1e-3
    dt: float = 1e-8
    gravity: bool = False
    n_record: int = 20
    record_every: int = 10


@dataclass
class CoolingSection:
    n: int = 1000
    mass_amu: float = 5000.0
    v_mean: float = 10.0
    v_spread: float = 1.5
    kappa: float = 2 * math.pi * 1e6
    detuning: float | None = None
    waist: float = 400e-6
    powers: list = field(default_factory=lambda: [1e3 / 3, 1e3, 3e3])
    threshold_power: float = 1e3
    rescale: float = 1.0
    transit: bool = True
    t_end: float | None = None
    dt: float | None = None


SECTIONS = {
    "run": RunSection,
    "molecule": MoleculeSection,
    "source": SourceSection,
    "selector": SelectorSection,
    "sublimation": SublimationSection,
    "optics": OpticsSection,
    "focus": FocusSection,
    "cooling": CoolingSection,
}


@dataclass
class RunConfig:
    run: RunSection = field(default_factory=RunSection)
    molecule: MoleculeSection = field(default_factory=MoleculeSection)
    source: SourceSection = field(default_factory=SourceSection)
    selector: SelectorSection = field(default_factory=SelectorSection)
    sublimation: SublimationSection = field(default_factory=SublimationSection)
    optics: OpticsSection = field(default_factory=OpticsSection)
    focus: FocusSection = field(default_factory=FocusSection)
    cooling: CoolingSection = field(default_factory=CoolingSection)

    def molecule_obj(self):
        from .constants import Molecule, get_molecule

        m = self.molecule
        base = get_molecule(m.name)
        return Molecule(
            name=base.name,
            mass=base.mass if m.mass_amu is None else m.mass_amu * _amu(),
            alpha_vol=base.alpha_vol if m.alpha_A3 is None else m.alpha_A3 * 1e-30,
            sigma_abs=base.sigma_abs if m.sigma_abs is None else m.sigma_abs,
            sigma_ion=base.sigma_ion if m.sigma_ion is None else m.sigma_ion,
            dipole=base.dipole,
        )


def _amu():
    from .constants import AMU
    return AMU


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_value(text, annotation):
    text = text.strip()
    optional = "None" in str(annotation)
    if optional and text in ("", "none", "None"):
        return None
    kind = str(annotation)
    if "list" in kind:
        parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
        return [float(p) for p in parts]
    if "bool" in kind:
        return _parse_bool(text)
    if "int" in kind:
        val = float(text)
        if val != int(val):
            raise ValueError(f"expected an integer, got {text!r}")
        return int(val)
    if "float" in kind:
        return float(text)
    return text


def _format_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def _annotations(cls):
    # annotations are strings here (postponed evaluation); _parse_value reads them as text
    return {f.name: f.type for f in fields(cls)}


def parse_config(text, source="<string>"):
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=None,
                                       strict=True, empty_lines_in_values=False)
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(source))
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigSyntaxError(f"{source}:{exc.lineno}: key outside of any [section]",
                                exc.lineno) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigSyntaxError(f"{source}:{exc.lineno}: {exc.message.splitlines()[0]}",
                                exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigSyntaxError(f"{source}:{lineno}: cannot parse {line.strip()!r}",
                                lineno) from None

    cfg = RunConfig()
    for section in parser.sections():
        if section not in SECTIONS:
            raise UnknownKeyError(f"unknown section [{section}]; expected one of "
                                  f"{', '.join(SECTIONS)}")
        target = getattr(cfg, section)
        types = _annotations(SECTIONS[section])
        for key, raw in parser.items(section):
            if key not in types:
                raise UnknownKeyError(f"unknown key {key!r} in [{section}]; known keys: "
                                      f"{', '.join(types)}")
            try:
                setattr(target, key, _parse_value(raw, types[key]))
            except ValueError as exc:
                raise ConfigValueError(f"[{section}] {key}: {exc}", section, key) from None
    validate(cfg)
    return cfg


def load_config(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigFileNotFound(f"config file not found: {path}")
    return parse_config(path.read_text(), source=path)


def _check(cond, section, key, message):
    if not cond:
        raise ConfigValueError(f"[{section}] {key}: {message}", section, key)


def validate(cfg):
    """Check per-module invariants by constructing the domain objects."""
    from .constants import CATALOGUE
    from .cooling import CavityPump
    from .focus import DetectorSpec, EnsembleSpec
    from .selector import SelectorParams
    from .source import FluxReport

    _check(cfg.molecule.name in CATALOGUE, "molecule", "name",
           f"unknown molecule {cfg.molecule.name!r}")
    checks = [
        ("molecule", "mass", lambda: cfg.molecule_obj()),
        ("selector", "fwhm_rel", lambda: SelectorParams(**dataclasses.asdict(cfg.selector))),
        ("source", "count_rate", lambda: FluxReport(
            cfg.source.count_rate, cfg.source.detection_efficiency, cfg.source.detector_area,
            cfg.source.distance_detector, cfg.source.mean_speed)),
        ("focus", "n_particles", lambda: EnsembleSpec(
            cfg.focus.n_particles, cfg.focus.source_side, cfg.focus.source_distance,
            cfg.focus.v_mean, cfg.focus.v_spread)),
        ("focus", "detector_distance", lambda: DetectorSpec(
            cfg.focus.detector_distance, cfg.focus.detector_half_width)),
        ("cooling", "kappa", lambda: CavityPump(
            kappa=cfg.cooling.kappa, detuning=cfg.cooling.detuning, waist=cfg.cooling.waist,
            rescale=cfg.cooling.rescale)),
    ]
    for section, key, build in checks:
        try:
            build()
        except DomainError as exc:
            # the domain message names the offending field
            raise ConfigValueError(f"[{section}] {exc}", section, key) from None

    s = cfg.source
    _check(s.temperature > 0, "source", "temperature", "must be positive")
    _check(s.drift >= 0, "source", "drift", "must be non-negative")
    _check(s.n_samples >= 1, "source", "n_samples", "must be at least 1")
    _check(s.bin_width > 0, "source", "bin_width", "must be positive")
    _check(s.density_distance > 0, "source", "density_distance", "must be positive")
    b = cfg.sublimation
    _check(0 < b.T0 < b.T_end, "sublimation", "T_end", "need 0 < T0 < T_end")
    _check(b.T_end <= 650.0, "sublimation", "T_end",
           "exceeds decomposition temperature 650 K")
    _check(b.heating_rate > 0, "sublimation", "heating_rate", "must be positive")
    _check(b.noise_rel >= 0, "sublimation", "noise_rel", "must be non-negative")
    _check(b.noise in ("gaussian", "poisson"), "sublimation", "noise",
           "must be 'gaussian' or 'poisson'")
    _check(b.sample_interval > 0, "sublimation", "sample_interval", "must be positive")
    o = cfg.optics
    for key in ("waist", "wavelength", "pulse_energy", "pulse_duration", "pulse_waist", "speed"):
        _check(getattr(o, key) > 0, "optics", key, "must be positive")
    _check(o.power >= 0, "optics", "power", "must be non-negative")
    _check(o.sigma_scale >= 0, "optics", "sigma_scale", "must be non-negative")
    f = cfg.focus
    _check(len(f.powers) >= 1 and all(p >= 0 for p in f.powers), "focus", "powers",
           "need at least one non-negative power")
    _check(f.waist > 0 and f.wavelength > 0, "focus", "waist", "waist and wavelength must be positive")
    _check(f.dt > 0, "focus", "dt", "must be positive")
    _check(f.n_record >= 0 and f.record_every >= 1, "focus", "record_every", "must be at least 1")
    c = cfg.cooling
    _check(c.n >= 2, "cooling", "n", "need at least two particles")
    _check(c.mass_amu > 0, "cooling", "mass_amu", "must be positive")
    _check(c.v_mean > 0 and c.v_spread > 0, "cooling", "v_spread", "speeds must be positive")
    _check(all(p >= 0 for p in c.powers) and c.powers, "cooling", "powers",
           "need at least one non-negative power")
    _check(c.threshold_power > 0, "cooling", "threshold_power", "must be positive")
    _check(c.t_end is None or c.t_end > 0, "cooling", "t_end", "must be positive")
    _check(c.dt is None or c.dt > 0, "cooling", "dt", "must be positive")
    _check(c.transit or c.t_end is not None, "cooling", "t_end",
           "required when transit = false")
    return cfg


def dump_config(cfg):
    lines = []
    for section in SECTIONS:
        lines.append(f"[{section}]")
        obj = getattr(cfg, section)
        for f in fields(obj):
            lines.append(f"{f.name} = {_format_value(getattr(obj, f.name))}".rstrip())
        lines.append("")
    return "\n".join(lines)


def write_manifest(cfg, path, command, version):
    """Resolved config with a provenance header; loadable by :func:`load_config`."""
    header = [f"# slowbeams {version}", f"# command: {' '.join(command)}", ""]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(header) + dump_config(cfg))
    return path


def derive_seed(seed, module, index=None):
    """Independent integer seed for ``module`` (and optionally an item index)."""
    entropy = [int(seed), zlib.crc32(module.encode())]
    # trailing zeros in the entropy list are dropped, so the index goes in the spawn key
    spawn = () if index is None else (int(index),)
    ss = np.random.SeedSequence(entropy, spawn_key=spawn)
    return int(ss.generate_state(1, dtype=np.uint64)[0])
