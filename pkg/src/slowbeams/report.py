"""Summarize a run directory against the reference values it is meant to reproduce."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import load_config
from .sublimation import REFERENCE_ENTHALPIES, RampSeries, fit_enthalpy
from .tables import read_csv

MANIFEST = "manifest.ini"
GAIN_BANDS = {False: (1.5, 3.0), True: (3.0, 5.0)}


class ReportError(Exception):
    pass


@dataclass
class Report:
    lines: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    broken: list = field(default_factory=list)  # (file, column) with non-finite entries

    @property
    def failed(self):
        return bool(self.broken)

    def verdict(self, label, ok, detail):
        self.verdicts.append((label, ok))
        self.lines.append(f"- {label}: **{'PASS' if ok else 'FAIL'}** ({detail})")

    def text(self):
        return "\n".join(self.lines) + "\n"


def _load(path, report):
    table = read_csv(path, allow_nonfinite=True)
    bad = table.nonfinite_columns()
    for col in bad:
        report.broken.append((path.name, col))
        report.lines.append(f"- {path.name}: column `{col}` contains non-finite values: **FAIL**")
    return table, not bad


def build_report(run_dir):
    run_dir = Path(run_dir)
    manifest = run_dir / MANIFEST
    if not manifest.is_file():
        raise ReportError(f"no {MANIFEST} in {run_dir}; not a run directory")
    cfg = load_config(manifest)
    header = manifest.read_text().splitlines()[:2]
    rep = Report()
    rep.lines += [f"# Run report: {run_dir}", ""] + [h.lstrip("# ") for h in header] + [""]

    path = run_dir / "velocities.csv"
    if path.is_file():
        rep.lines += ["## Velocity distribution (Fig. 3 analogue)", ""]
        t, ok = _load(path, rep)
        if ok:
            v, c = t.column("v_mps"), t.column("count")
            rep.lines.append(f"- {int(c.sum())} molecules in {len(t)} bins; "
                             f"slowest populated bin at {v[c > 0].min():.1f} m/s")
        rep.lines.append("")

    path = run_dir / "velocity_fit.csv"
    if path.is_file():
        rep.lines += ["## Floating Maxwell-Boltzmann fit (Fig. 3a analogue)", ""]
        t, ok = _load(path, rep)
        if ok:
            d, T = t.column("drift_mps")[0], t.column("T_K")[0]
            rep.verdict("drift", abs(d - cfg.source.drift) <= 1.0,
                        f"{d:.2f} m/s vs {cfg.source.drift:g} +- 1")
            rep.verdict("temperature", abs(T - cfg.source.temperature) <= 10.0,
                        f"{T:.1f} K vs {cfg.source.temperature:g} +- 10")
        rep.lines.append("")

    path = run_dir / "ramp.csv"
    if path.is_file():
        rep.lines += ["## Temperature ramp (Fig. 2b analogue)", ""]
        t, ok = _load(path, rep)
        if ok:
            res = fit_enthalpy(RampSeries(t.column("t_s"), t.column("T_K"), t.column("rate_cps")))
            rep.verdict("Arrhenius slope", abs(res.delta_H - cfg.sublimation.delta_H)
                        <= 0.05 * cfg.sublimation.delta_H,
                        f"{res.delta_H:.1f} +- {res.stderr:.1f} kJ/mol vs generating "
                        f"{cfg.sublimation.delta_H:g}")
        rep.lines.append("")

    path = run_dir / "enthalpy.csv"
    if path.is_file():
        rep.lines += ["## Sublimation enthalpies (Table I analogue)", ""]
        t, ok = _load(path, rep)
        if ok:
            ref = {name: (dh, err) for name, _, dh, err in REFERENCE_ENTHALPIES}
            for name, dh, err in zip(t.column("molecule"), t.column("dH_kJmol"),
                                     t.column("err_kJmol")):
                if name in ref:
                    r, tol = ref[name]
                    rep.verdict(name, abs(dh - r) <= tol,
                                f"{dh:.1f} +- {err:.1f} kJ/mol vs table {r:g} +- {tol:g}")
                else:
                    rep.lines.append(f"- {name}: {dh:.1f} +- {err:.1f} kJ/mol (no reference)")
        rep.lines.append("")

    path = run_dir / "summary.csv"
    if path.is_file():
        rep.lines += ["## Optical focusing (Fig. 4d analogue)", ""]
        t, ok = _load(path, rep)
        if ok:
            for P, dual, hf, g in zip(t.column("power_W"), t.column("dual"),
                                      t.column("hit_fraction"), t.column("gain")):
                if P == 0:
                    rep.lines.append(f"- baseline hit fraction {hf:.4g}")
                    continue
                lo, hi = GAIN_BANDS[bool(dual)]
                kind = "dual field" if dual else "single field"
                rep.verdict(f"forward gain at {P:g} W ({kind})", lo <= g <= hi,
                            f"{g:.2f}, band [{lo:g}, {hi:g}]")
        rep.lines.append("")

    path = run_dir / "cool_summary.csv"
    if path.is_file():
        rep.lines += ["## Cavity cooling (Fig. 5a analogue)", ""]
        t, ok = _load(path, rep)
        if ok:
            ref = cfg.cooling.threshold_power
            for P, ratio, theta in zip(t.column("power_W"), t.column("ke_ratio"),
                                       t.column("late_theta")):
                rel = P / ref
                if rel <= 0.5:
                    rep.verdict(f"{P:g} W (below threshold)", abs(ratio - 1.0) < 0.1,
                                f"KE ratio {ratio:.2f}, expected change < 10%")
                elif rel >= 2.0:
                    rep.verdict(f"{P:g} W (above threshold)", ratio < 0.8,
                                f"KE ratio {ratio:.2f}, expected < 0.8")
                else:
                    rep.lines.append(f"- {P:g} W (near threshold): KE ratio {ratio:.2f}, "
                                     f"order {theta:.2f}")
        rep.lines.append("")

    path = run_dir / "threshold.csv"
    if path.is_file():
        rep.lines += ["## Self-organization threshold", ""]
        t, ok = _load(path, rep)
        if ok:
            P, crossed = t.column("power_W"), t.column("crossed") > 0
            if crossed.any():
                i = int(np.argmax(crossed))
                lo = P[i - 1] if i > 0 else 0.0
                ref = cfg.cooling.threshold_power
                rep.verdict("threshold bracket", lo <= ref <= P[i],
                            f"[{lo:g}, {P[i]:g}] W vs calibrated {ref:g} W")
            else:
                rep.verdict("threshold bracket", False, "threshold above scan range")
        rep.lines.append("")

    if len(rep.lines) <= 4:
        rep.lines.append("No recognised outputs in this directory.")
    if rep.broken:
        rep.lines += ["", "Non-finite data found; this run is not usable."]
    return rep


def write_report(run_dir, name="report.md"):
    rep = build_report(run_dir)
    out = Path(run_dir) / name
    out.write_text(rep.text())
    return rep, out
