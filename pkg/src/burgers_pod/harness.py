"""Case presets and the simulate -> POD -> ROM -> compare pipeline."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import csvio, linalg
from .discretization import ConvectionScheme
from .fdsolver import BlowUpError, SimConfig, SnapshotMatrix, initial_field, simulate, source_field
from .pod import EnergyConvention, EnergySpectrum, energy_spectrum, truncate
from .rom import assemble, integrate, project_initial, reconstruct

log = logging.getLogger(__name__)

TIMING_COLUMNS = ("t_sim", "t_rom", "t_ratio")
SUMMARY_HEADER = [
    "case",
    "i",
    "max_pct_error",
    "mean_pct_error",
    "t_sim",
    "t_rom",
    "t_ratio",
    "captured_energy",
]

# Reference t_ROM / t_Sim ratios from single published runs, keyed by (case, modes).
REFERENCE_T_RATIO = {
    (1, 1): 0.76,
    (1, 5): 1.03,
    (2, 1): 0.076,
    (2, 5): 0.15,
    (3, 1): 0.57,
    (3, 5): 1.12,
    (4, 20): 0.31,
    (4, 33): 0.42,
    (6, 5): 0.12,
    (6, 10): 0.2,
}


class ConfigError(ValueError):
    pass


class NormalizationError(ValueError):
    pass


@dataclass(frozen=True)
class CaseSpec:
    id: int
    config: SimConfig
    mode_counts: tuple
    # mode counts evaluated only for the timing table
    timing_modes: tuple = ()
    rom_method: str = "lsoda"


def _preset(case_id, t_final, nu, scheme, modes, timing_modes=()):
    cfg = SimConfig(
        m=32, t_final=t_final, cfl=0.2, nu=nu, u0_amp=0.01, q0_amp=0.1, scheme=scheme
    )
    return CaseSpec(case_id, cfg, tuple(modes), tuple(timing_modes))


PRESETS = {
    1: _preset(1, 0.5, 0.01, ConvectionScheme.UPWIND2, (1, 5)),
    2: _preset(2, 5.0, 0.01, ConvectionScheme.UPWIND2, (1, 5)),
    3: _preset(3, 0.5, 0.0001, ConvectionScheme.UPWIND2, (1, 5)),
    4: _preset(4, 15.0, 0.0001, ConvectionScheme.UPWIND2, (5, 30), timing_modes=(20, 33)),
    5: _preset(5, 50.0, 0.00001, ConvectionScheme.NONE, (1, 3)),
    6: _preset(6, 15.0, 0.0001, ConvectionScheme.UPWIND1, (5, 10)),
}


def case_spec(case_id: int) -> CaseSpec:
    try:
        return PRESETS[int(case_id)]
    except (KeyError, ValueError):
        raise ConfigError(f"unknown case {case_id!r}; presets are 1-6") from None


def with_overrides(spec: CaseSpec, modes=None, stride=None, **config_overrides) -> CaseSpec:
    cfg = spec.config
    if stride is not None:
        config_overrides["snapshot_stride"] = stride
    if config_overrides:
        cfg = replace(cfg, **config_overrides)
    return replace(spec, config=cfg, mode_counts=tuple(modes) if modes else spec.mode_counts)


_CONFIG_KEYS = {
    "m": int,
    "t_final": float,
    "cfl": float,
    "nu": float,
    "u0_amp": float,
    "q0_amp": float,
    "scheme": ConvectionScheme.parse,
    "snapshot_stride": int,
    "u_ref": float,
}


def parse_modes(text) -> tuple:
    try:
        modes = tuple(int(tok) for tok in str(text).split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"modes must be a comma separated list of integers, got {text!r}")
    if not modes or any(i < 1 for i in modes):
        raise ConfigError(f"modes must be positive integers, got {text!r}")
    return modes


def parse_config(text: str, case_id: int = 0) -> CaseSpec:
    """Build a case from flat ``key=value`` lines; ``#`` starts a comment."""
    values, modes, method = {}, (1, 5), "lsoda"
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "modes":
            modes = parse_modes(value)
        elif key == "integrator":
            method = value.lower()
        elif key in _CONFIG_KEYS:
            try:
                values[key] = _CONFIG_KEYS[key](value)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    try:
        cfg = SimConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return CaseSpec(case_id, cfg, modes, rom_method=method)


def load_config(path) -> CaseSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def percent_error(u_rom: SnapshotMatrix, u_sim: SnapshotMatrix) -> np.ndarray:
    """Pointwise ROM error in percent of the largest ``|u_sim|`` over space and time."""
    rom = getattr(u_rom, "data", u_rom)
    sim = getattr(u_sim, "data", u_sim)
    if np.shape(rom) != np.shape(sim):
        raise ValueError(f"shape mismatch: {np.shape(rom)} vs {np.shape(sim)}")
    t_rom, t_sim = getattr(u_rom, "times", None), getattr(u_sim, "times", None)
    if t_rom is not None and t_sim is not None and not np.array_equal(t_rom, t_sim):
        raise ValueError("snapshot times differ")
    scale = np.max(np.abs(sim))
    if scale == 0.0:
        raise NormalizationError("reference solution is identically zero")
    return 100.0 * (np.asarray(rom) - np.asarray(sim)) / scale


def time_averaged_l2(u_rom, u_sim) -> float:
    """Mean over snapshots of the spatial 2-norm of the ROM error."""
    diff = np.asarray(getattr(u_rom, "data", u_rom)) - np.asarray(getattr(u_sim, "data", u_sim))
    return float(np.mean(np.linalg.norm(diff, axis=0)))


@dataclass
class ModeRecord:
    i: int
    max_pct_error: float = math.nan
    mean_pct_error: float = math.nan
    t_sim: float = math.nan
    t_rom: float = math.nan
    t_ratio: float = math.nan
    captured_energy: float = math.nan
    l2_error: float = math.nan
    status: str = "ok"
    error: np.ndarray | None = field(default=None, repr=False)
    rom: SnapshotMatrix | None = field(default=None, repr=False)

    @property
    def failed(self):
        return self.status != "ok"

    def summary_row(self, case_id):
        return [
            case_id,
            self.i,
            self.max_pct_error,
            self.mean_pct_error,
            self.t_sim,
            self.t_rom,
            self.t_ratio,
            self.captured_energy,
        ]


@dataclass
class ComparisonReport:
    case_id: int
    records: list
    spectrum: EnergySpectrum
    sigma: np.ndarray
    snapshots: SnapshotMatrix
    t_sim: float
    dt: float
    files: dict = field(default_factory=dict)

    def record(self, i) -> ModeRecord:
        for rec in self.records:
            if rec.i == i:
                return rec
        raise KeyError(i)

    @property
    def failed(self):
        return any(r.failed for r in self.records)


def evaluate_modes(spec, sim, factors, i, repeats=3) -> ModeRecord:
    cfg = spec.config
    snaps = sim.snapshots
    rec = ModeRecord(i=i, t_sim=sim.wall_time)
    try:
        basis = truncate(factors, i)
    except ValueError as exc:
        rec.status = f"invalid: {exc}"
        return rec
    rec.captured_energy = basis.captured_energy
    ops = assemble(basis, snaps.grid, cfg.nu, source_field(snaps.grid, cfg.q0_amp), cfg.scheme)
    a0 = project_initial(basis, initial_field(snaps.grid, cfg.u0_amp))
    try:
        traj = integrate(
            ops, a0, snaps.times, dt=sim.dt, method=spec.rom_method, repeats=repeats
        )
    except BlowUpError as exc:
        log.warning("case %s, i=%d: %s", spec.id, i, exc)
        rec.status = "blow-up"
        return rec
    rom = reconstruct(basis, traj, snaps.grid)
    err = percent_error(rom, snaps)
    rec.rom, rec.error = rom, err
    rec.max_pct_error = float(np.max(np.abs(err)))
    rec.mean_pct_error = float(np.mean(np.abs(err)))
    rec.l2_error = time_averaged_l2(rom, snaps)
    rec.t_rom = traj.wall_time
    rec.t_ratio = traj.wall_time / sim.wall_time
    return rec


def run_case(spec: CaseSpec, out_dir=None, repeats: int = 3, extra_modes=()) -> ComparisonReport:
    """Run one case end to end; with ``out_dir`` set, write its CSV files there.

    A blow-up of the full-order run propagates. A ROM blow-up marks that mode
    count's record and the remaining mode counts still run.
    """
    sim = simulate(spec.config, repeats=repeats)
    snaps = sim.snapshots
    factors = linalg.svd(snaps.data)
    spectrum = energy_spectrum(factors.sigma, EnergyConvention.SIGMA_SQUARED)

    records = [evaluate_modes(spec, sim, factors, i, repeats) for i in spec.mode_counts]
    records += [
        evaluate_modes(spec, sim, factors, i, repeats)
        for i in extra_modes
        if i not in spec.mode_counts
    ]
    report = ComparisonReport(
        spec.id, records, spectrum, factors.sigma, snaps, sim.wall_time, sim.dt
    )
    if out_dir is not None:
        write_case(report, out_dir)
    return report


def write_case(report: ComparisonReport, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    snaps = report.snapshots
    x = snaps.grid.x
    files = {"snapshots_sim": csvio.write_field(out / "snapshots_sim.csv", x, snaps.times, snaps.data)}
    lin = energy_spectrum(report.sigma, EnergyConvention.SIGMA_LINEAR)
    files["energy"] = csvio.write_energy(
        out / "energy.csv", report.sigma, report.spectrum.r, lin.r, report.spectrum.cumulative
    )
    for rec in report.records:
        if rec.rom is None:
            continue
        files[f"snapshots_rom_i{rec.i}"] = csvio.write_field(
            out / f"snapshots_rom_i{rec.i}.csv", x, snaps.times, rec.rom.data
        )
        files[f"error_i{rec.i}"] = csvio.write_field(
            out / f"error_i{rec.i}.csv", x, snaps.times, rec.error
        )
    files["summary"] = csvio.write_rows(
        out / "summary.csv", SUMMARY_HEADER, (r.summary_row(report.case_id) for r in report.records)
    )
    report.files = {k: str(v) for k, v in files.items()}
    return report.files


def run_all(out_dir, repeats: int = 3, cases=None) -> list:
    """Run the presets into ``out_dir/case<k>`` and write the two summary tables.

    ``summary.csv`` has one row per preset (case, i) pair; ``timing.csv`` sets
    the measured timing ratios beside the reference ones.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports = []
    for case_id in cases or sorted(PRESETS):
        spec = PRESETS[case_id]
        log.info("running case %d", case_id)
        reports.append(
            run_case(spec, out / f"case{case_id}", repeats=repeats, extra_modes=spec.timing_modes)
        )

    rows = []
    for rep in reports:
        spec = PRESETS[rep.case_id]
        rows += [rep.record(i).summary_row(rep.case_id) for i in spec.mode_counts]
    csvio.write_rows(out / "summary.csv", SUMMARY_HEADER, rows)

    table = []
    for rep in reports:
        spec = PRESETS[rep.case_id]
        for i in spec.timing_modes or spec.mode_counts:
            rec = rep.record(i)
            ref = REFERENCE_T_RATIO.get((rep.case_id, i))
            if ref is None:
                note = "no reference value"
            elif rec.failed:
                note = rec.status
            else:
                note = ""
            table.append([rep.case_id, i, rec.t_ratio, math.nan if ref is None else ref, note])
    csvio.write_rows(out / "timing.csv", ["case", "i", "t_ratio", "reference_t_ratio", "note"], table)
    return reports
