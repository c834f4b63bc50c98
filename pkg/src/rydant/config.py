"""Strict JSON run configuration.

Every numeric key carries its unit in its name (rabi_mhz, wall_thickness_mm,
rf_frequency_ghz...).  Unknown keys are rejected, as are missing required
keys and type mismatches; all such problems raise ConfigError, which the
CLI maps to exit code 2.  Frequencies given in MHz/GHz convert to angular
frequencies (rad/s) on load.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .angular import AngularMomentum
from .cellfield import CellGeometry
from .hamiltonian import RfDrive, TransitionSystem
from .spectra import GAMMA_E_DEFAULT, GAMMA_R_DEFAULT, LadderConfig

SCHEMA_VERSION = 1

MHZ = 2.0 * math.pi * 1e6  # MHz -> rad/s


class ConfigError(Exception):
    """Malformed configuration (schema, key, or type problem)."""


@dataclass(frozen=True)
class ScanSection:
    low: float  # rad/s
    high: float
    points: int


@dataclass(frozen=True)
class SweepSection:
    plane: str
    angles: np.ndarray  # radians
    readout: str
    use_cell: bool
    noise_sigma_db: float


@dataclass(frozen=True)
class OutputSection:
    directory: str
    basename: str


@dataclass(frozen=True)
class RunConfig:
    seed: int
    system: TransitionSystem | None
    drive: RfDrive | None
    ladder: LadderConfig | None
    scan: ScanSection | None
    cell: CellGeometry | None
    cell_frequency: float | None  # Hz
    sweep: SweepSection | None
    output: OutputSection

    def require(self, name: str):
        value = getattr(self, name)
        if value is None:
            raise ConfigError(f"configuration section {name!r} is required for this command")
        return value


def _check_keys(section: dict, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    missing = required - set(section)
    if missing:
        raise ConfigError(f"missing required key(s) in {where}: {', '.join(sorted(missing))}")


def _number(section: dict, key: str, where: str, default=None) -> float:
    if key not in section:
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def _integer(section: dict, key: str, where: str, default=None) -> int:
    if key not in section:
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{key} must be an integer, got {value!r}")
    return value


def parse_angles_deg(spec, where: str) -> np.ndarray:
    """Angle grid in degrees: either an explicit list or "start:step:stop".

    The string form follows range semantics: stop is exclusive, so
    "0:10:90" yields 0, 10, ..., 80.
    """
    if isinstance(spec, str):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{where}: expected 'start:step:stop', got {spec!r}")
        try:
            start, step, stop = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"{where}: non-numeric angle range {spec!r}") from exc
        if step <= 0 or stop <= start:
            raise ConfigError(f"{where}: need step > 0 and stop > start, got {spec!r}")
        count = int(math.ceil((stop - start) / step - 1e-12))
        values = start + step * np.arange(count)
    elif isinstance(spec, list):
        if not spec:
            raise ConfigError(f"{where}: angle list is empty")
        for v in spec:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"{where}: angles must be numbers, got {v!r}")
        values = np.array(spec, dtype=float)
    else:
        raise ConfigError(f"{where} must be a list of degrees or a 'start:step:stop' string")
    return np.radians(values)


def _parse_system(section: dict) -> TransitionSystem:
    where = "system"
    _check_keys(
        section,
        {"two_jg", "two_je", "mu_mhz_per_v_per_m"},
        {"two_jg", "two_je", "mu_mhz_per_v_per_m"},
        where,
    )
    two_jg = _integer(section, "two_jg", where)
    two_je = _integer(section, "two_je", where)
    mu = _number(section, "mu_mhz_per_v_per_m", where)
    try:
        return TransitionSystem(AngularMomentum(two_jg), AngularMomentum(two_je), mu * MHZ)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_drive(section: dict) -> RfDrive:
    where = "drive"
    _check_keys(section, {"rabi_mhz", "detuning_mhz"}, {"rabi_mhz"}, where)
    rabi = _number(section, "rabi_mhz", where)
    detuning = _number(section, "detuning_mhz", where, 0.0)
    try:
        return RfDrive(rabi * MHZ, detuning * MHZ)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_ladder(section: dict, drive: RfDrive | None) -> LadderConfig:
    where = "ladder"
    allowed = {
        "probe_rabi_mhz",
        "coupling_rabi_mhz",
        "probe_detuning_mhz",
        "gamma_e_mhz",
        "gamma_r_mhz",
        "doppler_sigma_mhz",
    }
    _check_keys(section, allowed, {"probe_rabi_mhz", "coupling_rabi_mhz"}, where)
    if drive is None:
        raise ConfigError("ladder section requires a drive section (RF Rabi/detuning)")
    try:
        return LadderConfig(
            omega_p=_number(section, "probe_rabi_mhz", where) * MHZ,
            omega_c=_number(section, "coupling_rabi_mhz", where) * MHZ,
            omega_rf=drive.rabi,
            delta_p=_number(section, "probe_detuning_mhz", where, 0.0) * MHZ,
            delta_rf=drive.detuning,
            gamma_e=_number(section, "gamma_e_mhz", where, GAMMA_E_DEFAULT / MHZ) * MHZ,
            gamma_r=_number(section, "gamma_r_mhz", where, GAMMA_R_DEFAULT / MHZ) * MHZ,
            doppler_sigma=_number(section, "doppler_sigma_mhz", where, 0.0) * MHZ,
        )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_scan(section: dict) -> ScanSection:
    where = "scan"
    _check_keys(section, {"min_mhz", "max_mhz", "points"}, {"min_mhz", "max_mhz", "points"}, where)
    low = _number(section, "min_mhz", where) * MHZ
    high = _number(section, "max_mhz", where) * MHZ
    points = _integer(section, "points", where)
    if high <= low:
        raise ConfigError(f"{where}: max_mhz must exceed min_mhz")
    if points < 3:
        raise ConfigError(f"{where}: points must be >= 3, got {points}")
    return ScanSection(low, high, points)


def _parse_cell(section: dict) -> tuple[CellGeometry, float]:
    where = "cell"
    allowed = {
        "wall_thickness_mm",
        "inner_length_mm",
        "wall_index_re",
        "wall_index_im",
        "inner_index_re",
        "inner_index_im",
        "rf_frequency_ghz",
    }
    _check_keys(section, allowed, {"wall_thickness_mm", "inner_length_mm", "rf_frequency_ghz"}, where)
    try:
        geometry = CellGeometry(
            wall_thickness=_number(section, "wall_thickness_mm", where) * 1e-3,
            inner_length=_number(section, "inner_length_mm", where) * 1e-3,
            wall_index=complex(
                _number(section, "wall_index_re", where, 2.1),
                _number(section, "wall_index_im", where, 0.02),
            ),
            inner_index=complex(
                _number(section, "inner_index_re", where, 1.0),
                _number(section, "inner_index_im", where, 0.0),
            ),
        )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    frequency = _number(section, "rf_frequency_ghz", where) * 1e9
    if frequency <= 0:
        raise ConfigError(f"{where}: rf_frequency_ghz must be > 0")
    return geometry, frequency


def _parse_sweep(section: dict) -> SweepSection:
    where = "sweep"
    allowed = {"plane", "angles_deg", "readout", "use_cell", "noise_sigma_db"}
    _check_keys(section, allowed, {"plane", "angles_deg"}, where)
    plane = section["plane"]
    if plane not in ("XY", "XZ", "YZ"):
        raise ConfigError(f"{where}.plane must be XY, XZ or YZ, got {plane!r}")
    readout = section.get("readout", "eigen")
    if readout not in ("eigen", "spectrum"):
        raise ConfigError(f"{where}.readout must be 'eigen' or 'spectrum', got {readout!r}")
    use_cell = section.get("use_cell", False)
    if not isinstance(use_cell, bool):
        raise ConfigError(f"{where}.use_cell must be a boolean")
    noise = _number(section, "noise_sigma_db", where, 0.0)
    if noise < 0:
        raise ConfigError(f"{where}.noise_sigma_db must be >= 0")
    return SweepSection(
        plane=plane,
        angles=parse_angles_deg(section["angles_deg"], f"{where}.angles_deg"),
        readout=readout,
        use_cell=use_cell,
        noise_sigma_db=noise,
    )


def _parse_output(section: dict) -> OutputSection:
    where = "output"
    _check_keys(section, {"directory", "basename"}, set(), where)
    directory = section.get("directory", ".")
    basename = section.get("basename", "rydant")
    for name, value in (("directory", directory), ("basename", basename)):
        if not isinstance(value, str) or not value:
            raise ConfigError(f"{where}.{name} must be a non-empty string")
    return OutputSection(directory, basename)


def parse_config(payload: dict) -> RunConfig:
    allowed = {"schema_version", "seed", "system", "drive", "ladder", "scan", "cell", "sweep", "output"}
    _check_keys(payload, allowed, {"schema_version"}, "configuration")
    version = payload["schema_version"]
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}; this build reads {SCHEMA_VERSION}")
    seed = _integer(payload, "seed", "configuration", 0)

    drive = _parse_drive(payload["drive"]) if "drive" in payload else None
    cell, cell_frequency = (None, None)
    if "cell" in payload:
        cell, cell_frequency = _parse_cell(payload["cell"])
    return RunConfig(
        seed=seed,
        system=_parse_system(payload["system"]) if "system" in payload else None,
        drive=drive,
        ladder=_parse_ladder(payload["ladder"], drive) if "ladder" in payload else None,
        scan=_parse_scan(payload["scan"]) if "scan" in payload else None,
        cell=cell,
        cell_frequency=cell_frequency,
        sweep=_parse_sweep(payload["sweep"]) if "sweep" in payload else None,
        output=_parse_output(payload.get("output", {})),
    )


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("top-level configuration must be a JSON object")
    return parse_config(payload)
