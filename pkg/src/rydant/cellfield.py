"""Standing-wave field structure inside a dielectric vapor cell, in 1-D.

The cell is modeled as a five-layer stack along the propagation axis:
vacuum | wall | vapor | wall | vacuum.  A monochromatic plane wave hits the
stack at an incidence angle in [0, pi/2); the transverse wavevector
beta = k0*sin(angle) is conserved and each layer carries forward/backward
waves with normal wavevector kx = sqrt(k0^2 n^2 - beta^2) (principal
branch).  Interfaces match the scalar field u and eta * du/dx, where
eta = 1 for TE (u is the transverse E field) and eta = 1/n^2 for TM
(u is the transverse H field).

Reported amplitudes are |E| relative to the incident wave: for TE that is
|u| directly; for TM it is sqrt(beta^2 |u|^2 + |u'|^2) / (k0 |n|^2), which
makes TE and TM agree exactly at normal incidence.

The wall index default used elsewhere in the package (2.1 + 0.02i) is a
borosilicate-like stand-in, not a measured value; treat it as a knob.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

# Trapezoid averaging wants at least this many samples per in-vapor wavelength.
SAMPLES_PER_WAVELENGTH = 32
_MIN_SWEEP_SAMPLES = 513

POLARIZATIONS = ("TE", "TM")


@dataclass(frozen=True)
class CellGeometry:
    """Wall/interior thicknesses in meters and complex refractive indices."""

    wall_thickness: float
    inner_length: float
    wall_index: complex = 2.1 + 0.02j
    inner_index: complex = 1.0 + 0.0j

    def __post_init__(self):
        if not (math.isfinite(self.wall_thickness) and self.wall_thickness > 0):
            raise ValueError(f"wall_thickness must be > 0, got {self.wall_thickness}")
        if not (math.isfinite(self.inner_length) and self.inner_length > 0):
            raise ValueError(f"inner_length must be > 0, got {self.inner_length}")
        for name in ("wall_index", "inner_index"):
            n = complex(getattr(self, name))
            if n.real < 1.0:
                raise ValueError(f"{name} must have real part >= 1, got {n}")
            object.__setattr__(self, name, n)


@dataclass(frozen=True)
class FieldProfile:
    """|E| (relative to the incident amplitude) across the cell interior."""

    positions: np.ndarray
    amplitude: np.ndarray
    incidence_angle: float
    frequency: float

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        amp = np.array(self.amplitude, dtype=float)
        if pos.ndim != 1 or pos.size < 2:
            raise ValueError("positions must be a 1-D array with >= 2 samples")
        if np.any(np.diff(pos) <= 0):
            raise ValueError("positions must be strictly increasing")
        if amp.shape != pos.shape:
            raise ValueError("amplitude and positions must have equal length")
        if np.any(amp < 0):
            raise ValueError("amplitudes must be >= 0")
        pos.flags.writeable = False
        amp.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "amplitude", amp)


def _eta(n: complex, polarization: str) -> complex:
    return 1.0 if polarization == "TE" else 1.0 / (n * n)


def _kx(n: complex, k0: float, beta: float) -> complex:
    return np.sqrt(complex((k0 * n) ** 2 - beta**2))


def _stack_amplitudes(
    ns: list[complex],
    ds: list[float],
    k0: float,
    beta: float,
    polarization: str,
):
    """Forward/backward amplitudes per layer for a unit incident wave.

    ns and ds are aligned; the first and last entries are semi-infinite and
    their thickness is ignored.  Amplitudes are referenced to each layer's
    left edge.  Returns (amplitudes, r, t).
    """
    count = len(ns)
    kxs = [_kx(n, k0, beta) for n in ns]
    qs = [_eta(n, polarization) * kx for n, kx in zip(ns, kxs)]
    if abs(qs[0]) == 0:
        raise ValueError("grazing incidence: no propagating incident wave")

    # Walk backward from a unit transmitted wave, then rescale so the
    # incident amplitude is exactly 1.
    amps = [None] * count
    amps[count - 1] = (1.0 + 0.0j, 0.0 + 0.0j)
    for j in range(count - 2, -1, -1):
        a_next, b_next = amps[j + 1]
        total = a_next + b_next
        diff = (qs[j + 1] / qs[j]) * (a_next - b_next)
        right_a = 0.5 * (total + diff)
        right_b = 0.5 * (total - diff)
        if j == 0:
            amps[j] = (right_a, right_b)
        else:
            phase = np.exp(1j * kxs[j] * ds[j])
            amps[j] = (right_a / phase, right_b * phase)

    incident = amps[0][0]
    if abs(incident) == 0:
        raise ValueError("degenerate stack: vanishing incident amplitude")
    scaled = [(a / incident, b / incident) for a, b in amps]
    r = scaled[0][1]
    t = scaled[-1][0]
    return scaled, r, t


def transfer_matrix_field(
    geometry: CellGeometry,
    frequency: float,
    angle: float,
    polarization: str = "TE",
    samples: int = _MIN_SWEEP_SAMPLES,
) -> FieldProfile:
    """Field magnitude across the cell interior for one incidence.

    Parameters
    ----------
    geometry : CellGeometry
    frequency : carrier frequency in Hz, > 0.
    angle : incidence angle in radians, 0 <= angle < pi/2.
    polarization : "TE" or "TM".
    samples : number of interior sample points, >= 2.
    """
    if not (math.isfinite(frequency) and frequency > 0):
        raise ValueError(f"frequency must be > 0, got {frequency}")
    if not (0.0 <= angle < math.pi / 2):
        raise ValueError(f"angle must lie in [0, pi/2), got {angle}")
    if polarization not in POLARIZATIONS:
        raise ValueError(f"polarization must be one of {POLARIZATIONS}, got {polarization!r}")
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")

    k0 = 2.0 * math.pi * frequency / SPEED_OF_LIGHT
    beta = k0 * math.sin(angle)
    ns = [1.0 + 0j, geometry.wall_index, geometry.inner_index, geometry.wall_index, 1.0 + 0j]
    ds = [0.0, geometry.wall_thickness, geometry.inner_length, geometry.wall_thickness, 0.0]
    amps, _, _ = _stack_amplitudes(ns, ds, k0, beta, polarization)

    a, b = amps[2]
    kx = _kx(geometry.inner_index, k0, beta)
    x = np.linspace(0.0, geometry.inner_length, samples)
    forward = a * np.exp(1j * kx * x)
    backward = b * np.exp(-1j * kx * x)
    u = forward + backward
    if polarization == "TE":
        amplitude = np.abs(u)
    else:
        du = 1j * kx * (forward - backward)
        n2 = abs(geometry.inner_index) ** 2
        amplitude = np.sqrt(beta**2 * np.abs(u) ** 2 + np.abs(du) ** 2) / (k0 * n2)
    return FieldProfile(x, amplitude, angle, frequency)


def path_average(profile: FieldProfile) -> float:
    """Trapezoidal mean of the amplitude along the interior path."""
    span = profile.positions[-1] - profile.positions[0]
    return float(np.trapezoid(profile.amplitude, profile.positions) / span)


def _sweep_samples(geometry: CellGeometry, frequency: float) -> int:
    wavelength = SPEED_OF_LIGHT / frequency / geometry.inner_index.real
    needed = int(SAMPLES_PER_WAVELENGTH * geometry.inner_length / wavelength) + 2
    return max(_MIN_SWEEP_SAMPLES, needed)


def angle_sweep_deviation(
    geometry: CellGeometry,
    frequency: float,
    angles,
    polarization: str = "TE",
) -> float:
    """Spread (max - min, dB) of the path-averaged field over incidence angles.

    Same metric as metrology.isotropic_deviation: each path average is
    referenced to the largest one via 20*log10.
    """
    angle_list = [float(a) for a in angles]
    if not angle_list:
        raise ValueError("angles must be non-empty")
    samples = _sweep_samples(geometry, frequency)
    averages = [
        path_average(transfer_matrix_field(geometry, frequency, a, polarization, samples))
        for a in angle_list
    ]
    if min(averages) <= 0:
        raise ValueError("path average vanished; gain undefined in dB")
    top = max(averages)
    gains = [20.0 * math.log10(avg / top) for avg in averages]
    return max(gains) - min(gains)


def write_profile_csv(profile: FieldProfile, path) -> None:
    lines = ["position_m,amplitude_rel"]
    for x, a in zip(profile.positions, profile.amplitude):
        lines.append(f"{x:.9g},{a:.9g}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sweep_csv(angles_deg, averages, path) -> None:
    """Angle sweep rows: angle_deg, path_avg_rel, gain_db (0 dB at the max)."""
    top = max(averages)
    lines = ["angle_deg,path_avg_rel,gain_db"]
    for ang, avg in zip(angles_deg, averages):
        gain = 20.0 * math.log10(avg / top)
        lines.append(f"{ang:.9g},{avg:.9g},{gain:.9g}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
