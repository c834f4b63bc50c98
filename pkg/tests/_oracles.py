"""Independent numerical oracles used by the tests.

The field-profile oracle integrates the 1-D layered Helmholtz equation
u'' = (beta^2 - k0^2 n^2) u directly with fixed-step RK4, walking backward
from a unit transmitted wave, and shares no code with the production
transfer-matrix solver beyond the interface constants.
"""

import math

import numpy as np

from rydant.cellfield import SPEED_OF_LIGHT, _eta, _kx


def _rk4_step(u, v, w, h):
    k1u, k1v = v, w * u
    u2, v2 = u + 0.5 * h * k1u, v + 0.5 * h * k1v
    k2u, k2v = v2, w * u2
    u3, v3 = u + 0.5 * h * k2u, v + 0.5 * h * k2v
    k3u, k3v = v3, w * u3
    u4, v4 = u + h * k3u, v + h * k3v
    k4u, k4v = v4, w * u4
    return (
        u + h * (k1u + 2 * k2u + 2 * k3u + k4u) / 6.0,
        v + h * (k1v + 2 * k2v + 2 * k3v + k4v) / 6.0,
    )


def rk4_field_profile(geometry, frequency, angle, polarization, samples, steps_per_rad=60.0):
    """Interior |E| profile on linspace(0, inner_length, samples).

    Same reporting convention as the production solver: TE returns |u|,
    TM returns sqrt(beta^2 |u|^2 + |u'|^2) / (k0 |n|^2).
    """
    k0 = 2.0 * math.pi * frequency / SPEED_OF_LIGHT
    beta = k0 * math.sin(angle)
    ns = [1 + 0j, geometry.wall_index, geometry.inner_index, geometry.wall_index, 1 + 0j]
    ds = [0.0, geometry.wall_thickness, geometry.inner_length, geometry.wall_thickness, 0.0]

    kx_out = complex(_kx(ns[4], k0, beta))
    u, v = 1.0 + 0j, 1j * kx_out
    eta_prev = _eta(ns[4], polarization)
    vapor = None
    for j in (3, 2, 1):
        eta_j = _eta(ns[j], polarization)
        v = v * eta_prev / eta_j  # eta * u' is continuous across the interface
        w = beta * beta - (k0 * ns[j]) ** 2
        kmag = abs(complex(_kx(ns[j], k0, beta)))
        if j == 2:
            xs = np.linspace(0.0, ds[j], samples)
            us = np.empty(samples, dtype=complex)
            vs = np.empty(samples, dtype=complex)
            us[-1], vs[-1] = u, v
            for seg in range(samples - 1, 0, -1):
                seg_len = xs[seg] - xs[seg - 1]
                m = max(1, math.ceil(kmag * seg_len * steps_per_rad))
                h = -seg_len / m
                uu, vv = us[seg], vs[seg]
                for _ in range(m):
                    uu, vv = _rk4_step(uu, vv, w, h)
                us[seg - 1], vs[seg - 1] = uu, vv
            u, v = us[0], vs[0]
            vapor = (xs, us, vs)
        else:
            m = max(2, math.ceil(kmag * ds[j] * steps_per_rad))
            h = -ds[j] / m
            for _ in range(m):
                u, v = _rk4_step(u, v, w, h)
        eta_prev = eta_j

    v0 = v * eta_prev / _eta(ns[0], polarization)
    kx0 = complex(_kx(ns[0], k0, beta))
    incident = 0.5 * (u + v0 / (1j * kx0))

    xs, us, vs = vapor
    us = us / incident
    vs = vs / incident
    if polarization == "TE":
        amp = np.abs(us)
    else:
        n2 = abs(geometry.inner_index) ** 2
        amp = np.sqrt(beta**2 * np.abs(us) ** 2 + np.abs(vs) ** 2) / (k0 * n2)
    return xs, amp


def random_cell_case(rng):
    """One random (geometry, frequency, angle, polarization) tuple."""
    from rydant.cellfield import CellGeometry

    geometry = CellGeometry(
        wall_thickness=float(rng.uniform(0.5e-3, 3e-3)),
        inner_length=float(rng.uniform(5e-3, 25e-3)),
        wall_index=complex(rng.uniform(1.2, 3.0), rng.uniform(0.0, 0.05)),
    )
    frequency = float(rng.uniform(0.05e12, 0.2e12))
    angle = float(rng.uniform(0.0, 1.3))
    polarization = "TE" if rng.integers(2) else "TM"
    return geometry, frequency, angle, polarization
