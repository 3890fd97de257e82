"""Deterministic data sets behind the standard family portraits.

Six canned configurations: the two separated-system potential curves, the
full q = 1 orbit family portrait with the primary-colliding pair, the
two-orbit bundles through the reference off-axis centre for q = 1 and
q = 2, and the enlargement of the q = 2 bundle around its
self-intersections.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arcs import initial_velocities, resonant_params
from .dynamics import Params, integrate
from .errors import DomainError
from .geometry import EllipticPoint
from .periods import solve_resonant_a1, turning_point_xi

__all__ = ["OrbitTrack", "xi_potential_curve", "phi_potential_curve",
           "orbit_family_portrait", "orbit_bundle_through",
           "polyline_self_intersections"]


@dataclass
class OrbitTrack:
    name: str
    taus: np.ndarray
    states: np.ndarray  # (n, 4) elliptic
    x: np.ndarray
    y: np.ndarray
    colliding: bool


def xi_potential_curve(a: float = 1.0, energy: float = -0.5,
                       xi_range: float = 3.0, n: int = 1201):
    """Effective xi potential -2a cosh(xi) + |E| cosh(xi)^2 and its minima.

    For |E| < a the curve is a double well with minima at cosh(xi) = a/|E|
    and a local maximum at xi = 0.
    """
    if energy >= 0.0:
        raise DomainError("the double-well shape requires energy < 0")
    xi = np.linspace(-xi_range, xi_range, n)
    pot = -2.0 * a * np.cosh(xi) + abs(energy) * np.cosh(xi) ** 2
    meta = {}
    if abs(energy) < a:
        xi_m = math.acosh(a / abs(energy))
        meta["minima_xi"] = [-xi_m, xi_m]
        meta["cosh_minima"] = a / abs(energy)
        meta["value_at_minima"] = -a * a / abs(energy)
        meta["local_max_value"] = abs(energy) - 2.0 * a
    return xi, pot, meta


def phi_potential_curve(a: float = 1.0, energy: float = -0.5, n: int = 1201):
    """Pendulum-type phi potential -|E| cos(phi)^2 over one revolution."""
    if energy >= 0.0:
        raise DomainError("energy must be negative")
    phi = np.linspace(0.0, 2.0 * math.pi, n)
    pot = -abs(energy) * np.cos(phi) ** 2
    meta = {"minima_phi": [0.0, math.pi], "minimum_value": -abs(energy)}
    return phi, pot, meta


def _orbit_track(prm: Params, y0, t_span: float, name: str, colliding: bool,
                 n_samples: int = 2000, tol: float = 1e-11) -> OrbitTrack:
    traj = integrate(np.asarray(y0, float), prm, t_span, tol=tol)
    taus, states = traj.dense_grid(n_samples)
    x = np.cosh(states[:, 0]) * np.cos(states[:, 1])
    y = np.sinh(states[:, 0]) * np.sin(states[:, 1])
    return OrbitTrack(name=name, taus=taus, states=states, x=x, y=y,
                      colliding=colliding)


def orbit_family_portrait(beta: float = 1.0 / 7.0, q=1, a: float = 1.0,
                          n_orbits: int = 18) -> list[OrbitTrack]:
    """n_orbits distinct periodic orbits of one class plus the colliding pair.

    Orbits are parametrized by the phi phase at an upward xi = 0 crossing;
    phases in (0, pi) give distinct curves (a phase shift by pi retraces
    the same curve).  The two orbits seeded exactly at a primary are the
    colliding pair.
    """
    q = Fraction(q)
    sol = solve_resonant_a1(beta, q, a)
    t_span = sol.full_period
    tracks = []
    for k in range(n_orbits):
        phi_k = (k + 0.5) * math.pi / n_orbits
        centre = EllipticPoint(0.0, phi_k)
        vxi, vphi = initial_velocities(centre, beta, sol.a1_hat, a)
        prm = Params(a=a, beta=beta, a1=sol.a1_hat, q=q)
        y0 = (0.0, phi_k, vxi, vphi)
        tracks.append(_orbit_track(prm, y0, t_span, f"orbit_{k:02d}", False))
    prim = EllipticPoint(0.0, 0.0)
    vxi, vphi = initial_velocities(prim, beta, sol.a1_hat, a)
    prm = Params(a=a, beta=beta, a1=sol.a1_hat, q=q)
    for label, sign in (("colliding_0", 1), ("colliding_1", -1)):
        y0 = (0.0, 0.0, sign * vxi, vphi)
        tracks.append(_orbit_track(prm, y0, t_span, label, True))
    return tracks


def orbit_bundle_through(centre_frac: float = 2.0 / 3.0, q=1,
                         beta: float = 1.0 / 7.0, a: float = 1.0,
                         phi0: float = 0.0) -> list[OrbitTrack]:
    """The two transverse periodic orbits through (centre_frac*xi_plus, phi0)."""
    q = Fraction(q)
    sol = solve_resonant_a1(beta, q, a)
    xi_plus = turning_point_xi(beta, sol.a1_hat)
    centre = EllipticPoint(centre_frac * xi_plus, phi0)
    prm, _ = resonant_params(centre, q, beta, a)
    vxi, vphi = initial_velocities(centre, beta, sol.a1_hat, a)
    t_span = sol.full_period
    tracks = []
    for label, sign in (("orbit_pos", 1), ("orbit_neg", -1)):
        y0 = (centre.xi, centre.phi, sign * vxi, vphi)
        tracks.append(_orbit_track(prm, y0, t_span, label, False,
                                   n_samples=4000))
    return tracks


def polyline_self_intersections(x: np.ndarray, y: np.ndarray,
                                skip_adjacent: int = 2) -> list[tuple[float, float]]:
    """Transverse self-crossings of one polyline (approximate, from samples).

    Solves the 2x2 segment-pair intersection for all non-adjacent pairs,
    chunked over the first index.  Crossing points closer than the local
    sample spacing are merged.
    """
    px = np.column_stack([x[:-1], y[:-1]])
    d = np.column_stack([np.diff(x), np.diff(y)])
    n = len(px)
    found = []
    chunk = 128
    for i0 in range(0, n, chunk):
        i1 = min(i0 + chunk, n)
        pi = px[i0:i1, None, :]
        di = d[i0:i1, None, :]
        pj = px[None, :, :]
        dj = d[None, :, :]
        rhs = pj - pi
        det = di[..., 0] * (-dj[..., 1]) - di[..., 1] * (-dj[..., 0])
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (rhs[..., 0] * (-dj[..., 1]) - rhs[..., 1] * (-dj[..., 0])) / det
            s = (di[..., 0] * rhs[..., 1] - di[..., 1] * rhs[..., 0]) / det
        hit = (np.abs(det) > 1e-14) & (t >= 0.0) & (t <= 1.0) \
            & (s >= 0.0) & (s <= 1.0)
        ii, jj = np.nonzero(hit)
        for a_idx, b_idx in zip(ii + i0, jj):
            if abs(a_idx - b_idx) <= skip_adjacent or b_idx <= a_idx:
                continue
            # endpoints wrap: ignore the trivial closure contact
            if a_idx == 0 and b_idx >= n - 1 - skip_adjacent:
                continue
            tt = t[a_idx - i0, b_idx]
            found.append((float(px[a_idx, 0] + tt * d[a_idx, 0]),
                          float(px[a_idx, 1] + tt * d[a_idx, 1])))
    # merge near-duplicates
    merged: list[tuple[float, float]] = []
    for p in found:
        if all(math.hypot(p[0] - m[0], p[1] - m[1]) > 1e-3 for m in merged):
            merged.append(p)
    return merged
