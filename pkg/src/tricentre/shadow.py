"""Shadowing experiments on the perturbed flow (eps > 0).

A perturbed trajectory segment is matched to a reference collision arc by
two-point shooting between small circles around the perturbing centre: the
unknowns are the angular position on the entry circle and the tau duration,
the speed being eliminated by the fixed-energy constraint.  Deviation
metrics quantify how closely the segment tracks the arc as eps shrinks;
a finite-difference pass through the centre's neighbourhood estimates the
local expansion rate of the return map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .arcs import CollisionArc
from .dynamics import CentreProximity, Params, integrate
from .errors import DomainError, IntegrationError
from .geometry import CartesianPoint, cartesian_to_elliptic, transform_matrix

__all__ = ["ShadowResult", "shoot_segment", "local_expansion_rate"]

_ENTRY_RADIUS_FLOOR = 1e-4


@dataclass
class ShadowResult:
    eps: float
    max_deviation: float      # sup over the segment of distance to the arc
    min_c_distance: float
    time_defect: float        # |duration - arc duration| in tau
    converged: bool
    entry_radius: float
    residual: float           # final Newton residual (Cartesian)
    n_iterations: int
    alpha: float              # converged entry-circle angle offset
    duration: float
    arrival_state: Optional[np.ndarray]  # elliptic state at the exit circle
    params: Optional[Params] = None


def _energy_consistent_state(pos: CartesianPoint, direction_cart: np.ndarray,
                             prm: Params) -> np.ndarray:
    """Elliptic state at pos moving along direction_cart on the zero level."""
    ell = cartesian_to_elliptic(pos)[0]
    u = transform_matrix(ell)
    rho = math.cosh(ell.xi) ** 2 - math.cos(ell.phi) ** 2
    d_ell = u.T @ direction_cart / rho  # inverse of the conformal map
    v_cent = -1.0 / pos.distance_to(prm.centre) if prm.eps != 0.0 else 0.0
    rhs = 2.0 * prm.a * math.cosh(ell.xi) + (prm.energy - prm.eps * v_cent) * rho
    if rhs <= 0.0:
        raise DomainError("no admissible speed: state outside the Hill region")
    speed = math.sqrt(2.0 * rhs) / math.hypot(d_ell[0], d_ell[1])
    return np.array([ell.xi, ell.phi, speed * d_ell[0], speed * d_ell[1]])


def _rotate(v: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def _cartesian_track(states: np.ndarray) -> np.ndarray:
    x = np.cosh(states[:, 0]) * np.cos(states[:, 1])
    y = np.sinh(states[:, 0]) * np.sin(states[:, 1])
    return np.column_stack([x, y])


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _deviation_to_arc(points: np.ndarray, arc: CollisionArc,
                      n_seed: int = 4096) -> float:
    """Max over points of the distance to the continuous reference arc.

    A coarse polyline gives the nearest-sample seed; a golden-section
    refinement on the arc's dense output removes the discretization floor
    (the arc sweeps fast in Cartesian terms far from the primaries, where
    uniform-tau sampling is sparse).
    """
    arc_taus, arc_states = arc.path.dense_grid(n_seed)
    poly = _cartesian_track(arc_states)

    def dist_at(tau: float, p: np.ndarray) -> float:
        y = arc.path.state_at(tau)
        x = math.cosh(y[0]) * math.cos(y[1])
        yy = math.sinh(y[0]) * math.sin(y[1])
        return math.hypot(x - p[0], yy - p[1])

    worst = 0.0
    chunk = 256
    for s in range(0, len(points), chunk):
        pts = points[s:s + chunk]
        d2 = ((pts[:, None, :] - poly[None, :, :]) ** 2).sum(axis=2)
        nearest = np.argmin(d2, axis=1)
        for row, j in enumerate(nearest):
            p = pts[row]
            lo = arc_taus[max(j - 1, 0)]
            hi = arc_taus[min(j + 1, len(arc_taus) - 1)]
            a, b = lo, hi
            fa = dist_at(a + (1.0 - _GOLDEN) * (b - a), p)
            fb = dist_at(a + _GOLDEN * (b - a), p)
            t1, t2 = a + (1.0 - _GOLDEN) * (b - a), a + _GOLDEN * (b - a)
            for _ in range(40):
                if fa < fb:
                    b, t2, fb = t2, t1, fa
                    t1 = a + (1.0 - _GOLDEN) * (b - a)
                    fa = dist_at(t1, p)
                else:
                    a, t1, fa = t1, t2, fb
                    t2 = a + _GOLDEN * (b - a)
                    fb = dist_at(t2, p)
                if abs(b - a) < 1e-12 * max(1.0, abs(b)):
                    break
            worst = max(worst, min(fa, fb))
    return worst


def shoot_segment(arc: CollisionArc, eps: float,
                  entry_radius: Optional[float] = None,
                  tol: float = 1e-9, max_iter: int = 40) -> ShadowResult:
    """Match a perturbed segment to a reference arc between centre circles.

    Starts on the entry circle in the direction of the arc's departure
    velocity (radial outward motion), with speed fixed by the energy
    constraint of the perturbed Hamiltonian, and Newton-adjusts the entry
    angle and the duration until the endpoint hits the exit-circle point
    where the arc comes back in.  eps = 0 reproduces the arc itself up to
    the circle-chord offset.
    """
    if eps < 0.0:
        raise DomainError(f"eps must be >= 0, got {eps}")
    r_e = entry_radius if entry_radius is not None \
        else max(10.0 * eps, _ENTRY_RADIUS_FLOOR)
    if r_e < _ENTRY_RADIUS_FLOOR:
        raise DomainError(
            f"entry_radius {r_e:g} below the floor {_ENTRY_RADIUS_FLOOR:g}")
    prm = arc.params.with_eps(eps)
    centre = prm.centre
    c_vec = np.array([centre.x, centre.y])

    u0 = arc.v0_cartesian
    u0 = u0 / np.hypot(*u0)
    u_t = arc.vT_cartesian
    u_t = u_t / np.hypot(*u_t)
    target = c_vec - r_e * u_t

    # tau spent inside the circles along the unperturbed arc, for the guess
    rho_c = math.cosh(arc.start.xi) ** 2 - math.cos(arc.start.phi) ** 2
    v0_cart_speed = float(np.hypot(*arc.v0_cartesian))
    vt_cart_speed = float(np.hypot(*arc.vT_cartesian))
    tau_in = r_e / v0_cart_speed
    tau_out = r_e / vt_cart_speed
    del rho_c

    int_tol = min(1e-12, 0.01 * tol)

    def endpoint(alpha: float, duration: float) -> np.ndarray:
        direction = _rotate(u0, alpha)
        pos = CartesianPoint(*(c_vec + r_e * direction))
        y0 = _energy_consistent_state(pos, direction, prm)
        traj = integrate(y0, prm, duration, tol=int_tol)
        return traj, _cartesian_track(traj.states[-1:])[0]

    def residual(z):
        traj, end = endpoint(z[0], z[1])
        return traj, end - target

    z = np.array([0.0, arc.duration - tau_in - tau_out])
    traj, r = residual(z)
    rnorm = float(np.hypot(*r))
    n_it = 0
    converged = rnorm <= tol
    while not converged and n_it < max_iter:
        n_it += 1
        jac = np.empty((2, 2))
        d_alpha = 1e-7
        d_t = 1e-7 * max(1.0, abs(z[1]))
        _, r_a = residual(z + np.array([d_alpha, 0.0]))
        _, r_t = residual(z + np.array([0.0, d_t]))
        jac[:, 0] = (r_a - r) / d_alpha
        jac[:, 1] = (r_t - r) / d_t
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        improved = False
        for _ in range(10):
            z_new = z + lam * step
            if z_new[1] <= 0.0:
                lam *= 0.5
                continue
            traj_new, r_new = residual(z_new)
            rn = float(np.hypot(*r_new))
            if rn < rnorm:
                z, traj, r, rnorm = z_new, traj_new, r_new, rn
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
        converged = rnorm <= tol

    taus, states = traj.dense_grid(1024)
    track = _cartesian_track(states)
    min_c = float(np.min(np.hypot(track[:, 0] - centre.x,
                                  track[:, 1] - centre.y)))
    deviation = _deviation_to_arc(track, arc)

    return ShadowResult(
        eps=eps,
        max_deviation=deviation,
        min_c_distance=min_c,
        time_defect=abs(z[1] - arc.duration),
        converged=bool(converged),
        entry_radius=r_e,
        residual=rnorm,
        n_iterations=n_it,
        alpha=float(z[0]),
        duration=float(z[1]),
        arrival_state=traj.states[-1].copy(),
        params=prm,
    )


def local_expansion_rate(results: Sequence[ShadowResult], eps: float,
                         base_offset_frac: float = 0.25,
                         delta_frac: float = 0.05) -> float:
    """Per-passage expansion rate through the centre neighbourhood.

    Takes the arrival state of the first converged segment, offsets it
    across the incoming direction by impact parameters b0 -+ db (energy
    kept on the zero level), integrates each branch through the
    near-centre swing until it exits the doubled circle, and returns
    log |d(theta_out)/d(b)| by central differences.  The sensitivity grows
    as the centre's attraction strengthens relative to the passage
    distance, i.e. as eps decreases at fixed b/entry_radius.
    """
    if len(results) < 2:
        raise DomainError("need at least 2 consecutive segments")
    if not all(r.converged for r in results[:2]):
        raise DomainError("expansion rate requires converged segments")
    seg = results[0]
    if seg.params is None or seg.arrival_state is None:
        raise DomainError("segment carries no arrival data")
    prm = seg.params
    if prm.eps != eps:
        prm = prm.with_eps(eps)
    r_e = seg.entry_radius
    c_vec = np.array([prm.centre.x, prm.centre.y])

    y_arr = seg.arrival_state
    from .geometry import EllipticPoint, velocity_to_cartesian
    p_arr = EllipticPoint(y_arr[0], y_arr[1])
    v_cart = velocity_to_cartesian(p_arr, y_arr[2:])
    v_dir = v_cart / np.hypot(*v_cart)
    normal = np.array([-v_dir[1], v_dir[0]])
    pos0 = _cartesian_track(y_arr[None, :])[0]

    b0 = base_offset_frac * r_e
    db = delta_frac * r_e

    def theta_out(b: float) -> float:
        pos = CartesianPoint(*(pos0 + b * normal))
        y0 = _energy_consistent_state(pos, v_dir, prm)
        speed_cart = float(np.hypot(*velocity_to_cartesian(
            EllipticPoint(y0[0], y0[1]), y0[2:])))
        tau_max = 80.0 * r_e / speed_cart
        exit_ev = CentreProximity(radius=2.0 * r_e, direction=+1, terminal=True)
        traj = integrate(y0, prm, tau_max, tol=1e-12, events=[exit_ev])
        hits = [e for e in traj.events if e.kind == "centre_proximity"]
        if not hits:
            raise IntegrationError(
                "near-centre passage did not exit the measurement circle")
        y_exit = hits[0].state
        v_exit = velocity_to_cartesian(EllipticPoint(y_exit[0], y_exit[1]),
                                       y_exit[2:])
        return math.atan2(v_exit[1], v_exit[0])

    th_plus = theta_out(b0 + db)
    th_minus = theta_out(b0 - db)
    dtheta = math.atan2(math.sin(th_plus - th_minus),
                        math.cos(th_plus - th_minus))
    sensitivity = abs(dtheta) / (2.0 * db)
    if sensitivity <= 0.0:
        raise IntegrationError("degenerate zero sensitivity across the passage")
    return math.log(sensitivity)
