"""Potentials, regularized Hamiltonian and the trajectory integrator.

The regularized system evolves y = (xi, phi, xi', phi') in the rescaled
time tau, with Hamiltonian

    H = (xi'^2 + phi'^2)/2 - 2 a cosh(xi) - [E - eps*V](cosh^2 xi - cos^2 phi)

whose zero level carries the fixed-energy orbits of the physical problem.
For eps = 0 the flow separates into a double-well oscillation in xi and a
rotating-pendulum motion in phi.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .errors import DomainError, IntegrationError, SingularityError
from .geometry import (
    CartesianPoint,
    EllipticPoint,
    cartesian_to_elliptic,
    elliptic_to_cartesian,
    physical_time_of,
)

__all__ = [
    "Params", "EllipticState", "Trajectory",
    "XiCrossing", "PhiCrossing", "CentreProximity", "PrimaryProximity",
    "EventRecord",
    "primary_potential", "centre_potential",
    "regularized_hamiltonian", "vector_field",
    "integrate", "integrate_symplectic",
    "trajectory_to_csv", "trajectory_to_json",
]


@dataclass(frozen=True)
class Params:
    """Physical and regime parameters of one problem instance.

    beta = |E|/E1 and a1 = E1/(2a) are the scaled energy parameters of the
    separated system; the admissibility constraints are beta in [0, 1),
    0 < a1 < 1/(1+beta) (which also forces 2*beta*a1 < 1).  The total
    energy E = -2*a*beta*a1 is derived, never stored independently.
    """

    a: float = 1.0
    beta: float = 0.0
    a1: float = 0.25
    q: Fraction = Fraction(1)
    eps: float = 0.0
    centre: Optional[CartesianPoint] = None

    def __post_init__(self):
        if not (self.a > 0.0):
            raise DomainError(f"primary intensity a must be > 0, got {self.a}")
        if not (0.0 <= self.beta < 1.0):
            raise DomainError(f"beta must lie in [0, 1), got {self.beta}")
        if not (0.0 < self.a1 < 1.0 / (1.0 + self.beta)):
            raise DomainError(
                f"a1 must lie in (0, 1/(1+beta)) = (0, {1.0/(1.0+self.beta):.6g}),"
                f" got {self.a1}")
        if 2.0 * self.beta * self.a1 >= 1.0:
            raise DomainError("admissibility requires 2*beta*a1 < 1")
        if not (self.eps >= 0.0):
            raise DomainError(f"eps must be >= 0, got {self.eps}")
        if isinstance(self.q, int):
            object.__setattr__(self, "q", Fraction(self.q))
        if self.q <= 0:
            raise DomainError(f"resonance class q must be positive, got {self.q}")
        if self.centre is None:
            if self.eps > 0.0:
                raise DomainError("a perturbing centre position is required when eps > 0")
        else:
            if (self.centre.distance_to(CartesianPoint(1.0, 0.0)) < 1e-12
                    or self.centre.distance_to(CartesianPoint(-1.0, 0.0)) < 1e-12):
                raise DomainError("the perturbing centre may not coincide with a primary")

    @property
    def energy(self) -> float:
        return -2.0 * self.a * self.beta * self.a1

    @property
    def centre_elliptic(self) -> EllipticPoint:
        if self.centre is None:
            raise DomainError("no perturbing centre configured")
        return cartesian_to_elliptic(self.centre)[0]

    def with_eps(self, eps: float) -> "Params":
        return replace(self, eps=eps)


@dataclass(frozen=True)
class EllipticState:
    point: EllipticPoint
    xi_prime: float
    phi_prime: float

    def as_array(self) -> np.ndarray:
        return np.array([self.point.xi, self.point.phi,
                         self.xi_prime, self.phi_prime])

    @staticmethod
    def from_array(y) -> "EllipticState":
        return EllipticState(EllipticPoint(float(y[0]), float(y[1])),
                             float(y[2]), float(y[3]))


def _as_state_array(state) -> np.ndarray:
    if isinstance(state, EllipticState):
        return state.as_array()
    y = np.asarray(state, dtype=float)
    if y.shape != (4,):
        raise DomainError(f"state must have 4 components, got shape {y.shape}")
    return y.copy()


# ---------------------------------------------------------------------------
# potentials and Hamiltonian

def primary_potential(p: CartesianPoint, a: float) -> float:
    """Gravitational potential of the two primaries at (+1, 0) and (-1, 0)."""
    d1 = math.hypot(p.x - 1.0, p.y)
    d2 = math.hypot(p.x + 1.0, p.y)
    if d1 < 1e-13 or d2 < 1e-13:
        raise SingularityError(f"potential singular at primary: ({p.x}, {p.y})")
    return -a / d2 - a / d1


def centre_potential(p: CartesianPoint, centre: CartesianPoint) -> float:
    """Unit-intensity potential of the perturbing centre."""
    d = p.distance_to(centre)
    if d < 1e-13:
        raise SingularityError("potential singular at the perturbing centre")
    return -1.0 / d


def regularized_hamiltonian(state, prm: Params) -> float:
    """Value of the regularized Hamiltonian; 0 on orbits of energy prm.energy."""
    y = _as_state_array(state)
    cx, cy = _centre_xy(prm)
    if prm.eps > 0.0:
        pos = elliptic_to_cartesian(EllipticPoint(y[0], y[1]))
        if pos.distance_to(prm.centre) < 1e-13:
            raise SingularityError("state at the perturbing centre with eps > 0")
    return _kernels.hamiltonian_kernel(y[0], y[1], y[2], y[3],
                                       prm.a, prm.energy, prm.eps, cx, cy)


def hamiltonian_values(states: np.ndarray, prm: Params) -> np.ndarray:
    """Vectorized Hamiltonian over an (n, 4) state array."""
    xi, phi = states[:, 0], states[:, 1]
    ch, cp = np.cosh(xi), np.cos(phi)
    rho = ch * ch - cp * cp
    val = 0.5 * (states[:, 2] ** 2 + states[:, 3] ** 2) - 2.0 * prm.a * ch \
        - prm.energy * rho
    if prm.eps != 0.0:
        x = ch * cp
        yy = np.sinh(xi) * np.sin(phi)
        r = np.hypot(x - prm.centre.x, yy - prm.centre.y)
        val += prm.eps * (-1.0 / r) * rho
    return val


def vector_field(state, prm: Params) -> np.ndarray:
    """d(state)/dtau from Hamilton's equations of the regularized system."""
    y = _as_state_array(state)
    if prm.eps > 0.0:
        pos = elliptic_to_cartesian(EllipticPoint(y[0], y[1]))
        if pos.distance_to(prm.centre) < 1e-13:
            raise SingularityError("vector field singular at the perturbing centre")
    out = np.empty(4)
    cx, cy = _centre_xy(prm)
    _kernels.rhs_kernel(y, out, prm.a, prm.energy, prm.eps, cx, cy)
    return out


def _centre_xy(prm: Params) -> tuple[float, float]:
    if prm.centre is None:
        return 0.0, 0.0
    return prm.centre.x, prm.centre.y


# ---------------------------------------------------------------------------
# event specifications

@dataclass(frozen=True)
class XiCrossing:
    """Crossing of the confocal ellipse xi = value; direction +1/-1/0=any."""
    value: float
    direction: int = 0
    terminal: bool = False
    kind: str = field(default="xi_crossing", init=False)

    def g(self, states: np.ndarray) -> np.ndarray:
        return states[..., 0] - self.value

    def accept(self, y: np.ndarray) -> bool:
        return True


@dataclass(frozen=True)
class PhiCrossing:
    """Crossing of phi = value (mod 2pi), any rotation direction."""
    value: float
    terminal: bool = False
    kind: str = field(default="phi_crossing", init=False)
    direction: int = field(default=0, init=False)

    def g(self, states: np.ndarray) -> np.ndarray:
        # sin vanishes at value mod pi; the accept() filter keeps mod 2pi
        return np.sin(states[..., 1] - self.value)

    def accept(self, y: np.ndarray) -> bool:
        return math.cos(y[1] - self.value) > 0.0


@dataclass(frozen=True)
class CentreProximity:
    """Crossing of the circle dist(., centre) = radius; -1 means entering."""
    radius: float
    direction: int = -1
    terminal: bool = False
    kind: str = field(default="centre_proximity", init=False)

    def g(self, states: np.ndarray) -> np.ndarray:
        raise NotImplementedError  # needs the centre; handled by the engine

    def accept(self, y: np.ndarray) -> bool:
        return True


@dataclass(frozen=True)
class PrimaryProximity:
    """Crossing of dist(., primary) = radius for primary 1 (+x) or 2 (-x)."""
    radius: float
    primary: int = 1
    direction: int = -1
    terminal: bool = False
    kind: str = field(default="primary_proximity", init=False)

    def g(self, states: np.ndarray) -> np.ndarray:
        xi, phi = states[..., 0], states[..., 1]
        x = np.cosh(xi) * np.cos(phi)
        y = np.sinh(xi) * np.sin(phi)
        px = 1.0 if self.primary == 1 else -1.0
        return (x - px) ** 2 + y ** 2 - self.radius ** 2

    def accept(self, y: np.ndarray) -> bool:
        return True


@dataclass(frozen=True)
class EventRecord:
    kind: str
    tau: float
    state: np.ndarray
    spec: object = None


# ---------------------------------------------------------------------------
# trajectory container with dense output

class Trajectory:
    """Result of one integration: accepted samples plus dense interpolant."""

    def __init__(self, prm: Params, taus: np.ndarray, states: np.ndarray,
                 stages: np.ndarray, events: Sequence[EventRecord],
                 energy_drift: float):
        self.params = prm
        self.taus = taus
        self.states = states
        self._stages = stages
        # per-step dense coefficients: Q[i] = K_i^T P  (4 components x 4 powers)
        if len(stages):
            self._dense_q = np.einsum("skc,kp->scp", stages, _kernels.DENSE_P)
            self._h = np.diff(taus)
        else:
            self._dense_q = np.zeros((0, 4, 4))
            self._h = np.zeros(0)
        self.events = list(events)
        self.energy_drift = energy_drift

    @property
    def samples(self) -> list[tuple[float, EllipticState]]:
        return [(float(t), EllipticState.from_array(y))
                for t, y in zip(self.taus, self.states)]

    @property
    def tau_final(self) -> float:
        return float(self.taus[-1])

    @property
    def final_state(self) -> EllipticState:
        return EllipticState.from_array(self.states[-1])

    def state_at(self, tau) -> np.ndarray:
        """Dense-output state(s) at scalar or array tau inside the span."""
        scalar = np.isscalar(tau)
        t = np.atleast_1d(np.asarray(tau, dtype=float))
        if len(self.taus) == 1:
            out = np.repeat(self.states[:1], len(t), axis=0)
            return out[0] if scalar else out
        ascending = self.taus[-1] >= self.taus[0]
        grid = self.taus if ascending else -self.taus
        q = t if ascending else -t
        idx = np.clip(np.searchsorted(grid, q, side="right") - 1, 0,
                      len(self._h) - 1)
        th = (t - self.taus[idx]) / self._h[idx]
        powers = np.stack([th, th**2, th**3, th**4], axis=-1)
        corr = np.einsum("ncp,np->nc", self._dense_q[idx], powers)
        out = self.states[idx] + self._h[idx][:, None] * corr
        return out[0] if scalar else out

    def truncated(self, tau_star: float) -> "Trajectory":
        """Copy of this trajectory cut at tau_star (earlier events kept).

        The final partial interval keeps the parent step's dense
        coefficients, which remain exact inside that step.
        """
        ascending = self.taus[-1] >= self.taus[0]
        grid = self.taus if ascending else -self.taus
        q = tau_star if ascending else -tau_star
        n = int(np.searchsorted(grid, q, side="right"))
        n = max(1, min(n, len(self.taus)))
        duplicate = abs(self.taus[n - 1] - tau_star) <= 1e-15 * max(1.0, abs(tau_star))
        if duplicate:
            taus = self.taus[:n].copy()
            states = self.states[:n].copy()
            n_int = n - 1
        else:
            taus = np.concatenate([self.taus[:n], [tau_star]])
            states = np.vstack([self.states[:n], self.state_at(tau_star)])
            n_int = n
        events = [e for e in self.events
                  if (e.tau <= tau_star + 1e-15 if ascending
                      else e.tau >= tau_star - 1e-15)]
        traj = Trajectory.__new__(Trajectory)
        traj.params = self.params
        traj.taus = taus
        traj.states = states
        traj._stages = self._stages[:n_int].copy()
        traj._dense_q = self._dense_q[:n_int].copy()
        traj._h = self._h[:n_int].copy()
        traj.events = events
        traj.energy_drift = self.energy_drift
        return traj

    def dense_grid(self, n: int = 1024) -> tuple[np.ndarray, np.ndarray]:
        """Uniform tau grid with dense-output states, endpoints included."""
        t = np.linspace(self.taus[0], self.taus[-1], n)
        return t, self.state_at(t)

    def min_centre_distance(self, centre: CartesianPoint, n: int = 4096) -> float:
        _, states = self.dense_grid(n)
        x = np.cosh(states[:, 0]) * np.cos(states[:, 1])
        y = np.sinh(states[:, 0]) * np.sin(states[:, 1])
        return float(np.min(np.hypot(x - centre.x, y - centre.y)))


# ---------------------------------------------------------------------------
# event engine

_SCAN_POINTS = 8  # dense samples per accepted step used for sign scanning


def _detect_events(traj_T, traj_Y, dense_q, prm, specs):
    """Locate event roots on the dense output; returns sorted EventRecords."""
    nstep = len(traj_T) - 1
    if nstep < 1 or not specs:
        return []
    h = np.diff(traj_T)
    theta = np.linspace(0.0, 1.0, _SCAN_POINTS + 1)
    powers = np.stack([theta, theta**2, theta**3, theta**4], axis=-1)
    # grid[i, j] = state at traj_T[i] + theta[j]*h[i]
    corr = np.einsum("scp,gp->sgc", dense_q, powers)
    grid = traj_Y[:-1, None, :] + h[:, None, None] * corr
    tau_grid = traj_T[:-1, None] + h[:, None] * theta[None, :]

    def dense_state(i, tau):
        th = (tau - traj_T[i]) / h[i]
        p = np.array([th, th**2, th**3, th**4])
        return traj_Y[i] + h[i] * (dense_q[i] @ p)

    records = []
    for spec in specs:
        if isinstance(spec, CentreProximity):
            cx, cy = _centre_xy(prm)
            xi, phi = grid[..., 0], grid[..., 1]
            x = np.cosh(xi) * np.cos(phi)
            y = np.sinh(xi) * np.sin(phi)
            g = (x - cx) ** 2 + (y - cy) ** 2 - spec.radius ** 2
        else:
            g = spec.g(grid)
        sign_flip = (g[:, :-1] * g[:, 1:]) < 0.0
        steps, cells = np.nonzero(sign_flip)
        for i, j in zip(steps, cells):
            ta, tb = tau_grid[i, j], tau_grid[i, j + 1]
            ga, gb = g[i, j], g[i, j + 1]
            direction = 1 if gb > ga else -1
            if spec.direction != 0 and direction != spec.direction:
                continue
            tau_star, y_star = _refine_root(
                lambda tt, ii=i: dense_state(ii, tt),
                lambda yv: _event_value(spec, yv, prm),
                ta, tb, ga, gb)
            if spec.accept(y_star):
                records.append(EventRecord(spec.kind, tau_star, y_star, spec))
    ascending = traj_T[-1] >= traj_T[0]
    records.sort(key=lambda r: r.tau if ascending else -r.tau)
    return records


def _event_value(spec, y: np.ndarray, prm: Params) -> float:
    if isinstance(spec, CentreProximity):
        cx, cy = _centre_xy(prm)
        x = math.cosh(y[0]) * math.cos(y[1])
        yy = math.sinh(y[0]) * math.sin(y[1])
        return (x - cx) ** 2 + (yy - cy) ** 2 - spec.radius ** 2
    return float(spec.g(y[None, :])[0])


def _refine_root(state_of, g_of, ta, tb, ga, gb, tol=1e-12, max_iter=80):
    """Bisection/secant hybrid root refinement to ~1e-12 in tau."""
    for _ in range(max_iter):
        if abs(tb - ta) <= tol * max(1.0, abs(ta), abs(tb)):
            break
        # secant candidate, safeguarded to the interior
        denom = gb - ga
        if denom != 0.0:
            tc = tb - gb * (tb - ta) / denom
        else:
            tc = 0.5 * (ta + tb)
        lo, hi = (ta, tb) if ta < tb else (tb, ta)
        if not (lo + 0.1 * (hi - lo) <= tc <= hi - 0.1 * (hi - lo)):
            tc = 0.5 * (ta + tb)
        yc = state_of(tc)
        gc = g_of(yc)
        if gc == 0.0:
            return tc, yc
        if (ga < 0) != (gc < 0):
            tb, gb = tc, gc
        else:
            ta, ga = tc, gc
    t_star = 0.5 * (ta + tb)
    return t_star, state_of(t_star)


# ---------------------------------------------------------------------------
# integrate

def integrate(state0, prm: Params, tau_end: float, tol: float = 1e-10,
              events: Sequence = (), max_step: float = math.inf,
              first_step: float = 0.0, max_steps: int = 2_000_000,
              r_min: Optional[float] = None) -> Trajectory:
    """Integrate the regularized flow from tau = 0 to tau_end.

    tol sets both relative and absolute local error targets of the embedded
    5(4) pair.  Event specs are located on the dense output by sign-change
    scanning plus hybrid root refinement; a spec with terminal=True truncates
    the returned trajectory at its first occurrence.
    """
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    y0 = _as_state_array(state0)
    if r_min is None:
        r_min = 0.01 * prm.eps if prm.eps > 0.0 else 0.0
    cx, cy = _centre_xy(prm)
    h_max = max_step if max_step != math.inf else abs(tau_end) or 1.0

    status, n, T, Y, KS = _kernels.dopri5_core(
        y0, 0.0, float(tau_end), tol, tol, float(first_step), float(h_max),
        max_steps, prm.a, prm.energy, prm.eps, cx, cy, float(r_min))

    if status == _kernels.STATUS_STEP_UNDERFLOW:
        raise IntegrationError(
            f"step size underflow at tau={T[n]:.6g} (singularity approach?)")
    if status == _kernels.STATUS_MAX_STEPS:
        raise IntegrationError(f"step budget {max_steps} exhausted at tau={T[n]:.6g}")
    if status == _kernels.STATUS_ENTERED_EXCLUSION_BALL:
        raise IntegrationError(
            f"trajectory entered the exclusion ball of radius {r_min:.3g}"
            f" around the perturbing centre at tau={T[n]:.6g}")

    dense_q = (np.einsum("skc,kp->scp", KS, _kernels.DENSE_P)
               if len(KS) else np.zeros((0, 4, 4)))
    records = _detect_events(T, Y, dense_q, prm, list(events))

    hvals = hamiltonian_values(Y, prm)
    drift = float(np.max(np.abs(hvals - hvals[0]))) if len(hvals) else 0.0

    traj = Trajectory(prm, T, Y, KS, records, drift)
    for rec in records:
        if getattr(rec.spec, "terminal", False):
            return traj.truncated(rec.tau)
    return traj


def integrate_symplectic(state0, prm: Params, tau_end: float,
                         dt: float = 1e-4, stride: int = 16) -> Trajectory:
    """Fixed-step velocity-Verlet cross-check run (no events, no dense output)."""
    if dt <= 0.0:
        raise DomainError(f"dt must be positive, got {dt}")
    y0 = _as_state_array(state0)
    cx, cy = _centre_xy(prm)
    T, Y = _kernels.verlet_core(y0, 0.0, float(tau_end), float(dt),
                                int(stride), prm.a, prm.energy, prm.eps, cx, cy)
    hvals = hamiltonian_values(Y, prm)
    drift = float(np.max(np.abs(hvals - hvals[0]))) if len(hvals) else 0.0
    return Trajectory(prm, T, Y, np.zeros((0, 7, 4)), [], drift)


# ---------------------------------------------------------------------------
# export

def trajectory_to_csv(traj: Trajectory, path, n: int = 1000) -> None:
    """Write tau, elliptic state, physical time and Cartesian position."""
    taus, states = traj.dense_grid(n) if len(traj.taus) > 1 else (
        traj.taus, traj.states)
    t_phys = physical_time_of(taus, states[:, 0], states[:, 1])
    x = np.cosh(states[:, 0]) * np.cos(states[:, 1])
    y = np.sinh(states[:, 0]) * np.sin(states[:, 1])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "xi", "phi", "xi_prime", "phi_prime",
                    "t_physical", "x", "y"])
        for i in range(len(taus)):
            w.writerow([f"{v:.17g}" for v in
                        (taus[i], states[i, 0], states[i, 1], states[i, 2],
                         states[i, 3], t_phys[i], x[i], y[i])])


def trajectory_to_json(traj: Trajectory, path) -> None:
    """Write integration metadata and event records."""
    doc = {
        "tau_span": [float(traj.taus[0]), float(traj.taus[-1])],
        "n_samples": int(len(traj.taus)),
        "energy": traj.params.energy,
        "energy_drift": traj.energy_drift,
        "events": [
            {"kind": e.kind, "tau": float(e.tau),
             "state": [float(v) for v in e.state]}
            for e in traj.events
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
