import math
from fractions import Fraction

import numpy as np
import pytest

from tricentre import _kernels
from tricentre.dynamics import (EllipticState, Params,
                                PhiCrossing, PrimaryProximity, XiCrossing,
                                centre_potential, integrate,
                                integrate_symplectic, primary_potential,
                                regularized_hamiltonian, trajectory_to_csv,
                                trajectory_to_json, vector_field)
from tricentre.errors import DomainError, IntegrationError, SingularityError
from tricentre.geometry import CartesianPoint, EllipticPoint
from tricentre.periods import period_phi, period_xi


def separated_state(beta, a1, a=1.0, xi=0.0, phi=0.3, s_xi=1, s_phi=1):
    """State on the separated-system solution (zero Hamiltonian level)."""
    r = math.cosh(xi) - beta * a1 * math.cosh(xi) ** 2 - a1
    assert r > 0.0
    return np.array([
        xi, phi,
        s_xi * 2.0 * math.sqrt(a * r),
        s_phi * 2.0 * math.sqrt(a * (beta * a1 * math.cos(phi) ** 2 + a1)),
    ])


class TestPotentials:
    def test_midpoint(self):
        assert primary_potential(CartesianPoint(0.0, 0.0), 1.0) == -2.0

    def test_decay_at_infinity(self):
        vals = [primary_potential(CartesianPoint(0.0, y), 1.0)
                for y in (10.0, 100.0, 1000.0)]
        assert all(v < 0.0 for v in vals)
        assert vals[0] < vals[1] < vals[2]

    def test_singular_at_primary(self):
        with pytest.raises(SingularityError):
            primary_potential(CartesianPoint(1.0, 0.0), 1.0)

    def test_centre_potential_distances(self):
        c = CartesianPoint(0.25, 0.5)
        assert centre_potential(CartesianPoint(1.25, 0.5), c) == pytest.approx(-1.0)
        assert centre_potential(CartesianPoint(2.25, 0.5), c) == pytest.approx(-0.5)
        with pytest.raises(SingularityError):
            centre_potential(c, c)


class TestHamiltonian:
    def test_zero_on_separated_solutions(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            beta = rng.uniform(0.01, 0.6)
            a1 = rng.uniform(0.05, 0.95 / (1.0 + beta))
            phi = rng.uniform(0.0, 2.0 * math.pi)
            y = separated_state(beta, a1, phi=phi)
            prm = Params(a=1.0, beta=beta, a1=a1)
            assert abs(regularized_hamiltonian(y, prm)) <= 1e-12

    def test_zero_at_turning_point(self):
        beta, a1, a = 0.2, 0.4, 1.0
        cosh_xi = (1.0 + math.sqrt(1.0 - 4.0 * beta * a1 * a1)) / (2.0 * beta * a1)
        xi_plus = math.acosh(cosh_xi)
        phi = 1.1
        phi_speed = 2.0 * math.sqrt(a * (beta * a1 * math.cos(phi) ** 2 + a1))
        prm = Params(a=a, beta=beta, a1=a1)
        val = regularized_hamiltonian([xi_plus, phi, 0.0, phi_speed], prm)
        assert abs(val) <= 1e-11

    def test_boundary_a1_rejected(self):
        # a1 = 0 would need xi'^2/4 = 1 - a1*(1+beta) -> 1, but sits on the
        # domain boundary and is refused
        with pytest.raises(DomainError):
            Params(a=1.0, beta=0.0, a1=0.0)

    def test_state_at_centre_singular_when_perturbed(self):
        centre = CartesianPoint(math.cosh(0.5), 0.0)
        prm = Params(a=1.0, beta=0.1, a1=0.3, eps=1e-3, centre=centre)
        with pytest.raises(SingularityError):
            regularized_hamiltonian([0.5, 0.0, 1.0, 1.0], prm)


class TestVectorField:
    def test_axis_accelerations_vanish(self):
        prm = Params(a=1.0, beta=0.2, a1=0.3)
        for phi in (0.0, math.pi / 2.0):
            out = vector_field([0.0, phi, 0.7, 0.9], prm)
            assert out[2] == pytest.approx(0.0, abs=1e-15)  # sinh(0) = 0
            assert out[3] == pytest.approx(0.0, abs=1e-15)  # sin(2 phi) = 0

    @pytest.mark.parametrize("eps", [0.0, 1e-2])
    def test_gradient_check_against_hamiltonian(self, eps):
        rng = np.random.default_rng(5)
        centre = CartesianPoint(0.37, 0.21)
        prm = Params(a=1.0, beta=0.2, a1=0.4, eps=eps, centre=centre)
        h = 1e-6
        worst = 0.0
        for _ in range(1000):
            y = rng.uniform([-2.0, 0.0, -2.0, -2.0], [2.0, 2.0 * math.pi, 2.0, 2.0])
            f = vector_field(y, prm)
            grad = np.empty(4)
            for i in range(4):
                yp, ym = y.copy(), y.copy()
                yp[i] += h
                ym[i] -= h
                grad[i] = (regularized_hamiltonian(yp, prm)
                           - regularized_hamiltonian(ym, prm)) / (2.0 * h)
            expect = np.array([grad[2], grad[3], -grad[0], -grad[1]])
            worst = max(worst, float(np.max(np.abs(f - expect)
                                            / (1.0 + np.abs(expect)))))
        assert worst <= 1e-6


class TestIntegrate:
    def test_energy_conserved_over_ten_periods(self):
        beta, a1 = 1.0 / 7.0, 0.3
        prm = Params(a=1.0, beta=beta, a1=a1)
        t1 = period_xi(beta, a1)
        traj = integrate(separated_state(beta, a1), prm, 10.0 * t1, tol=1e-13)
        assert traj.energy_drift <= 1e-10

    def test_energy_drift_long_span(self):
        prm = Params(a=1.0, beta=0.25, a1=0.35)
        traj = integrate(separated_state(0.25, 0.35), prm, 100.0, tol=1e-12)
        assert traj.energy_drift <= 1e-9

    def test_angular_period_cross_check(self):
        beta, a1 = 0.2, 0.4
        prm = Params(a=1.0, beta=beta, a1=a1)
        t2 = period_phi(beta, a1)
        y0 = separated_state(beta, a1, phi=0.0)
        traj = integrate(y0, prm, 2.2 * t2, tol=1e-12, events=[PhiCrossing(0.0)])
        times = [e.tau for e in traj.events if e.kind == "phi_crossing"]
        assert len(times) >= 2
        assert times[0] == pytest.approx(t2, rel=1e-8)
        assert times[1] - times[0] == pytest.approx(t2, rel=1e-8)

    def test_zero_length(self):
        prm = Params(a=1.0, beta=0.2, a1=0.3)
        traj = integrate(separated_state(0.2, 0.3), prm, 0.0, tol=1e-12)
        assert len(traj.taus) == 1
        assert traj.events == []

    def test_separated_subsystem_energies_conserved(self):
        beta, a1 = 0.15, 0.45
        prm = Params(a=1.0, beta=beta, a1=a1)
        rng = np.random.default_rng(17)
        y0 = np.array([rng.uniform(-0.5, 0.5), rng.uniform(0, 6.28),
                       rng.uniform(0.5, 1.0), rng.uniform(0.5, 1.0)])
        traj = integrate(y0, prm, 30.0, tol=1e-12)
        xi, phi, pxi, pphi = (traj.states[:, i] for i in range(4))
        e_xi = pxi ** 2 / 4.0 - np.cosh(xi) + beta * a1 * np.cosh(xi) ** 2 + a1
        e_phi = pphi ** 2 / 4.0 - beta * a1 * np.cos(phi) ** 2 - a1
        assert np.max(np.abs(e_xi - e_xi[0])) <= 1e-9
        assert np.max(np.abs(e_phi - e_phi[0])) <= 1e-9

    def test_reversibility(self):
        beta, a1 = 1.0 / 7.0, 0.3
        prm = Params(a=1.0, beta=beta, a1=a1)
        tol = 1e-12
        y0 = separated_state(beta, a1)
        fw = integrate(y0, prm, 1.0, tol=tol)
        yb = fw.states[-1].copy()
        yb[2:] *= -1.0
        bw = integrate(yb, prm, 1.0, tol=tol)
        yr = bw.states[-1].copy()
        yr[2:] *= -1.0
        assert np.max(np.abs(yr - y0)) <= 10.0 * tol

    def test_dense_output_matches_samples(self):
        prm = Params(a=1.0, beta=0.2, a1=0.3)
        traj = integrate(separated_state(0.2, 0.3), prm, 5.0, tol=1e-12)
        mid = len(traj.taus) // 2
        assert np.allclose(traj.state_at(traj.taus[mid]), traj.states[mid],
                           atol=1e-12)

    def test_xi_crossing_direction_filter(self):
        beta, a1 = 0.2, 0.3
        prm = Params(a=1.0, beta=beta, a1=a1)
        t1 = period_xi(beta, a1)
        y0 = separated_state(beta, a1)  # starts at xi = 0 moving up
        traj = integrate(y0, prm, 2.1 * t1, tol=1e-12,
                         events=[XiCrossing(0.0, direction=+1)])
        ups = [e.tau for e in traj.events]
        assert len(ups) == 2
        assert ups[0] == pytest.approx(t1, rel=1e-8)

    def test_exclusion_ball_refusal(self):
        # aim straight at the perturbing centre: the integration must refuse
        centre = CartesianPoint(math.cosh(0.4), 0.0)
        prm = Params(a=1.0, beta=0.2, a1=0.3, eps=1e-2, centre=centre)
        y0 = np.array([0.0, 0.0, 1.2, 0.0])  # moves along the x-axis into C
        with pytest.raises(IntegrationError):
            integrate(y0, prm, 5.0, tol=1e-10)

    def test_primary_proximity_events(self):
        # the orbit seeded at a primary re-enters a small ball around it
        beta = 0.2
        from tricentre.periods import solve_resonant_a1
        sol = solve_resonant_a1(beta, 1)
        prm = Params(a=1.0, beta=beta, a1=sol.a1_hat, q=Fraction(1))
        y0 = separated_state(beta, sol.a1_hat, phi=0.0)
        spec = PrimaryProximity(radius=0.05, primary=1, direction=-1)
        traj = integrate(y0, prm, 1.2 * sol.t1, tol=1e-11, events=[spec])
        hits = [e for e in traj.events if e.kind == "primary_proximity"]
        assert hits, "expected a re-entry into the ball around the primary"
        # entry precedes the primary passage at t1 (rescaled time slows there)
        assert 0.9 * sol.t1 < hits[0].tau < sol.t1
        x = math.cosh(hits[0].state[0]) * math.cos(hits[0].state[1])
        y = math.sinh(hits[0].state[0]) * math.sin(hits[0].state[1])
        assert math.hypot(x - 1.0, y) == pytest.approx(0.05, abs=1e-9)

    def test_terminal_event_truncates(self):
        beta, a1 = 0.2, 0.3
        prm = Params(a=1.0, beta=beta, a1=a1)
        t1 = period_xi(beta, a1)
        spec = XiCrossing(0.0, direction=-1, terminal=True)
        traj = integrate(separated_state(beta, a1), prm, 3.0 * t1, tol=1e-12,
                         events=[spec])
        assert traj.tau_final == pytest.approx(0.5 * t1, rel=1e-8)
        assert abs(traj.states[-1][0]) <= 1e-9

    def test_symplectic_cross_check(self):
        beta, a1 = 1.0 / 7.0, 0.3
        prm = Params(a=1.0, beta=beta, a1=a1)
        y0 = separated_state(beta, a1)
        ref = integrate(y0, prm, 20.0, tol=1e-12)
        ver = integrate_symplectic(y0, prm, 20.0, dt=1e-4)
        assert ver.energy_drift <= 1e-6
        assert np.max(np.abs(ver.states[-1] - ref.states[-1])) <= 1e-5


class TestExport(object):
    def test_csv_columns_and_json_events(self, tmp_path):
        beta, a1 = 0.2, 0.3
        prm = Params(a=1.0, beta=beta, a1=a1)
        traj = integrate(separated_state(beta, a1), prm, 4.0, tol=1e-11,
                         events=[PhiCrossing(1.0)])
        csv_path = tmp_path / "traj.csv"
        json_path = tmp_path / "traj.json"
        trajectory_to_csv(traj, csv_path)
        trajectory_to_json(traj, json_path)
        header = csv_path.read_text().splitlines()[0].split(",")
        assert header == ["tau", "xi", "phi", "xi_prime", "phi_prime",
                          "t_physical", "x", "y"]
        import json as _json
        doc = _json.loads(json_path.read_text())
        assert doc["events"] and doc["events"][0]["kind"] == "phi_crossing"
        assert doc["energy_drift"] <= 1e-9


def test_state_roundtrip():
    s = EllipticState(EllipticPoint(0.3, 1.2), -0.5, 0.8)
    assert np.allclose(EllipticState.from_array(s.as_array()).as_array(),
                       s.as_array())


def test_params_validation():
    with pytest.raises(DomainError):
        Params(a=-1.0)
    with pytest.raises(DomainError):
        Params(beta=1.0)
    with pytest.raises(DomainError):
        Params(beta=0.5, a1=0.7)  # above 1/(1+beta)
    with pytest.raises(DomainError):
        Params(eps=1e-3)  # perturbation without a centre
    with pytest.raises(DomainError):
        Params(eps=1e-3, centre=CartesianPoint(1.0, 0.0))  # centre at primary
    prm = Params(beta=0.5, a1=0.5, q=Fraction(3, 2))
    assert prm.energy == pytest.approx(-2.0 * 0.5 * 0.5)


def test_kernel_python_fallback_matches_compiled():
    # the pure-Python reference and the compiled kernel integrate identically
    y0 = separated_state(0.2, 0.3)
    args = (y0, 0.0, 2.0, 1e-10, 1e-10, 0.0, 2.0, 100000,
            1.0, -2.0 * 0.2 * 0.3, 0.0, 0.0, 0.0, 0.0)
    s1, n1, t1, y1, k1 = _kernels.dopri5_core(*args)
    s2, n2, t2, y2, k2 = _kernels._dopri5_core_py(*args)
    assert s1 == s2 == _kernels.STATUS_OK
    assert n1 == n2
    assert np.array_equal(y1, y2)
