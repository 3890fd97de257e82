import math

import pytest

from tricentre.errors import AccuracyError, DomainError
from tricentre.special import adaptive_quadrature, complete_elliptic_k

# Independent oracle value for K(m = 1/2), frozen from the tanh-sinh
# quadrature of the defining integral (cross-checked against
# Gamma(1/4)^2 / (4 sqrt(pi)) = 1.8540746773013719...).
K_HALF = 1.8540746773013719


def elliptic_k_tanh_sinh(m, tmax=4.0, levels=12):
    """Defining-integral oracle, independent of the AGM path.

    Double-exponential substitution v = (1 + tanh(pi/2 sinh t))/2 handles
    the inverse-square-root endpoint singularity at v = 1; 1 - v is formed
    without cancellation.
    """
    def term(t):
        s = 0.5 * math.pi * math.sinh(t)
        e2s = math.exp(-2.0 * s)
        v = 1.0 / (1.0 + e2s)
        one_minus_v = e2s / (1.0 + e2s)
        w = 0.5 * math.pi * math.cosh(t) * 2.0 * e2s / (1.0 + e2s) ** 2
        return w / math.sqrt(one_minus_v * (1.0 + v) * (1.0 - m * v * v))

    h = 1.0
    total = term(0.0)
    k = 1
    while k * h <= tmax:
        total += term(k * h) + term(-k * h)
        k += 1
    total *= h
    prev = total
    for _ in range(1, levels):
        h /= 2.0
        add = 0.0
        k = 1
        while k * h <= tmax:
            add += term(k * h) + term(-k * h)
            k += 2
        total = 0.5 * prev + h * add
        if abs(total - prev) < 1e-15 * abs(total):
            break
        prev = total
    return total


class TestCompleteEllipticK:
    def test_zero_modulus(self):
        assert complete_elliptic_k(0.0) == pytest.approx(math.pi / 2.0, abs=1e-15)

    def test_half_pinned_by_oracle(self):
        # the oracle reproduces the frozen constant, then the AGM matches it
        assert elliptic_k_tanh_sinh(0.5) == pytest.approx(K_HALF, abs=5e-15)
        assert complete_elliptic_k(0.5) == pytest.approx(K_HALF, rel=1e-14)

    def test_near_one_finite_and_large(self):
        val = complete_elliptic_k(0.999999)
        assert math.isfinite(val) and val > 7.0

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            complete_elliptic_k(1.0)
        with pytest.raises(DomainError):
            complete_elliptic_k(-0.1)
        with pytest.raises(DomainError):
            complete_elliptic_k(float("nan"))

    @pytest.mark.parametrize("m", [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_agm_vs_defining_integral(self, m):
        assert complete_elliptic_k(m) == pytest.approx(
            elliptic_k_tanh_sinh(m), abs=1e-10)

    def test_strictly_increasing(self):
        grid = [i / 32.0 for i in range(32)]
        vals = [complete_elliptic_k(m) for m in grid]
        assert all(a < b for a, b in zip(vals, vals[1:]))


class TestAdaptiveQuadrature:
    def test_constant(self):
        res = adaptive_quadrature(lambda _x: 1.0, 0.0, 2.0 * math.pi, 1e-12)
        assert res.value == pytest.approx(2.0 * math.pi, abs=1e-12)
        assert res.error_estimate >= 0.0
        assert res.evaluations >= 1

    def test_cosine(self):
        res = adaptive_quadrature(math.cos, 0.0, math.pi / 2.0, 1e-12)
        assert res.value == pytest.approx(1.0, abs=1e-12)

    def test_angular_travel_time_integrand(self):
        # beta = 0, a1 = 1/4: the integrand is the constant 2
        beta, a1 = 0.0, 0.25
        res = adaptive_quadrature(
            lambda phi: 1.0 / math.sqrt(beta * a1 * math.cos(phi) ** 2 + a1),
            0.0, math.pi / 2.0, 1e-12)
        assert res.value == pytest.approx(math.pi, abs=1e-12)

    def test_reversed_interval_flips_sign(self):
        fwd = adaptive_quadrature(math.cos, 0.0, 1.0, 1e-12)
        rev = adaptive_quadrature(math.cos, 1.0, 0.0, 1e-12)
        assert rev.value == pytest.approx(-fwd.value, abs=1e-14)

    def test_zero_length(self):
        res = adaptive_quadrature(math.cos, 0.3, 0.3, 1e-12)
        assert res.value == 0.0

    def test_bad_tol(self):
        with pytest.raises(DomainError):
            adaptive_quadrature(math.cos, 0.0, 1.0, 0.0)

    def test_nonconvergence_carries_best_estimate(self):
        with pytest.raises(AccuracyError) as err:
            adaptive_quadrature(lambda v: 1.0 / math.sqrt(max(1.0 - v, 1e-300)),
                                0.0, 1.0, 1e-13, max_intervals=8)
        best = err.value.best_estimate
        assert best is not None
        assert best.value == pytest.approx(2.0, abs=0.2)
