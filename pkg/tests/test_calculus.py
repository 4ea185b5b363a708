"""Curve calculus: quadrature, differentiation, certified improper integrals."""

import math

import numpy as np
import pytest

from rnsl import (
    CertificateMissing,
    CurveSampler,
    EtaNotInGxi,
    ExponentialBound,
    L0Scalar,
    MaxPanelsExceeded,
    RnVector,
    StepUnderflow,
    derivative,
    improper_integral,
    l0_norm,
    make_space,
    riemann_integral,
)
from rnsl.instances import rng_for, smooth_curve_family

TOL = 1e-10


def line_curve(space, x: RnVector, a=0.0, b=1.0) -> CurveSampler:
    return CurveSampler(space, x.dim, a, b, lambda u: x.scale(u))


class TestRiemannIntegral:
    def test_linear_curve(self, space2):
        x = RnVector.of(space2, [[1.0, -2.0], [0.5, 3.0]])
        res = riemann_integral(line_curve(space2, x), 0.0, 1.0, TOL)
        np.testing.assert_allclose(res.value.values, 0.5 * x.values, atol=10 * TOL)

    def test_exponential_single_atom(self, space1):
        g = CurveSampler(space1, 1, 0.0, 1.0, lambda u: RnVector.of(space1, [[math.exp(u)]]))
        res = riemann_integral(g, 0.0, 1.0, TOL)
        assert res.value.values[0, 0] == pytest.approx(math.e - 1.0, abs=10 * TOL)

    def test_empty_interval(self, space2):
        x = RnVector.of(space2, [[1.0, 1.0], [1.0, 1.0]])
        res = riemann_integral(line_curve(space2, x), 0.5, 0.5, TOL)
        assert res.est_error == 0.0
        assert res.panels == 0
        np.testing.assert_array_equal(res.value.values, np.zeros((2, 2)))

    def test_panel_budget_exceeded(self, space1):
        g = CurveSampler(
            space1, 1, 0.0, 1.0,
            lambda u: RnVector.of(space1, [[math.sin(500.0 / (u + 1e-3))]]),
        )
        with pytest.raises(MaxPanelsExceeded):
            riemann_integral(g, 0.0, 1.0, 1e-13, max_panels=8)

    def test_error_estimate_is_nonnegative(self, space2):
        x = RnVector.of(space2, [[1.0, 0.0], [0.0, 1.0]])
        res = riemann_integral(line_curve(space2, x), 0.0, 1.0, TOL)
        assert res.est_error >= 0.0


class TestDerivative:
    def test_quadratic(self, space2):
        x = RnVector.of(space2, [[1.0, 2.0], [-1.0, 0.5]])
        g = CurveSampler(space2, 2, 0.0, 2.0, lambda u: x.scale(u * u))
        out = derivative(g, 1.0, 1e-4)
        np.testing.assert_allclose(out.values, 2.0 * x.values, atol=1e-8)

    def test_constant_curve(self, space2):
        x = RnVector.of(space2, [[1.0, 2.0], [-1.0, 0.5]])
        g = CurveSampler(space2, 2, 0.0, 2.0, lambda u: x)
        np.testing.assert_allclose(derivative(g, 1.0, 1e-4).values, 0.0, atol=1e-12)

    def test_exponential_at_zero(self, space1):
        g = CurveSampler(space1, 1, -1.0, 1.0, lambda u: RnVector.of(space1, [[math.exp(u)]]))
        assert derivative(g, 0.0, 1e-4).values[0, 0] == pytest.approx(1.0, abs=1e-8)

    def test_step_underflow(self, space1):
        g = CurveSampler(space1, 1, -1.0, 1.0, lambda u: RnVector.of(space1, [[u]]))
        with pytest.raises(StepUnderflow):
            derivative(g, 0.0, 1e-13)


class TestImproperIntegral:
    def test_constant_curve(self, space2):
        x = RnVector.of(space2, [[3.0, 4.0], [1.0, 0.0]])
        bound = ExponentialBound(l0_norm(x), L0Scalar.zero(space2))
        g = CurveSampler(space2, 2, 0.0, math.inf, lambda s: x, bound=bound)
        res = improper_integral(g, L0Scalar.constant(space2, 2.0), 1e-9)
        np.testing.assert_allclose(res.value.values, 0.5 * x.values, atol=1e-8)

    def test_per_atom_exponential_rates(self, space2):
        x = RnVector.of(space2, [[1.0, 2.0], [1.0, 2.0]])
        rates = np.array([0.5, -1.0])
        bound = ExponentialBound(l0_norm(x), L0Scalar.of(space2, rates))

        def h(s: float) -> RnVector:
            return RnVector.of(space2, np.exp(rates * s)[:, None] * x.values)

        g = CurveSampler(space2, 2, 0.0, math.inf, h, bound=bound)
        res = improper_integral(g, L0Scalar.constant(space2, 2.0), 1e-9)
        want = (1.0 / (2.0 - rates))[:, None] * x.values
        np.testing.assert_allclose(res.value.values, want, atol=1e-8)

    def test_eta_below_xi_names_atom(self, space2):
        x = RnVector.of(space2, [[1.0, 0.0], [1.0, 0.0]])
        bound = ExponentialBound(l0_norm(x), L0Scalar.zero(space2))
        g = CurveSampler(space2, 2, 0.0, math.inf, lambda s: x, bound=bound)
        with pytest.raises(EtaNotInGxi) as exc:
            improper_integral(g, L0Scalar.of(space2, [2.0, -2.0]), 1e-9)
        assert exc.value.atom == 1

    def test_certificate_required(self, space2):
        x = RnVector.of(space2, [[1.0, 0.0], [1.0, 0.0]])
        g = CurveSampler(space2, 2, 0.0, math.inf, lambda s: x)
        with pytest.raises(CertificateMissing):
            improper_integral(g, L0Scalar.constant(space2, 2.0), 1e-9)


class TestCalculusTheorems:
    """Randomized curve families against the integral/derivative identities."""

    def setup_method(self):
        self.space = make_space([0.1, 0.2, 0.3, 0.4])
        self.rng = rng_for(11, "calculus-tests")

    def test_fundamental_theorem(self):
        for big_g, small_g in smooth_curve_family(self.rng, self.space, 3, n=6):
            res = riemann_integral(small_g, 0.0, 2.0, 1e-9)
            want = big_g(2.0).values - big_g(0.0).values
            gap = np.abs(res.value.values - want).max()
            assert gap <= 1e-8 * (1.0 + np.abs(want).max())

    def test_integral_norm_bound(self):
        for big_g, small_g in smooth_curve_family(self.rng, self.space, 3, n=6):
            vec = riemann_integral(small_g, 0.0, 2.0, 1e-9).value
            norm_curve = CurveSampler(
                self.space, 1,
                0.0, 2.0,
                lambda u: RnVector.of(
                    self.space, l0_norm(small_g(u)).values[:, None]
                ),
            )
            rhs = riemann_integral(norm_curve, 0.0, 2.0, 1e-9).value.values[:, 0]
            assert (l0_norm(vec).values <= rhs + 1e-8).all()

    def test_expectation_commutes_with_integral(self):
        probs = self.space.probs
        for _, small_g in smooth_curve_family(self.rng, self.space, 1, n=6):
            vec = riemann_integral(small_g, 0.0, 2.0, 1e-9).value.values[:, 0]
            mean_curve = CurveSampler(
                self.space, 1,
                0.0, 2.0,
                lambda u: RnVector.of(
                    self.space,
                    np.full((4, 1), float(probs @ small_g(u).values[:, 0])),
                ),
            )
            swapped = riemann_integral(mean_curve, 0.0, 2.0, 1e-9).value.values[0, 0]
            assert abs(float(probs @ vec) - swapped) <= 1e-7

    def test_indefinite_integral_derivative(self):
        for _, small_g in smooth_curve_family(self.rng, self.space, 2, n=4):
            def indefinite(l: float) -> RnVector:
                return riemann_integral(small_g, 0.0, l, 1e-10).value

            big = CurveSampler(self.space, 2, 0.0, 2.0, indefinite)
            mid = 1.1
            got = derivative(big, mid, 1e-4).values
            want = small_g(mid).values
            assert np.abs(got - want).max() <= 1e-6
