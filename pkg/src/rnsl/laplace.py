"""Laplace transforms of certified curves, their derivatives, and inversion.

The transform of a curve h with ||h(s)|| <= M exp(xi s) exists for any
damping eta above xi on every atom, and satisfies ||H(eta)|| <= M/(eta - xi).
Derivatives in eta are computed from the weighted integral with the factor
(-s)^k, never by differencing.  Inversion uses the approximants

    (-1)^k (k/t)^(k+1) / k! * H^(k)(k/t)  ->  h(t)   as k -> inf,

whose two factors separately leave the double range near k = 170; both are
therefore carried in log space and only their combination is exponentiated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .calculus import CurveSampler, damped_weighted_integral
from .errors import (
    BoundViolated,
    CertificateMissing,
    CoefficientOverflow,
    DimMismatch,
    NonPositiveTime,
    SpaceMismatch,
)
from .l0 import L0Scalar, ProbabilitySpace
from .rn import RnVector, l0_norm, vector_distance

BOUND_CHECK_POINTS = 64
BOUND_CHECK_RANGE = (1e-3, 1e2)
BOUND_CHECK_SLACK = 1.0 + 1e-9
_LOG_DOUBLE_MAX = 709.0


@dataclass(frozen=True)
class LaplaceSpec:
    """A transformable curve: domain [0, inf) plus a growth certificate.

    Construction samples the curve at 64 log-spaced times and rejects a
    certificate the samples already escape (with slack 1 + 1e-9 for roundoff).
    """

    curve: CurveSampler

    def __post_init__(self) -> None:
        c = self.curve
        if c.start != 0.0 or not math.isinf(c.end):
            raise ValueError("a transformable curve must live on [0, inf)")
        if c.bound is None:
            raise CertificateMissing("a transformable curve needs a certificate")
        lo, hi = BOUND_CHECK_RANGE
        for s in np.geomspace(lo, hi, BOUND_CHECK_POINTS):
            norms = l0_norm(c(float(s))).values
            envelope = c.bound.envelope(float(s))
            bad = np.nonzero(norms > BOUND_CHECK_SLACK * envelope)[0]
            if bad.size:
                a = int(bad[0])
                raise BoundViolated(
                    f"curve norm {norms[a]!r} escapes its envelope "
                    f"{envelope[a]!r} at s={float(s)!r} on atom {a}",
                    atom=a,
                    t=float(s),
                )

    @property
    def space(self) -> ProbabilitySpace:
        return self.curve.space

    @property
    def dim(self) -> int:
        return self.curve.dim

    @property
    def bound(self):
        return self.curve.bound


def make_laplace_spec(curve: CurveSampler) -> LaplaceSpec:
    return LaplaceSpec(curve)


def _coerce_eta(space: ProbabilitySpace, eta) -> L0Scalar:
    if isinstance(eta, L0Scalar):
        if eta.space != space:
            raise SpaceMismatch("eta lives on a different probability space")
        return eta
    return L0Scalar.constant(space, float(eta))


def laplace_transform(spec: LaplaceSpec, eta, tol: float) -> RnVector:
    """H(eta) = integral of exp(-eta s) h(s) ds over [0, inf)."""
    eta = _coerce_eta(spec.space, eta)
    res = damped_weighted_integral(spec.curve, eta, 0, float(tol))
    return res.scaled_value


def laplace_derivative_scaled(
    spec: LaplaceSpec, eta, k: int, tol: float
) -> tuple[RnVector, np.ndarray]:
    """k-th derivative of the transform in scaled form.

    Returns (mantissa, log_scale) with H^(k)(eta) = exp(log_scale) * mantissa
    per atom; the mantissa carries the (-1)^k sign.  ``tol`` is relative to
    the certificate envelope of the weighted integral.
    """
    eta = _coerce_eta(spec.space, eta)
    bound = spec.bound
    gamma = eta.values - bound.xi.values
    if k == 0:
        log_env = -np.log(np.where(gamma > 0.0, gamma, 1.0))
    else:
        log_env = (
            math.lgamma(k + 1.0)
            - (k + 1.0) * np.log(np.where(gamma > 0.0, gamma, 1.0))
            - (k * np.log(k / eta.values) - k)
        )
    with np.errstate(over="ignore"):
        env = bound.M.values * np.exp(np.minimum(log_env, _LOG_DOUBLE_MAX))
    tol_scaled = np.where(env > 0.0, float(tol) * env, 1.0)
    res = damped_weighted_integral(spec.curve, eta, k, tol_scaled)
    sign = -1.0 if k % 2 else 1.0
    return res.scaled_value.scale(sign), res.log_scale


def laplace_derivative(spec: LaplaceSpec, eta, k: int, tol: float) -> RnVector:
    """k-th derivative of the transform as plain numbers (moderate k only)."""
    mantissa, log_scale = laplace_derivative_scaled(spec, eta, k, tol)
    vals = mantissa.values
    with np.errstate(divide="ignore"):
        mag = np.where(vals != 0.0, np.log(np.abs(vals)), -np.inf)
    total = log_scale[:, None] + mag
    if np.any(total > _LOG_DOUBLE_MAX):
        raise CoefficientOverflow(
            "transform derivative exceeds the double range; "
            "use the scaled form instead"
        )
    return RnVector.of(spec.space, np.sign(vals) * np.exp(total))


@dataclass(frozen=True)
class TransformDerivativeProvider:
    """Source of transform derivatives (eta, k) -> H^(k)(eta).

    ``raw`` returns plain values.  The optional ``scaled`` route returns
    (mantissa, per-atom log scale) and is what keeps inversion alive at large
    k, where plain values leave the double range.
    """

    space: ProbabilitySpace
    dim: int
    raw: Callable[[L0Scalar, int], RnVector]
    scaled: Callable[[L0Scalar, int], tuple[RnVector, np.ndarray]] | None = None

    def _validate(self, v: RnVector) -> RnVector:
        if v.space != self.space:
            raise SpaceMismatch("provider output lives on a different space")
        if v.dim != self.dim:
            raise DimMismatch(f"provider output has dim {v.dim}, expected {self.dim}")
        return v

    def derivative(self, eta, k: int) -> RnVector:
        eta = _coerce_eta(self.space, eta)
        return self._validate(self.raw(eta, k))

    def scaled_derivative(self, eta, k: int) -> tuple[RnVector, np.ndarray]:
        eta = _coerce_eta(self.space, eta)
        if self.scaled is None:
            v = self._validate(self.raw(eta, k))
            return v, np.zeros(self.space.n_atoms)
        mantissa, log_scale = self.scaled(eta, k)
        self._validate(mantissa)
        log_scale = np.asarray(log_scale, dtype=float)
        if log_scale.shape != (self.space.n_atoms,):
            raise SpaceMismatch("provider log scale has the wrong shape")
        return mantissa, log_scale


def provider_from_curve(spec: LaplaceSpec, tol: float) -> TransformDerivativeProvider:
    """Adapter computing derivatives of a curve's transform by quadrature."""
    return TransformDerivativeProvider(
        space=spec.space,
        dim=spec.dim,
        raw=lambda eta, k: laplace_derivative(spec, eta, k, tol),
        scaled=lambda eta, k: laplace_derivative_scaled(spec, eta, k, tol),
    )


def post_widder(provider: TransformDerivativeProvider, t: float, k: int) -> RnVector:
    """k-th inversion approximant at time t > 0.

    Evaluates (-1)^k (k/t)^(k+1) / k! * H^(k)(k/t) with the coefficient
    assembled as (k+1)*log(k/t) - lgamma(k+1) and combined with the log scale
    of the derivative, so nothing overflows before the final exponential.
    """
    if not (t > 0.0) or not math.isfinite(t):
        raise NonPositiveTime(f"inversion time must be positive, got {t!r}")
    if k < 1 or k != int(k):
        raise ValueError(f"approximant order must be a positive integer, got {k!r}")
    k = int(k)
    eta = L0Scalar.constant(provider.space, k / t)
    mantissa, log_scale = provider.scaled_derivative(eta, k)
    log_coef = (k + 1.0) * math.log(k / t) - math.lgamma(k + 1.0)
    vals = mantissa.values
    with np.errstate(divide="ignore"):
        mag = np.where(vals != 0.0, np.log(np.abs(vals)), -np.inf)
    total = (log_coef + log_scale)[:, None] + mag
    if np.any(total > _LOG_DOUBLE_MAX):
        raise CoefficientOverflow(
            f"approximant at k={k}, t={t!r} exceeds the double range "
            "even in log-space assembly"
        )
    sign = -1.0 if k % 2 else 1.0
    return RnVector.of(provider.space, sign * np.sign(vals) * np.exp(total))


@dataclass(frozen=True)
class TransformEqualityReport:
    equal: bool
    gaps: tuple[float, ...]
    worst_index: int
    worst_eta: L0Scalar
    worst_gap: float
    tol: float


def transforms_equal(
    spec1: LaplaceSpec,
    spec2: LaplaceSpec,
    eta_grid: Sequence,
    tol: float,
) -> TransformEqualityReport:
    """Compare two transforms on a damping grid.

    Each transform is computed to tol/4 so quadrature error cannot push a
    genuinely equal pair past the verdict threshold.  The report names the
    grid point with the largest per-atom gap as the witness.
    """
    if spec1.space != spec2.space:
        raise SpaceMismatch("curves live on different probability spaces")
    if spec1.dim != spec2.dim:
        raise DimMismatch("curves have different dimensions")
    etas = [_coerce_eta(spec1.space, e) for e in eta_grid]
    if not etas:
        raise ValueError("the damping grid must be nonempty")
    gaps = []
    for eta in etas:
        h1 = laplace_transform(spec1, eta, tol / 4.0)
        h2 = laplace_transform(spec2, eta, tol / 4.0)
        gaps.append(vector_distance(h1, h2, "locally_convex"))
    worst = int(np.argmax(gaps))
    return TransformEqualityReport(
        equal=bool(max(gaps) <= tol),
        gaps=tuple(gaps),
        worst_index=worst,
        worst_eta=etas[worst],
        worst_gap=float(gaps[worst]),
        tol=float(tol),
    )
