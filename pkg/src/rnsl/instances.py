"""Deterministic random instances and fixed test families for the suites.

Everything here is seeded: the same (seed, label) pair always produces the
same instances, which is what makes scenario reports reproducible byte for
byte.  Commuting operator pairs are built from a shared per-atom eigenbasis,
so their growth certificates are exact by construction, not sampled.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

from .calculus import CurveSampler
from .l0 import L0Scalar, ProbabilitySpace
from .laplace import LaplaceSpec, TransformDerivativeProvider
from .rn import ExponentialBound, L0Operator, RnVector


def rng_for(seed: int, label: str) -> np.random.Generator:
    """Independent, platform-stable stream for a given seed and label."""
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    key = int.from_bytes(digest[:8], "big")
    return np.random.default_rng(np.random.SeedSequence(entropy=[int(seed), key]))


def random_scalar(
    rng: np.random.Generator, space: ProbabilitySpace, lo: float, hi: float
) -> L0Scalar:
    return L0Scalar.of(space, rng.uniform(lo, hi, space.n_atoms))


def random_vector(
    rng: np.random.Generator, space: ProbabilitySpace, dim: int, lo: float, hi: float
) -> RnVector:
    return RnVector.of(space, rng.uniform(lo, hi, (space.n_atoms, dim)))


def random_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def random_commuting_pair(
    rng: np.random.Generator,
    space: ProbabilitySpace,
    dim: int,
    spec_lo: float = -2.0,
    spec_hi: float = 0.5,
    c_lo: float = 0.5,
    c_hi: float = 2.0,
):
    """Commuting (A, C) with a tight certificate.

    Per atom both operators are diagonal in one random orthogonal basis, so
    exp(tA) C has norm max_i c_i exp(t a_i) <= (max c) exp(t max a); the
    returned certificate uses exactly those constants.
    """
    n = space.n_atoms
    a_mats = np.empty((n, dim, dim))
    c_mats = np.empty((n, dim, dim))
    xi = np.empty(n)
    big = np.empty(n)
    for atom in range(n):
        q = random_orthogonal(rng, dim)
        a_eigs = rng.uniform(spec_lo, spec_hi, dim)
        c_eigs = rng.uniform(c_lo, c_hi, dim)
        a_mats[atom] = (q * a_eigs) @ q.T
        c_mats[atom] = (q * c_eigs) @ q.T
        xi[atom] = a_eigs.max()
        big[atom] = np.abs(c_eigs).max()
    A = L0Operator.of(space, a_mats)
    C = L0Operator.of(space, c_mats)
    bound = ExponentialBound(L0Scalar.of(space, big), L0Scalar.of(space, xi))
    return A, C, bound


def smooth_curve_family(
    rng: np.random.Generator,
    space: ProbabilitySpace,
    dim: int,
    n: int = 10,
    span: float = 2.0,
):
    """Curves with closed-form antiderivatives for fundamental-theorem checks.

    Each entry is (antiderivative G, derivative G') as curve samplers on
    [0, span], built from sine, exponential, and cubic parts with random
    coefficient vectors.
    """
    members = []
    for _ in range(n):
        w = float(rng.uniform(0.5, 3.0))
        al = float(rng.uniform(-1.0, 0.8))
        x = rng.uniform(-1.0, 1.0, (space.n_atoms, dim))
        y = rng.uniform(-1.0, 1.0, (space.n_atoms, dim))
        z = rng.uniform(-1.0, 1.0, (space.n_atoms, dim))

        def big_g(u: float, w=w, al=al, x=x, y=y, z=z) -> RnVector:
            return RnVector.of(
                space, math.sin(w * u) * x + math.exp(al * u) * y + u**3 * z
            )

        def small_g(u: float, w=w, al=al, x=x, y=y, z=z) -> RnVector:
            return RnVector.of(
                space,
                w * math.cos(w * u) * x + al * math.exp(al * u) * y + 3.0 * u**2 * z,
            )

        members.append(
            (
                CurveSampler(space, dim, 0.0, span, big_g),
                CurveSampler(space, dim, 0.0, span, small_g),
            )
        )
    return members


def oscillating_decay_specs(
    rng: np.random.Generator, space: ProbabilitySpace, dim: int, n: int = 20
):
    """Transformable curves exp(a s)(cos(w s) X + sin(w s) Y) per atom.

    The certificate M = ||X|| + ||Y||, xi = a holds by the triangle
    inequality, so construction-time validation always accepts these.
    """
    specs = []
    for _ in range(n):
        a = rng.uniform(-1.0, 0.5, space.n_atoms)
        w = float(rng.uniform(0.5, 4.0))
        x = rng.uniform(-1.0, 1.0, (space.n_atoms, dim))
        y = rng.uniform(-1.0, 1.0, (space.n_atoms, dim))
        m = np.sqrt((x**2).sum(axis=1)) + np.sqrt((y**2).sum(axis=1))

        def h(s: float, a=a, w=w, x=x, y=y) -> RnVector:
            return RnVector.of(
                space,
                np.exp(a * s)[:, None]
                * (math.cos(w * s) * x + math.sin(w * s) * y),
            )

        curve = CurveSampler(
            space, dim, 0.0, math.inf, h,
            bound=ExponentialBound(L0Scalar.of(space, m), L0Scalar.of(space, a)),
        )
        specs.append(LaplaceSpec(curve))
    return specs


def constant_transform_provider(x: RnVector) -> TransformDerivativeProvider:
    """Closed-form transform derivatives of the constant curve h = x.

    H(eta) = x/eta, so the k-th derivative is (-1)^k k! x / eta^(k+1); in
    scaled form the log factor cancels the inversion coefficient exactly,
    which is what makes constants reproducible at any order.
    """

    def raw(eta: L0Scalar, k: int) -> RnVector:
        sign = -1.0 if k % 2 else 1.0
        mag = np.exp(math.lgamma(k + 1.0) - (k + 1.0) * np.log(eta.values))
        return RnVector.of(x.space, sign * mag[:, None] * x.values)

    def scaled(eta: L0Scalar, k: int):
        sign = -1.0 if k % 2 else 1.0
        log_scale = math.lgamma(k + 1.0) - (k + 1.0) * np.log(eta.values)
        return x.scale(sign), log_scale

    return TransformDerivativeProvider(x.space, x.dim, raw, scaled)


def inversion_test_family(space: ProbabilitySpace, dim: int):
    """Fixed bounded curves for inversion checks: (name, spec, time evaluator).

    Contains a constant, two exponential decays, and a sine-modulated decay;
    all are bounded, so their certificates use xi <= 0.
    """
    coords = np.full(dim, 1.0 / math.sqrt(dim))
    x = RnVector.constant(space, coords)
    norm = 1.0

    def curve(evaluator, m: float, xi: float) -> LaplaceSpec:
        return LaplaceSpec(
            CurveSampler(
                space, dim, 0.0, math.inf, evaluator,
                bound=ExponentialBound.constant(space, m, xi),
            )
        )

    members = [
        ("constant", curve(lambda s: x, norm, 0.0), lambda t: x),
        (
            "decay_1",
            curve(lambda s: x.scale(math.exp(-s)), norm, -1.0),
            lambda t: x.scale(math.exp(-t)),
        ),
        (
            "decay_half",
            curve(lambda s: x.scale(math.exp(-0.5 * s)), norm, -0.5),
            lambda t: x.scale(math.exp(-0.5 * t)),
        ),
        (
            "modulated",
            curve(
                lambda s: x.scale(math.exp(-s) * (1.0 + 0.5 * math.sin(s))),
                1.5 * norm,
                -1.0,
            ),
            lambda t: x.scale(math.exp(-t) * (1.0 + 0.5 * math.sin(t))),
        ),
    ]
    return members
