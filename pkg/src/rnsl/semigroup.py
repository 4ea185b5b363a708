"""Exponentially bounded operator families W with W(0) = C.

A family here satisfies C W(s+t) = W(t) W(s), starts at an injective C, and
grows no faster than M exp(xi t) per atom.  The canonical construction is
W(t) = exp(tA) C for a generator A commuting with C; sampled families wrap an
arbitrary evaluator behind the same checks.

The generator is recovered as C^{-1} of the derivative at 0, the resolvent
comes in two routes (a per-atom solve against (eta - A), and the transform
integral of the family), and a report verifies the generation conditions:
invertibility of eta - A, the power bounds ||(eta-A)^{-n} C|| <= M(eta-xi)^{-n},
commutation of A and C, and the integral representation of resolvent powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .calculus import CurveSampler, damped_weighted_integral, improper_integral
from .errors import (
    BoundViolated,
    EtaInSpectrum,
    EtaNotInGxi,
    InitialValueMismatch,
    NegativeTime,
    NonCommuting,
    NotInjective,
    SolveFailed,
    SpaceMismatch,
    DimMismatch,
    StepUnderflow,
)
from .l0 import L0Scalar, ProbabilitySpace
from .rn import (
    ExponentialBound,
    InjectivityReport,
    L0Operator,
    RnVector,
    check_injective,
    l0_norm,
    matrix_exp,
    op_apply,
    op_norm,
)

COMMUTE_TOL = 1e-10
TIME_ZERO_TOL = 1e-10
GROWTH_SAMPLES = 32
GROWTH_HORIZON = 10.0
GROWTH_SLACK = 1.0 + 1e-9
SPECTRUM_THRESHOLD = 1e-12
MIN_STEP = 1e-12
B4_DEFAULT_TOL = 1e-9
ABEL_RATE_SLACK = 1.5


@dataclass(frozen=True, eq=False)
class CSemigroup:
    """Validated family; ``kind`` tells how values are produced."""

    space: ProbabilitySpace
    dim: int
    C: L0Operator
    bound: ExponentialBound
    generator: L0Operator | None = None
    evaluator: Callable[[float], L0Operator] | None = None

    @property
    def kind(self) -> str:
        return "matrix_generated" if self.generator is not None else "sampled"

    def operator_at(self, t: float) -> L0Operator:
        if t < 0.0:
            raise NegativeTime(f"family parameter must be nonnegative, got {t!r}")
        if self.generator is not None:
            return matrix_exp(self.generator, t) @ self.C
        op = self.evaluator(t)
        if not isinstance(op, L0Operator):
            raise TypeError("family evaluator must return an L0Operator")
        if op.space != self.space or op.dim != self.dim:
            raise SpaceMismatch(f"family evaluator changed space/dim at t={t!r}")
        return op


def _frobenius_per_atom(mats: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("aij,aij->a", mats, mats))


def _require_injective(C: L0Operator) -> InjectivityReport:
    rep = check_injective(C)
    if not rep.injective:
        a = rep.witness_atom
        raise NotInjective(
            f"C is numerically singular on atom {a} "
            f"(singular value ratio {rep.min_sv_ratio[a]!r})",
            atom=a,
        )
    return rep


def _check_growth(
    family: Callable[[float], L0Operator], bound: ExponentialBound
) -> None:
    for t in np.linspace(0.0, GROWTH_HORIZON, GROWTH_SAMPLES):
        norms = op_norm(family(float(t))).values
        envelope = bound.envelope(float(t))
        bad = np.nonzero(norms > GROWTH_SLACK * envelope)[0]
        if bad.size:
            a = int(bad[0])
            raise BoundViolated(
                f"family norm {norms[a]!r} escapes its envelope {envelope[a]!r} "
                f"at t={float(t)!r} on atom {a}",
                atom=a,
                t=float(t),
            )


def make_matrix_semigroup(
    A: L0Operator, C: L0Operator, bound: ExponentialBound
) -> CSemigroup:
    """Build W(t) = exp(tA) C, validating injectivity, commutation, growth."""
    if A.space != C.space or A.space != bound.space:
        raise SpaceMismatch("A, C and the certificate must share one space")
    if A.dim != C.dim:
        raise DimMismatch(f"A has dim {A.dim}, C has dim {C.dim}")
    _require_injective(C)
    comm = _frobenius_per_atom(A.matrices @ C.matrices - C.matrices @ A.matrices)
    bad = np.nonzero(comm > COMMUTE_TOL)[0]
    if bad.size:
        a = int(bad[0])
        raise NonCommuting(
            f"A and C do not commute on atom {a} (gap {comm[a]!r})", atom=a
        )
    _check_growth(lambda t: matrix_exp(A, t) @ C, bound)
    return CSemigroup(A.space, A.dim, C, bound, generator=A)


def make_sampled_semigroup(
    space: ProbabilitySpace,
    dim: int,
    C: L0Operator,
    evaluator: Callable[[float], L0Operator],
    bound: ExponentialBound,
) -> CSemigroup:
    """Wrap an arbitrary evaluator behind the family checks."""
    if C.space != space or bound.space != space:
        raise SpaceMismatch("C and the certificate must live on the given space")
    if C.dim != dim:
        raise DimMismatch(f"C has dim {C.dim}, expected {dim}")
    _require_injective(C)
    w0 = evaluator(0.0)
    gap = _frobenius_per_atom(w0.matrices - C.matrices)
    bad = np.nonzero(gap > TIME_ZERO_TOL)[0]
    if bad.size:
        a = int(bad[0])
        raise InitialValueMismatch(
            f"family does not start at C on atom {a} (gap {gap[a]!r})", atom=a
        )
    _check_growth(evaluator, bound)
    return CSemigroup(space, dim, C, bound, evaluator=evaluator)


def evaluate(W: CSemigroup, t: float, x: RnVector) -> RnVector:
    """Apply the family member at parameter t to a vector."""
    return op_apply(W.operator_at(t), x)


def estimate_generator(W: CSemigroup, x: RnVector, h0: float) -> RnVector:
    """Richardson-extrapolated one-sided derivative at 0, then a C-solve.

    (W(h)x - Cx)/h has a first-order error term; combining h0 and h0/2 as
    2 D(h0/2) - D(h0) cancels it, and solving C y = limit recovers the
    generator's action on x.
    """
    if h0 < MIN_STEP:
        raise StepUnderflow(f"step {h0!r} is below the supported resolution {MIN_STEP}")
    cx = op_apply(W.C, x).values
    d1 = (evaluate(W, h0, x).values - cx) / h0
    d2 = (evaluate(W, 0.5 * h0, x).values - cx) / (0.5 * h0)
    limit = 2.0 * d2 - d1
    try:
        y = np.linalg.solve(W.C.matrices, limit[:, :, None])[:, :, 0]
    except np.linalg.LinAlgError as exc:
        raise SolveFailed(f"C-solve failed: {exc}") from None
    if not np.isfinite(y).all():
        raise SolveFailed("C-solve produced non-finite values")
    return RnVector.of(W.space, y)


def _coerce_eta(space: ProbabilitySpace, eta) -> L0Scalar:
    if isinstance(eta, L0Scalar):
        if eta.space != space:
            raise SpaceMismatch("eta lives on a different probability space")
        return eta
    return L0Scalar.constant(space, float(eta))


def _family_curve(W: CSemigroup, x: RnVector) -> CurveSampler:
    """Orbit t -> W(t)x with the induced per-atom certificate M ||x||."""
    cert = ExponentialBound(
        L0Scalar.of(W.space, W.bound.M.values * l0_norm(x).values), W.bound.xi
    )
    return CurveSampler(
        W.space, W.dim, 0.0, math.inf, lambda s: evaluate(W, s, x), bound=cert
    )


def c_resolvent_integral(W: CSemigroup, eta, x: RnVector, tol: float) -> RnVector:
    """Resolvent route through the transform of the orbit t -> W(t)x."""
    eta = _coerce_eta(W.space, eta)
    return improper_integral(_family_curve(W, x), eta, tol).value


def _shifted_inverse(A: L0Operator, eta: L0Scalar) -> np.ndarray:
    """(eta - A)^{-1} per atom, gated on the singular value ratio."""
    mats = eta.values[:, None, None] * np.eye(A.dim)[None, :, :] - A.matrices
    svals = np.linalg.svd(mats, compute_uv=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(svals[:, 0] > 0.0, svals[:, -1] / svals[:, 0], 0.0)
    bad = np.nonzero(ratio <= SPECTRUM_THRESHOLD)[0]
    if bad.size:
        a = int(bad[0])
        raise EtaInSpectrum(
            f"eta - A is numerically singular on atom {a} "
            f"(singular value ratio {ratio[a]!r})",
            atom=a,
        )
    return np.linalg.solve(mats, np.broadcast_to(np.eye(A.dim), mats.shape).copy())


def c_resolvent_direct(A: L0Operator, C: L0Operator, eta, x: RnVector) -> RnVector:
    """Resolvent route by per-atom solve: (eta - A) y = C x."""
    eta = _coerce_eta(A.space, eta)
    mats = eta.values[:, None, None] * np.eye(A.dim)[None, :, :] - A.matrices
    svals = np.linalg.svd(mats, compute_uv=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(svals[:, 0] > 0.0, svals[:, -1] / svals[:, 0], 0.0)
    bad = np.nonzero(ratio <= SPECTRUM_THRESHOLD)[0]
    if bad.size:
        a = int(bad[0])
        raise EtaInSpectrum(
            f"eta - A is numerically singular on atom {a} "
            f"(singular value ratio {ratio[a]!r})",
            atom=a,
        )
    rhs = op_apply(C, x).values
    return RnVector.of(A.space, np.linalg.solve(mats, rhs[:, :, None])[:, :, 0])


def resolvent_operator(A: L0Operator, C: L0Operator, eta) -> L0Operator:
    """(eta - A)^{-1} C as an operator."""
    eta = _coerce_eta(A.space, eta)
    inv = _shifted_inverse(A, eta)
    return L0Operator.of(A.space, inv @ C.matrices)


def transform_identity_gap(
    family: Callable[[float], L0Operator],
    A: L0Operator,
    C: L0Operator,
    bound: ExponentialBound,
    eta,
    x: RnVector,
    tol: float,
) -> float:
    """Worst-atom gap between the family's transform on x and the resolvent.

    Small gaps on a damping grid are the transform characterization of the
    family generated by (A, C); a perturbed family shows a visible gap.
    """
    eta = _coerce_eta(A.space, eta)
    cert = ExponentialBound(
        L0Scalar.of(A.space, bound.M.values * l0_norm(x).values), bound.xi
    )
    curve = CurveSampler(
        A.space, A.dim, 0.0, math.inf,
        lambda s: op_apply(family(s), x), bound=cert,
    )
    integral = improper_integral(curve, eta, tol).value
    direct = c_resolvent_direct(A, C, eta, x)
    return float(l0_norm(integral - direct).values.max())


def yosida_approximant(
    A: L0Operator, C: L0Operator, eta, t: float, x: RnVector
) -> RnVector:
    """Bounded-generator surrogate exp(-eta t) exp(eta^2 (eta-A)^{-1} t) C x.

    The two exponentials commute, so they are combined into one exponent
    eta A (eta - A)^{-1} before calling the matrix exponential; this is
    algebraically identical and keeps every intermediate within range even
    for large eta * t.
    """
    if t < 0.0:
        raise NegativeTime(f"approximant time must be nonnegative, got {t!r}")
    eta = _coerce_eta(A.space, eta)
    inv = _shifted_inverse(A, eta)
    yosida = L0Operator.of(
        A.space, eta.values[:, None, None] * (A.matrices @ inv)
    )
    return op_apply(matrix_exp(yosida, t) @ C, x)


@dataclass(frozen=True)
class AbelLimitReport:
    """Convergence of eta * resolvent toward C along an increasing grid."""

    etas: tuple[L0Scalar, ...]
    gaps: np.ndarray  # shape (n_etas, n_atoms)
    max_gaps: tuple[float, ...]
    decreasing: bool
    envelope_ok: bool
    passed: bool


def abel_limit_check(
    A: L0Operator,
    C: L0Operator,
    bound: ExponentialBound,
    x: RnVector,
    eta_sequence: Sequence,
) -> AbelLimitReport:
    """Check eta R(eta) x -> C x with the proof's 1/(eta - xi) rate.

    The verdict needs the per-eta gaps to be nonincreasing and the last gap
    to satisfy last <= first * (eta_1 - xi)/(eta_last - xi) * 1.5 per atom.
    """
    etas = [_coerce_eta(A.space, e) for e in eta_sequence]
    if len(etas) < 2:
        raise ValueError("the damping sequence needs at least two points")
    xi = bound.xi.values
    prev = None
    for eta in etas:
        margin = eta.values - xi
        bad = np.nonzero(margin <= 0.0)[0]
        if bad.size:
            a = int(bad[0])
            raise EtaNotInGxi(
                f"eta={eta.values[a]!r} does not dominate xi={xi[a]!r} on atom {a}",
                atom=a,
            )
        if prev is not None and not (eta.values > prev).all():
            raise ValueError("the damping sequence must increase strictly per atom")
        prev = eta.values
    cx = op_apply(C, x)
    gaps = np.empty((len(etas), A.space.n_atoms))
    for i, eta in enumerate(etas):
        approx = c_resolvent_direct(A, C, eta, x).module_mul(eta)
        gaps[i] = l0_norm(approx - cx).values
    max_gaps = gaps.max(axis=1)
    slack = 1e-12 * (1.0 + max_gaps[0])
    decreasing = bool(np.all(np.diff(max_gaps) <= slack))
    first_margin = etas[0].values - xi
    last_margin = etas[-1].values - xi
    envelope = gaps[0] * (first_margin / last_margin) * ABEL_RATE_SLACK
    envelope_ok = bool(np.all(gaps[-1] <= envelope + 1e-14))
    return AbelLimitReport(
        etas=tuple(etas),
        gaps=gaps,
        max_gaps=tuple(float(v) for v in max_gaps),
        decreasing=decreasing,
        envelope_ok=envelope_ok,
        passed=decreasing and envelope_ok,
    )


@dataclass(frozen=True)
class PowerRow:
    """One (eta, n) line of the power-bound ladder."""

    n: int
    norms: np.ndarray
    bounds: np.ndarray
    worst_atom: int
    gap: float  # max over atoms of norm - bound
    passed: bool


@dataclass(frozen=True)
class RouteRow:
    """Resolvent power by direct solve vs by weighted transform integral."""

    n: int
    direct: np.ndarray
    integral: np.ndarray
    gap: float
    passed: bool


@dataclass(frozen=True)
class ResolventEntry:
    eta: L0Scalar
    min_sv_ratio: np.ndarray
    invertible: bool
    power_rows: tuple[PowerRow, ...]
    route_rows: tuple[RouteRow, ...]


@dataclass(frozen=True)
class ResolventReport:
    """Generation-condition checks for a candidate pair (A, C) plus bound."""

    entries: tuple[ResolventEntry, ...]
    commutation_gap: np.ndarray
    commutation_ok: bool
    b4_tol: float
    route_tol: float
    passed: bool

    def b4_rows(self):
        """Worst-atom ladder rows (eta, n, norm, bound, pass) for export."""
        rows = []
        for e in self.entries:
            eta_repr = float(e.eta.values.max())
            for row in e.power_rows:
                a = row.worst_atom
                rows.append(
                    (eta_repr, row.n, float(row.norms[a]), float(row.bounds[a]),
                     row.passed)
                )
        return rows

    def to_json_dict(self) -> dict:
        return {
            "commutation_gap": [float(v) for v in self.commutation_gap],
            "commutation_ok": self.commutation_ok,
            "b4_tol": self.b4_tol,
            "route_tol": self.route_tol,
            "passed": self.passed,
            "entries": [
                {
                    "eta": [float(v) for v in e.eta.values],
                    "min_sv_ratio": [float(v) for v in e.min_sv_ratio],
                    "invertible": e.invertible,
                    "power_rows": [
                        {
                            "n": r.n,
                            "norms": [float(v) for v in r.norms],
                            "bounds": [float(v) for v in r.bounds],
                            "worst_atom": r.worst_atom,
                            "gap": r.gap,
                            "passed": r.passed,
                        }
                        for r in e.power_rows
                    ],
                    "route_rows": [
                        {
                            "n": r.n,
                            "gap": r.gap,
                            "passed": r.passed,
                        }
                        for r in e.route_rows
                    ],
                }
                for e in self.entries
            ],
        }


def hille_yosida_report(
    A: L0Operator,
    C: L0Operator,
    bound: ExponentialBound,
    eta_grid: Sequence,
    n_max: int,
    probe: RnVector | None = None,
    b4_tol: float = B4_DEFAULT_TOL,
    route_tol: float = 1e-6,
    quad_tol: float = 1e-8,
) -> ResolventReport:
    """Measure the generation conditions on a damping grid.

    The family is evaluated as exp(tA) C without re-validating the growth
    certificate: a wrong certificate is exactly what the power-bound ladder
    must expose rather than a constructor reject.  An empty grid yields an
    empty report that passes vacuously on the per-eta rows.
    """
    if A.space != C.space or A.space != bound.space:
        raise SpaceMismatch("A, C and the certificate must share one space")
    if A.dim != C.dim:
        raise DimMismatch(f"A has dim {A.dim}, C has dim {C.dim}")
    if n_max < 1:
        raise ValueError("the ladder needs n_max >= 1")
    if probe is None:
        coords = np.zeros(A.dim)
        coords[0] = 1.0
        probe = RnVector.constant(A.space, coords)
    comm = _frobenius_per_atom(A.matrices @ C.matrices - C.matrices @ A.matrices)
    commutation_ok = bool(comm.max() <= COMMUTE_TOL)
    xi = bound.xi.values
    M = bound.M.values
    probe_curve = CurveSampler(
        A.space, A.dim, 0.0, math.inf,
        lambda s: op_apply(matrix_exp(A, s) @ C, probe),
        bound=ExponentialBound(
            L0Scalar.of(A.space, M * l0_norm(probe).values), bound.xi
        ),
    )
    entries = []
    all_ok = commutation_ok
    for eta_raw in eta_grid:
        eta = _coerce_eta(A.space, eta_raw)
        margin = eta.values - xi
        bad = np.nonzero(margin <= 0.0)[0]
        if bad.size:
            a = int(bad[0])
            raise EtaNotInGxi(
                f"eta={eta.values[a]!r} does not dominate xi={xi[a]!r} on atom {a}",
                atom=a,
            )
        mats = eta.values[:, None, None] * np.eye(A.dim)[None, :, :] - A.matrices
        svals = np.linalg.svd(mats, compute_uv=False)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(svals[:, 0] > 0.0, svals[:, -1] / svals[:, 0], 0.0)
        invertible = bool((ratio > SPECTRUM_THRESHOLD).all())
        power_rows: list[PowerRow] = []
        route_rows: list[RouteRow] = []
        if invertible:
            inv = np.linalg.solve(
                mats, np.broadcast_to(np.eye(A.dim), mats.shape).copy()
            )
            power = C.matrices
            for n in range(1, n_max + 1):
                power = inv @ power
                norms = op_norm(L0Operator.of(A.space, power)).values
                bounds = M * margin ** (-float(n))
                diffs = norms - bounds
                worst = int(np.argmax(diffs))
                power_rows.append(
                    PowerRow(
                        n=n,
                        norms=norms,
                        bounds=bounds,
                        worst_atom=worst,
                        gap=float(diffs[worst]),
                        passed=bool((diffs <= b4_tol).all()),
                    )
                )
                if n <= 3:
                    direct = np.einsum("aij,aj->ai", power, probe.values)
                    res = damped_weighted_integral(
                        probe_curve, eta, n - 1,
                        quad_tol * np.exp(-_power_log_scale(n - 1, eta.values)),
                    )
                    integral = (
                        np.exp(res.log_scale)[:, None] * res.scaled_value.values
                        / math.factorial(n - 1)
                    )
                    gap = float(
                        np.sqrt(((direct - integral) ** 2).sum(axis=1)).max()
                    )
                    route_rows.append(
                        RouteRow(
                            n=n,
                            direct=direct,
                            integral=integral,
                            gap=gap,
                            passed=gap <= route_tol,
                        )
                    )
        entry = ResolventEntry(
            eta=eta,
            min_sv_ratio=ratio,
            invertible=invertible,
            power_rows=tuple(power_rows),
            route_rows=tuple(route_rows),
        )
        entries.append(entry)
        all_ok = all_ok and invertible
        all_ok = all_ok and all(r.passed for r in power_rows)
        all_ok = all_ok and all(r.passed for r in route_rows)
    return ResolventReport(
        entries=tuple(entries),
        commutation_gap=comm,
        commutation_ok=commutation_ok,
        b4_tol=float(b4_tol),
        route_tol=float(route_tol),
        passed=all_ok,
    )


def _power_log_scale(k: int, eta_values: np.ndarray) -> np.ndarray:
    if k >= 1:
        return k * np.log(k / eta_values) - k
    return np.zeros_like(eta_values)
