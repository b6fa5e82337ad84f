"""Closed forms versus first-principles computations, point by point."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .classifier import SamplePlan, cyclic_sum, sample_points
from .connection import (christoffel_closed, christoffel_generic,
                         covariant_derivative_02, covariant_derivative_11,
                         metric_partials)
from .fundamental import (f_closed, f_oracle, nijenhuis, theta_closed,
                          theta_oracle)
from .manifold import (METRIC_PATTERN, MetricSpec, PointJetBundle, bundle_at,
                       inverse_closed, inverse_numeric, metric_at, p_matrix,
                       relative_deviation)


def _max_abs(x) -> float:
    return float(np.max(np.abs(x), initial=0.0))


def inverse_identity(b: PointJetBundle) -> float:
    ginv, _ = inverse_closed(b)
    return _max_abs(metric_at(b) @ ginv - np.eye(4))


def inverse_vs_numeric(b: PointJetBundle) -> float:
    ginv, _ = inverse_closed(b)
    return relative_deviation(ginv, inverse_numeric(metric_at(b)))


def christoffel_vs_generic(b: PointJetBundle) -> float:
    return relative_deviation(christoffel_closed(b).gamma, christoffel_generic(b).gamma)


def f_vs_oracle(b: PointJetBundle) -> float:
    return relative_deviation(f_closed(b).F, f_oracle(b).F)


def theta_vs_contraction(b: PointJetBundle) -> float:
    oracle = theta_oracle(f_oracle(b), inverse_numeric(metric_at(b)))
    return relative_deviation(theta_closed(b).theta, oracle.theta)


def nijenhuis_zero(b: PointJetBundle) -> float:
    return _max_abs(nijenhuis(b))


def metric_compatibility(b: PointJetBundle) -> float:
    nabla_g = covariant_derivative_02(METRIC_PATTERN, b)
    return _max_abs(nabla_g) / (1.0 + _max_abs(metric_partials(b)))


def f_symmetries(b: PointJetBundle) -> float:
    F = f_oracle(b).F
    P = p_matrix()
    swap = F - F.transpose(0, 2, 1)
    anti = np.einsum("iab,ja,kb->ijk", F, P, P) + F
    return max(_max_abs(swap), _max_abs(anti)) / (1.0 + _max_abs(F))


def nabla_p_vs_f(b: PointJetBundle) -> float:
    """g((nabla_i P) e_j, e_k) against the closed-form F."""
    nabla_p = covariant_derivative_11(p_matrix(), b)
    lowered = np.einsum("ija,ak->ijk", nabla_p, metric_at(b))
    return relative_deviation(lowered, f_closed(b).F)


def cyclic_identity(b: PointJetBundle) -> float:
    F = f_oracle(b).F
    return _max_abs(cyclic_sum(F)) / (1.0 + _max_abs(F))


@dataclass(frozen=True)
class Check:
    name: str
    func: Callable[[PointJetBundle], float]
    tolerance: float
    description: str


CHECKS = (
    Check("inverse_identity", inverse_identity, 1e-10, "g * closed-form inverse = I"),
    Check("inverse_vs_numeric", inverse_vs_numeric, 1e-10, "closed-form inverse vs LU inverse"),
    Check("christoffel_vs_generic", christoffel_vs_generic, 1e-9, "closed-form Christoffel vs generic"),
    Check("f_vs_oracle", f_vs_oracle, 1e-9, "closed-form F vs nabla g~"),
    Check("theta_vs_contraction", theta_vs_contraction, 1e-9, "closed-form theta vs g^ij F_ijk"),
    Check("nijenhuis_zero", nijenhuis_zero, 1e-12, "Nijenhuis tensor of P"),
    Check("metric_compatibility", metric_compatibility, 1e-10, "nabla g = 0"),
    Check("f_symmetries", f_symmetries, 1e-10, "F_ijk = F_ikj and F(x,Py,Pz) = -F(x,y,z)"),
    Check("nabla_p_vs_f", nabla_p_vs_f, 1e-9, "g((nabla P) y, z) vs closed-form F"),
    Check("cyclic_identity", cyclic_identity, 1e-9, "F(x,y,Pz) + F(y,z,Px) + F(z,x,Py) = 0"),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_deviation: float
    tolerance: float
    worst_point: tuple[float, ...]

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def run_checks(spec: MetricSpec, points: Sequence[Sequence[float]],
               tolerance: float | None = None,
               checks: Sequence[Check] = CHECKS) -> list[CheckResult]:
    """Worst deviation of every check over ``points``.

    ``tolerance`` replaces each check's own tolerance when given.
    """
    bundles = [bundle_at(spec, p) for p in points]
    out = []
    for chk in checks:
        worst, where = 0.0, bundles[0].p
        for b in bundles:
            dev = chk.func(b)
            if not dev <= worst:
                worst, where = dev, b.p
        out.append(CheckResult(chk.name, worst, chk.tolerance if tolerance is None else tolerance,
                               where))
    return out


def verify_metric(spec: MetricSpec, plan: SamplePlan = SamplePlan(),
                  tolerance: float | None = None) -> list[CheckResult]:
    return run_checks(spec, sample_points(spec, plan), tolerance)
