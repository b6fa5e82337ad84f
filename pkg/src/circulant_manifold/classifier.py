"""Class membership of (M, g, P) from sampled points.

Two independent routes are evaluated at each point:

* derivative predicates: the equalities between A, B, C and their first
  partials that characterise each class;
* identity residuals: the defining tensor identities for F and theta,
  checked on all basis triples with F and theta from the connection.

A residual is reported both in absolute terms and relative to
``1 + max|term|``; verdicts use the relative value with two thresholds,
``hold`` and ``reject``.  Anything between the two is indeterminate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .connection import christoffel_generic, covariant_derivative_11
from .errors import CirculantError, EmptySampleError
from .expr import Point4, satisfies
from .fundamental import f_oracle, nijenhuis, theta_oracle, theta_tilde
from .manifold import (MetricSpec, PointJetBundle, associated_metric_at,
                       bundle_at, inverse_numeric, metric_at, p_matrix,
                       q_matrix)

CLASS_IDS = ("W0", "W3bar", "W6bar", "W1", "W2", "W1plusW2", "nablaQ0")

# tensor identity characterising each class
CLASS_IDENTITY = {
    "W0": "c0", "W1": "c1", "W3bar": "sub3c1", "W6bar": "sub6c1",
    "W2": "c2", "W1plusW2": "c3", "nablaQ0": "nablaQ",
}

# W1 = W3bar + W6bar, and W1 + W2 on top; a class is the set of its parts
_PARTS = {
    "W0": frozenset(),
    "W3bar": frozenset({"3"}),
    "W6bar": frozenset({"6"}),
    "W1": frozenset({"3", "6"}),
    "W2": frozenset({"2"}),
    "W1plusW2": frozenset({"3", "6", "2"}),
}
_LABEL = {parts: name for name, parts in _PARTS.items()}

DEFAULT_SEED = 20190417
DEFAULT_SAMPLES = 100
HOLD_TOLERANCE = 1e-9
REJECT_MARGIN = 1e-6


@dataclass(frozen=True)
class Residual:
    absolute: float
    relative: float

    @classmethod
    def of_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "Residual":
        """Worst violation over equalities ``lhs = rhs``."""
        ab = rel = 0.0
        for lhs, rhs in pairs:
            d = abs(lhs - rhs)
            ab = max(ab, d)
            rel = max(rel, d / (1.0 + max(abs(lhs), abs(rhs))))
        return cls(ab, rel)

    @classmethod
    def of_arrays(cls, lhs, rhs=0.0, scale: float | None = None) -> "Residual":
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.broadcast_to(np.asarray(rhs, dtype=float), lhs.shape)
        d = float(np.max(np.abs(lhs - rhs), initial=0.0))
        if scale is None:
            scale = max(float(np.max(np.abs(lhs), initial=0.0)),
                        float(np.max(np.abs(rhs), initial=0.0)))
        return cls(d, d / (1.0 + scale))

    def __or__(self, other: "Residual") -> "Residual":
        return Residual(max(self.absolute, other.absolute), max(self.relative, other.relative))


ZERO = Residual(0.0, 0.0)


# --------------------------------------------------------------------------
# Derivative predicates
# --------------------------------------------------------------------------

def _jets(b: PointJetBundle):
    a, bb, c = b.values
    return a, bb, c, (lambda i: b.d("A", i)), (lambda i: b.d("B", i)), (lambda i: b.d("C", i))


def predicate_w0(b: PointJetBundle) -> Residual:
    _, _, _, A, B, C = _jets(b)
    return Residual.of_pairs([(A(3), C(1)), (A(1), C(3)), (B(3), B(1)),
                              (B(4), B(2)), (A(2), C(4)), (A(4), C(2))])


def predicate_nabla_q_zero(b: PointJetBundle) -> Residual:
    _, _, _, A, B, C = _jets(b)
    return predicate_w0(b) | Residual.of_pairs([(2 * B(1), C(4) + C(2)),
                                                (2 * B(2), C(1) + C(3))])


def predicate_w1(b: PointJetBundle) -> Residual:
    a, bb, c, A, B, C = _jets(b)
    return Residual.of_pairs([
        ((a + c) * (B(4) - B(2)), bb * (A(4) - C(2) + C(4) - A(2))),
        ((a + c) * (B(3) - B(1)), bb * (A(3) - C(1) + C(3) - A(1))),
    ])


def predicate_w3bar(b: PointJetBundle) -> Residual:
    a, bb, c, A, B, C = _jets(b)
    return Residual.of_pairs([
        (A(4) - C(2), C(4) - A(2)),
        ((a + c) * (B(4) - B(2)), 2 * bb * (A(4) - C(2))),
        (A(3) - C(1), C(3) - A(1)),
        ((a + c) * (B(3) - B(1)), 2 * bb * (A(3) - C(1))),
    ])


def predicate_w6bar(b: PointJetBundle) -> Residual:
    _, _, _, A, B, C = _jets(b)
    return Residual.of_pairs([
        (A(4) - C(2), A(2) - C(4)), (B(4), B(2)),
        (A(3) - C(1), A(1) - C(3)), (B(3), B(1)),
    ])


def predicate_w2(b: PointJetBundle) -> Residual:
    a, bb, c, A, B, C = _jets(b)
    return Residual.of_pairs([
        ((a + c) * (C(3) - A(1)), 2 * bb * (B(3) - B(1))),
        (C(3) - A(1), A(3) - C(1)),
        ((a + c) * (C(4) - A(2)), 2 * bb * (B(4) - B(2))),
        (C(4) - A(2), A(4) - C(2)),
    ])


def predicate_w1_plus_w2(b: PointJetBundle) -> Residual:
    """Integrability of P: the Nijenhuis tensor vanishes."""
    return Residual.of_arrays(nijenhuis(b))


PREDICATES = {
    "W0": predicate_w0,
    "W3bar": predicate_w3bar,
    "W6bar": predicate_w6bar,
    "W1": predicate_w1,
    "W2": predicate_w2,
    "W1plusW2": predicate_w1_plus_w2,
    "nablaQ0": predicate_nabla_q_zero,
}


# --------------------------------------------------------------------------
# Tensor identities
# --------------------------------------------------------------------------

def cyclic_sum(F: np.ndarray) -> np.ndarray:
    """``out[x, y, z] = F(x, y, Pz) + F(y, z, Px) + F(z, x, Py)``."""
    P = p_matrix()
    return (np.einsum("xya,za->xyz", F, P) + np.einsum("yza,xa->xyz", F, P)
            + np.einsum("zxa,ya->xyz", F, P))


def identity_residuals(spec: MetricSpec | PointJetBundle,
                       p: Sequence[float] | None = None) -> dict[str, Residual]:
    """Residual of each defining identity over all 64 basis triples."""
    b = spec if isinstance(spec, PointJetBundle) else bundle_at(spec, p)
    g = metric_at(b)
    gt = associated_metric_at(b)
    gamma = christoffel_generic(b)
    F = f_oracle(b, christoffel=gamma).F
    th = theta_oracle(F, inverse_numeric(g)).theta
    tht = theta_tilde(th).theta
    fscale = float(np.max(np.abs(F), initial=0.0))

    # F(x,y,z) = 1/4 [g(x,y) th(z) + g(x,z) th(y) - g~(x,y) th~(z) - g~(x,z) th~(y)]
    def sym(h, t):
        return 0.25 * (np.einsum("xy,z->xyz", h, t) + np.einsum("xz,y->xyz", h, t))

    c1 = sym(g, th) - sym(gt, tht)
    c3 = Residual.of_arrays(cyclic_sum(F), scale=fscale)
    theta = Residual.of_arrays(th)
    nabla_q = covariant_derivative_11(q_matrix(), b, christoffel=gamma)
    return {
        "c0": Residual.of_arrays(F),
        "c1": Residual.of_arrays(F, c1),
        "c2": c3 | theta,
        "c3": c3,
        "sub3c1": Residual.of_arrays(F, sym(g + gt, th)) | Residual.of_arrays(tht, -th),
        "sub6c1": Residual.of_arrays(F, sym(g - gt, th)) | Residual.of_arrays(tht, th),
        "nablaQ": Residual.of_arrays(nabla_q, scale=float(np.max(np.abs(gamma.gamma)))),
        "theta": theta,
    }


# --------------------------------------------------------------------------
# Sampling and classification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SamplePlan:
    n: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    box: tuple[tuple[float, float], ...] | None = None
    attempts_per_point: int = 1000

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("sample count must be at least 1")


def sample_points(spec: MetricSpec, plan: SamplePlan) -> list[Point4]:
    """Uniform draws from the box, rejected against the metric's domain."""
    box = plan.box or spec.box
    if box is None:
        raise ValueError("no sampling box given and the metric declares none")
    lo = np.array([r[0] for r in box])
    hi = np.array([r[1] for r in box])
    rng = np.random.default_rng(plan.seed)
    points: list[Point4] = []
    budget = plan.n * plan.attempts_per_point
    while len(points) < plan.n and budget > 0:
        budget -= 1
        cand = tuple(float(v) for v in rng.uniform(lo, hi))
        try:
            ok = satisfies(spec.domain, cand)
        except CirculantError:
            ok = False
        if ok:
            points.append(cand)
    if len(points) < plan.n:
        raise EmptySampleError(
            f"found {len(points)} of {plan.n} admitted points in box {box}")
    return points


@dataclass(frozen=True)
class Tolerances:
    hold: float = HOLD_TOLERANCE
    reject: float = REJECT_MARGIN

    def verdict(self, relatives: Sequence[float]) -> str:
        if all(r <= self.hold for r in relatives):
            return "holds"
        if any(r >= self.reject for r in relatives):
            return "fails"
        return "indeterminate"


@dataclass(frozen=True)
class PointEvaluation:
    p: Point4
    predicates: dict[str, Residual]
    identities: dict[str, Residual]


def evaluate_point(spec: MetricSpec, p: Sequence[float]) -> PointEvaluation:
    b = bundle_at(spec, p)
    return PointEvaluation(b.p, {c: f(b) for c, f in PREDICATES.items()},
                           identity_residuals(b))


@dataclass(frozen=True)
class ClassPredicateResult:
    class_id: str
    residual: Residual
    verdict: str
    identity: Residual
    identity_verdict: str
    # points where the predicate and the identity disagree on holding
    mismatches: int


@dataclass(frozen=True)
class ClassReport:
    results: dict[str, ClassPredicateResult]
    most_specific: str
    identity_checks: dict[str, Residual]
    lattice_consistent: bool
    points: list[Point4] = field(repr=False)
    tolerances: Tolerances = Tolerances()

    @property
    def indeterminate(self) -> list[str]:
        return [c for c, r in self.results.items()
                if "indeterminate" in (r.verdict, r.identity_verdict)]

    @property
    def theta_max(self) -> float:
        return self.identity_checks["theta"].absolute

    def verdict(self, class_id: str) -> str:
        return self.results[class_id].verdict


def meet(holding: Iterable[str]) -> str:
    """Smallest class of the lattice containing every class in ``holding``."""
    parts = None
    for c in holding:
        if c in _PARTS:
            parts = _PARTS[c] if parts is None else parts & _PARTS[c]
    return "none" if parts is None else _LABEL[parts]


def _lattice_consistent(results: dict[str, ClassPredicateResult], most: str) -> bool:
    if results["nablaQ0"].verdict == "holds" and results["W0"].verdict != "holds":
        return False
    if most == "none":
        return all(r.verdict != "holds" for r in results.values())
    need = _PARTS[most]
    return all(results[c].verdict == "holds" for c, parts in _PARTS.items() if parts >= need)


def summarize(evaluations: Sequence[PointEvaluation], tol: Tolerances = Tolerances()) -> ClassReport:
    """Deterministic reduction of per-point evaluations."""
    if not evaluations:
        raise EmptySampleError("no points to classify")
    results = {}
    for c in CLASS_IDS:
        ident = CLASS_IDENTITY[c]
        preds = [e.predicates[c] for e in evaluations]
        idents = [e.identities[ident] for e in evaluations]
        mism = sum((pr.relative <= tol.hold) != (ir.relative <= tol.hold)
                   for pr, ir in zip(preds, idents))
        results[c] = ClassPredicateResult(
            class_id=c,
            residual=_worst(preds),
            verdict=tol.verdict([r.relative for r in preds]),
            identity=_worst(idents),
            identity_verdict=tol.verdict([r.relative for r in idents]),
            mismatches=int(mism),
        )
    most = meet(c for c, r in results.items() if r.verdict == "holds")
    checks = {name: _worst([e.identities[name] for e in evaluations])
              for name in evaluations[0].identities}
    return ClassReport(results, most, checks, _lattice_consistent(results, most),
                       [e.p for e in evaluations], tol)


def _worst(residuals: Iterable[Residual]) -> Residual:
    out = ZERO
    for r in residuals:
        out = out | r
    return out


def classify(spec: MetricSpec, plan: SamplePlan = SamplePlan(),
             tol: Tolerances = Tolerances()) -> ClassReport:
    points = sample_points(spec, plan)
    return summarize([evaluate_point(spec, p) for p in points], tol)
