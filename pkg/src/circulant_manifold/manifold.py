"""Structure tensors and pointwise metric objects.

All matrices are 4x4 numpy arrays.  A (1,1)-tensor ``S`` is stored with
``S[j, k] = S_j^k`` so that ``S e_j = S_j^k e_k`` (row ``j`` lists the image
of ``e_j``).  Indices are 1-based in text and reports, 0-based in arrays.

Metric description files (``.mspec``) are line oriented::

    # W0 example
    name: w0
    const a = 3
    A = x1^2 + x2^2 + x3^2 + x4^2
    B = x1 + x2 + x3 + x4
    C = 2*x1*x3 + 2*x2*x4
    domain: x1 > 1
    domain: 0 < x1 - x2 < ln(2)
    box: 1.1:5 1.1:5 1.1:5 1.1:5

``const`` values may be constant expressions over earlier constants.
``box`` gives the default sampling box, one ``lo:hi`` per coordinate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import CirculantError, DomainViolation, MetricFileError
from .expr import (ConstraintSet, Point4, ScalarField, as_point, eval_expr,
                   eval_jet, is_constant, parse, parse_constraints)
from .jets import Jet

COEFFICIENTS = ("A", "B", "C")

# g_ij = (A, B, C)[METRIC_PATTERN[i, j]]
METRIC_PATTERN = np.array([[0, 1, 2, 1],
                           [1, 0, 1, 2],
                           [2, 1, 0, 1],
                           [1, 2, 1, 0]])


def q_matrix() -> np.ndarray:
    """Cyclic shift: Q e_1 = e_2, Q e_2 = e_3, Q e_3 = e_4, Q e_4 = e_1."""
    q = np.zeros((4, 4))
    for j in range(4):
        q[j, (j + 1) % 4] = 1.0
    return q


def p_matrix() -> np.ndarray:
    """The almost product structure P = Q^2 (swaps e_1 <-> e_3, e_2 <-> e_4)."""
    q = q_matrix()
    return q @ q


# g~_ij = g_ia P_j^a, again circulant in (A, B, C)
ASSOCIATED_PATTERN = METRIC_PATTERN[:, np.argmax(p_matrix(), axis=1)]


# --------------------------------------------------------------------------
# Metric definitions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricSpec:
    """Coefficients A, B, C of the circulant metric, plus domain restrictions."""

    A: ScalarField
    B: ScalarField
    C: ScalarField
    constants: Mapping[str, float] = field(default_factory=dict)
    domain: ConstraintSet = field(default_factory=ConstraintSet)
    name: str = ""
    box: tuple[tuple[float, float], ...] | None = None
    source: str = field(default="", compare=False, repr=False)

    def coefficient(self, letter: str) -> ScalarField:
        return {"A": self.A, "B": self.B, "C": self.C}[letter]

    def with_constants(self, overrides: Mapping[str, float]) -> "MetricSpec":
        """Re-read the source with some constants replaced."""
        if not self.source:
            raise MetricFileError("metric has no source text to re-parse")
        return parse_metric(self.source, name=self.name, constants=overrides)


_CONST = re.compile(r"const\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.+)\Z")
_COEF = re.compile(r"([ABC])\s*=\s*(.+)\Z")
_KEYED = re.compile(r"(domain|box|name)\s*:\s*(.*)\Z")


def parse_box(text: str | Sequence[str]) -> tuple[tuple[float, float], ...]:
    """``"lo:hi"`` (all coordinates) or four ``lo:hi`` items."""
    items = text.split() if isinstance(text, str) else list(text)
    if len(items) == 1:
        items = items * 4
    if len(items) != 4:
        raise ValueError(f"box needs 1 or 4 lo:hi ranges, got {len(items)}")
    box = []
    for item in items:
        try:
            lo, hi = (float(v) for v in item.split(":"))
        except ValueError:
            raise ValueError(f"bad box range {item!r}, expected lo:hi") from None
        if not lo < hi:
            raise ValueError(f"empty box range {item!r}")
        box.append((lo, hi))
    return tuple(box)


def parse_metric(text: str, name: str = "",
                 constants: Mapping[str, float] | None = None) -> MetricSpec:
    """Build a :class:`MetricSpec` from ``.mspec`` text.

    ``constants`` override values declared with ``const`` lines; naming a
    constant the file never declares is an error.
    """
    overrides = dict(constants or {})
    consts: dict[str, float] = {}
    coeffs: dict[str, str] = {}
    domain_lines: list[tuple[int, str]] = []
    box = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if m := _CONST.match(line):
                cname, value = m.groups()
                if cname in overrides:
                    consts[cname] = float(overrides[cname])
                else:
                    f = parse(value, consts)
                    if not is_constant(f.ast):
                        raise MetricFileError(f"constant {cname!r} depends on coordinates")
                    consts[cname] = eval_expr(f, (0.0, 0.0, 0.0, 0.0))
            elif m := _COEF.match(line):
                letter, expr_text = m.groups()
                if letter in coeffs:
                    raise MetricFileError(f"coefficient {letter} defined twice")
                coeffs[letter] = expr_text
            elif m := _KEYED.match(line):
                key, value = m.groups()
                if key == "domain":
                    domain_lines.append((lineno, value))
                elif key == "box":
                    box = parse_box(value)
                elif not name:
                    name = value.strip()
            else:
                raise MetricFileError("unrecognised line")
        except (CirculantError, ValueError) as exc:
            raise MetricFileError(f"line {lineno}: {exc}") from exc
    unknown = set(overrides) - set(consts)
    if unknown:
        raise MetricFileError(f"unknown constant(s): {', '.join(sorted(unknown))}")
    missing = [c for c in COEFFICIENTS if c not in coeffs]
    if missing:
        raise MetricFileError(f"missing coefficient(s): {', '.join(missing)}")
    try:
        fields = {c: parse(coeffs[c], consts) for c in COEFFICIENTS}
    except CirculantError as exc:
        raise MetricFileError(str(exc)) from exc
    domain = ConstraintSet()
    for lineno, value in domain_lines:
        try:
            domain = domain + parse_constraints(value, consts)
        except CirculantError as exc:
            raise MetricFileError(f"line {lineno}: {exc}") from exc
    return MetricSpec(fields["A"], fields["B"], fields["C"], consts, domain,
                      name=name, box=box, source=text)


def load_metric(path: str | Path, constants: Mapping[str, float] | None = None) -> MetricSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MetricFileError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_metric(text, name=path.stem, constants=constants)


# --------------------------------------------------------------------------
# Pointwise data
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PointJetBundle:
    """Values and first partials of A, B, C at one point.

    Construction enforces A > C > B > 0, the positivity assumption on the
    circulant metric.
    """

    p: Point4
    A: Jet
    B: Jet
    C: Jet

    def __post_init__(self):
        a, b, c = self.A.value, self.B.value, self.C.value
        for ok, text in ((a > c, "A > C"), (c > b, "C > B"), (b > 0, "B > 0")):
            if not ok:
                raise DomainViolation(
                    f"{text} violated at {self.p} (A={a!r}, B={b!r}, C={c!r})")

    @classmethod
    def from_arrays(cls, values: Sequence[float], partials: np.ndarray,
                    p: Sequence[float] = (0.0, 0.0, 0.0, 0.0)) -> "PointJetBundle":
        """Bundle from raw numbers; ``partials[c, i]`` is d(coef c)/dx_{i+1}."""
        partials = np.asarray(partials, dtype=float)
        jets = [Jet(float(values[c]), tuple(float(v) for v in partials[c])) for c in range(3)]
        return cls(as_point(p), *jets)

    @property
    def values(self) -> np.ndarray:
        return np.array([self.A.value, self.B.value, self.C.value])

    @property
    def partials(self) -> np.ndarray:
        """``partials[c, i]`` = d(A, B, C)[c] / dx^{i+1}."""
        return np.array([self.A.grad, self.B.grad, self.C.grad])

    def d(self, letter: str, i: int) -> float:
        """Partial of coefficient ``letter`` along x^i (1-based)."""
        return getattr(self, letter).partial(i)


def bundle_at(spec: MetricSpec, p: Sequence[float]) -> PointJetBundle:
    """Jets of A, B, C at ``p`` after checking the domain and A > C > B > 0."""
    pt = as_point(p)
    bad = spec.domain.violated(pt)
    if bad:
        names = "; ".join(str(c) for c in bad)
        raise DomainViolation(f"point {pt} outside domain: {names} violated")
    return PointJetBundle(pt, eval_jet(spec.A, pt), eval_jet(spec.B, pt), eval_jet(spec.C, pt))


def circulant(values: Sequence[float], pattern: np.ndarray = METRIC_PATTERN) -> np.ndarray:
    return np.asarray(values, dtype=float)[pattern]


def metric_at(b: PointJetBundle) -> np.ndarray:
    return circulant(b.values)


def associated_metric_at(b: PointJetBundle) -> np.ndarray:
    """g~(x, y) = g(x, Py)."""
    return circulant(b.values, ASSOCIATED_PATTERN)


@dataclass(frozen=True)
class InverseData:
    Abar: float
    Bbar: float
    Cbar: float
    D: float


def inverse_data(b: PointJetBundle) -> InverseData:
    a, bb, c = b.values
    return InverseData(
        Abar=a * (a + c) - 2 * bb * bb,
        Bbar=bb * (c - a),
        Cbar=2 * bb * bb - c * (a + c),
        D=(a - c) * ((a + c) ** 2 - 4 * bb * bb),
    )


def inverse_closed(b: PointJetBundle) -> tuple[np.ndarray, InverseData]:
    """Closed-form inverse metric: circulant in (Abar, Bbar, Cbar) / D."""
    data = inverse_data(b)
    if data.D == 0.0:
        raise DomainViolation(f"singular metric at {b.p}: D = 0")
    return circulant((data.Abar, data.Bbar, data.Cbar)) / data.D, data


def inverse_numeric(g: np.ndarray) -> np.ndarray:
    """LU (Gaussian elimination with partial pivoting) inverse."""
    return np.linalg.inv(g)


def relative_deviation(x, y) -> float:
    """max|x - y| / (1 + max(|x|, |y|)), the comparison used throughout."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    scale = max(np.max(np.abs(x), initial=0.0), np.max(np.abs(y), initial=0.0))
    return float(np.max(np.abs(x - y), initial=0.0) / (1.0 + scale))
