"""Levi-Civita connection of the circulant metric.

``christoffel_generic`` is the reference computation (numeric inverse and
the textbook first-derivative formula).  ``christoffel_closed`` evaluates
the seven closed-form families written in terms of A, B, C, their partials
and the inverse coefficients; it exists to be checked against the generic
route.

Array layouts: ``gamma[k, i, j] = Gamma^k_ij``; for a (0,2) field ``h``,
``nabla[i, j, k] = nabla_i h_jk``; for a (1,1) field ``S``,
``nabla[i, j, k] = (nabla_i S)_j^k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .manifold import (METRIC_PATTERN, MetricSpec, PointJetBundle, bundle_at,
                       circulant, inverse_data, metric_at)

# Coordinates of equal parity are paired: 1 <-> 3, 2 <-> 4.
PARTNER = {1: 3, 3: 1, 2: 4, 4: 2}


def _opposite(i: int) -> tuple[int, int]:
    return (2, 4) if i % 2 else (1, 3)


def as_bundle(obj: MetricSpec | PointJetBundle, p: Sequence[float] | None = None) -> PointJetBundle:
    """Accept either a ready bundle or a ``(spec, point)`` pair."""
    if isinstance(obj, PointJetBundle):
        return obj
    if p is None:
        raise TypeError("a point is required together with a MetricSpec")
    return bundle_at(obj, p)


@dataclass(frozen=True)
class Christoffel:
    gamma: np.ndarray

    def symbol(self, k: int, i: int, j: int) -> float:
        """Gamma^k_ij with 1-based indices."""
        return float(self.gamma[k - 1, i - 1, j - 1])


def field_partials(b: PointJetBundle, pattern: np.ndarray = METRIC_PATTERN) -> np.ndarray:
    """``out[i, j, k] = d_i h_jk`` for a field circulant in (A, B, C)."""
    return np.moveaxis(b.partials[pattern], -1, 0)


def metric_partials(spec: MetricSpec | PointJetBundle, p: Sequence[float] | None = None) -> np.ndarray:
    return field_partials(as_bundle(spec, p))


def christoffel_generic(spec: MetricSpec | PointJetBundle,
                        p: Sequence[float] | None = None) -> Christoffel:
    """2 Gamma^k_ij = g^ka (d_i g_aj + d_j g_ai - d_a g_ij)."""
    b = as_bundle(spec, p)
    g = metric_at(b)
    dg = metric_partials(b)
    first = 0.5 * (np.einsum("iaj->aij", dg) + np.einsum("jai->aij", dg) - dg)
    gamma = np.linalg.solve(g, first.reshape(4, 16)).reshape(4, 4, 4)
    return Christoffel(gamma)


class _Closed:
    """The closed-form families.  Each method returns 2D * Gamma.

    Index roles: ``k`` is the partner of ``i`` (same parity), ``j`` and ``s``
    are the two indices of the other parity.  Whenever ``j`` names an index
    of the symbol, ``s`` is the remaining one.
    """

    def __init__(self, b: PointJetBundle):
        a, bb, c = b.values
        self.bbar = bb * (c - a)
        self.b2 = 2.0 * bb * bb
        self.aa = a * (a + c)
        self.ca = c * (a + c)
        self.A = lambda i: b.d("A", i)
        self.B = lambda i: b.d("B", i)
        self.C = lambda i: b.d("C", i)

    def ii_i(self, i, j, k, s):
        A, B, C = self.A, self.B, self.C
        return (self.bbar * (4 * B(i) - A(j) - A(s)) + self.b2 * (2 * C(i) - A(i) - A(k))
                + self.aa * A(i) - self.ca * (2 * C(i) - A(k)))

    def ii_j(self, i, j, k, s):
        A, B, C = self.A, self.B, self.C
        return (self.bbar * (A(i) + 2 * C(i) - A(k)) + self.b2 * (A(j) - A(s))
                + self.aa * (2 * B(i) - A(j)) - self.ca * (2 * B(i) - A(s)))

    def ii_k(self, i, j, k, s):
        A, B, C = self.A, self.B, self.C
        return (self.bbar * (4 * B(i) - A(j) - A(s)) + self.b2 * (A(i) + A(k) - 2 * C(i))
                + self.aa * (2 * C(i) - A(k)) - self.ca * A(i))

    def ij_i(self, i, j, k, s):
        A, B, C = self.A, self.B, self.C
        return (self.bbar * (A(i) + C(i) + B(j) - B(s)) + self.b2 * (B(i) + C(j) - B(k) - A(j))
                + self.aa * A(j) - self.ca * (B(i) + C(j) - B(k)))

    def ij_k(self, i, j, k, s):
        A, B, C = self.A, self.B, self.C
        return (self.bbar * (A(i) + C(i) + B(j) - B(s)) + self.b2 * (B(k) - C(j) - B(i) + A(j))
                + self.aa * (B(i) + C(j) - B(k)) - self.ca * A(j))

    def ik_j(self, i, j, k, s):
        A, B, C = self.A, self.B, self.C
        return (self.bbar * (A(i) + A(k)) + self.b2 * (C(j) - C(s))
                + self.aa * (B(i) + B(k) - C(j)) - self.ca * (B(i) + B(k) - C(s)))

    def ik_i(self, i, j, k, s):
        A, B, C = self.A, self.B, self.C
        return (self.bbar * (2 * B(i) + 2 * B(k) - C(j) - C(s)) + self.b2 * (A(i) - A(k))
                + self.aa * A(k) - self.ca * A(i))


def _closed_symbol(fam: _Closed, up: int, lo1: int, lo2: int) -> float:
    """2D * Gamma^up_{lo1 lo2}, dispatched to the family matching the indices."""
    if lo1 == lo2:
        i = lo1
        k = PARTNER[i]
        if up == i:
            j, s = _opposite(i)
            return fam.ii_i(i, j, k, s)
        if up == k:
            j, s = _opposite(i)
            return fam.ii_k(i, j, k, s)
        j = up
        s = PARTNER[j]
        return fam.ii_j(i, j, k, s)
    if PARTNER[lo1] == lo2:
        if up in (lo1, lo2):
            # Gamma^i_ik, with Gamma^k_ik = Gamma^k_ki read off the same family
            i = up
            k = PARTNER[i]
            j, s = _opposite(i)
            return fam.ik_i(i, j, k, s)
        i, k, j = lo1, lo2, up
        return fam.ik_j(i, j, k, s=PARTNER[j])
    # indices of opposite parity; order so that the upper index is i or k
    i, j = (lo1, lo2) if up in (lo1, PARTNER[lo1]) else (lo2, lo1)
    k, s = PARTNER[i], PARTNER[j]
    return fam.ij_i(i, j, k, s) if up == i else fam.ij_k(i, j, k, s)


def christoffel_closed(spec: MetricSpec | PointJetBundle,
                       p: Sequence[float] | None = None) -> Christoffel:
    b = as_bundle(spec, p)
    fam = _Closed(b)
    two_d = 2.0 * inverse_data(b).D
    gamma = np.empty((4, 4, 4))
    for up in range(1, 5):
        for lo1 in range(1, 5):
            for lo2 in range(lo1, 5):
                v = _closed_symbol(fam, up, lo1, lo2) / two_d
                gamma[up - 1, lo1 - 1, lo2 - 1] = gamma[up - 1, lo2 - 1, lo1 - 1] = v
    return Christoffel(gamma)


def covariant_derivative_02(pattern: np.ndarray, spec: MetricSpec | PointJetBundle,
                            p: Sequence[float] | None = None,
                            christoffel: Christoffel | None = None) -> np.ndarray:
    """nabla_i h_jk = d_i h_jk - Gamma^a_ij h_ak - Gamma^a_ik h_aj.

    ``h`` is the field whose entries are (A, B, C)[pattern]; the metric and
    the associated metric are both of this form.
    """
    b = as_bundle(spec, p)
    gamma = (christoffel or christoffel_generic(b)).gamma
    h = circulant(b.values, pattern)
    dh = field_partials(b, pattern)
    return dh - np.einsum("aij,ak->ijk", gamma, h) - np.einsum("aik,aj->ijk", gamma, h)


def covariant_derivative_11(S: np.ndarray, spec: MetricSpec | PointJetBundle,
                            p: Sequence[float] | None = None,
                            christoffel: Christoffel | None = None,
                            dS: np.ndarray | None = None) -> np.ndarray:
    """(nabla_i S)_j^k = d_i S_j^k + Gamma^k_ia S_j^a - Gamma^a_ij S_a^k.

    ``dS[i, j, k] = d_i S_j^k`` defaults to zero (constant components).
    """
    b = as_bundle(spec, p)
    gamma = (christoffel or christoffel_generic(b)).gamma
    S = np.asarray(S, dtype=float)
    out = np.einsum("kia,ja->ijk", gamma, S) - np.einsum("aij,ak->ijk", gamma, S)
    if dS is not None:
        out = out + dS
    return out
