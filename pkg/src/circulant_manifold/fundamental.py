"""Fundamental tensor F, Lee form theta and the Nijenhuis tensor of P.

``F[i, j, k] = F(e_i, e_j, e_k) = g((nabla_i P) e_j, e_k) = nabla_i g~_jk``.
Closed forms (``f_closed``, ``theta_closed``) use only the jets of A, B, C;
the oracles (``f_oracle``, ``theta_oracle``) go through the connection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .connection import Christoffel, as_bundle, covariant_derivative_02
from .expr import ScalarField, eval_jet
from .manifold import (ASSOCIATED_PATTERN, MetricSpec, PointJetBundle,
                       inverse_data, p_matrix)


@dataclass(frozen=True)
class FTensor:
    F: np.ndarray

    def component(self, i: int, j: int, k: int) -> float:
        """F_ijk with 1-based indices."""
        return float(self.F[i - 1, j - 1, k - 1])


@dataclass(frozen=True)
class ThetaForm:
    theta: np.ndarray

    def component(self, k: int) -> float:
        return float(self.theta[k - 1])


# (F_ijk, F_i'j'k' = -F_ijk, divisor, combination of partials).  Components
# not reached from these by F_ijk = F_ikj vanish.
F_FAMILIES = [
    ("111", "133", 1, "+A3 -C1"),
    ("112", "134", 2, "+A4 -B1 -C2 +B3"),
    ("122", "144", 1, "+B4 -B2"),
    ("114", "123", 2, "+A2 -B1 -C4 +B3"),
    ("211", "233", 1, "+B3 -B1"),
    ("212", "234", 2, "+A3 -B2 -C1 +B4"),
    ("222", "244", 1, "+A4 -C2"),
    ("223", "214", 2, "+A1 +B4 -C3 -B2"),
    ("311", "333", 1, "+C3 -A1"),
    ("334", "312", 2, "+A2 +B1 -C4 -B3"),
    ("322", "344", 1, "+B4 -B2"),
    ("323", "314", 2, "+A4 +B1 -C2 -B3"),
    ("411", "433", 1, "+B3 -B1"),
    ("434", "412", 2, "+A1 +B2 -C3 -B4"),
    ("422", "444", 1, "+C4 -A2"),
    ("414", "423", 2, "+A3 -B4 -C1 +B2"),
]


def _combination(b: PointJetBundle, text: str) -> float:
    total = 0.0
    for term in text.split():
        sign = -1.0 if term[0] == "-" else 1.0
        total += sign * b.d(term[1], int(term[2]))
    return total


def _put(F: np.ndarray, idx: str, value: float) -> None:
    i, j, k = (int(c) - 1 for c in idx)
    F[i, j, k] = F[i, k, j] = value


def f_closed(b: PointJetBundle) -> FTensor:
    F = np.zeros((4, 4, 4))
    for pos, neg, div, comb in F_FAMILIES:
        v = _combination(b, comb) / div
        _put(F, pos, v)
        _put(F, neg, -v)
    return FTensor(F)


def f_oracle(spec: MetricSpec | PointJetBundle, p: Sequence[float] | None = None,
             christoffel: Christoffel | None = None) -> FTensor:
    """F as the covariant derivative of the associated metric."""
    return FTensor(covariant_derivative_02(ASSOCIATED_PATTERN, as_bundle(spec, p),
                                           christoffel=christoffel))


def theta_closed(b: PointJetBundle) -> ThetaForm:
    inv = inverse_data(b)
    Ab, Bb, Cb = inv.Abar, inv.Bbar, inv.Cbar
    A = lambda i: b.d("A", i)
    B = lambda i: b.d("B", i)
    C = lambda i: b.d("C", i)
    theta = np.array([
        Cb * (2 * C(3) - 2 * A(1)) + Bb * (4 * B(3) - 4 * B(1)) + Ab * (2 * A(3) - 2 * C(1)),
        Ab * (2 * A(4) - 2 * C(2)) + Bb * (4 * B(4) - 4 * B(2)) + Cb * (2 * C(4) - 2 * A(2)),
        Cb * (2 * C(1) - 2 * A(3)) + Bb * (4 * B(1) - 4 * B(3)) + Ab * (2 * A(1) - 2 * C(3)),
        Ab * (2 * A(2) - 2 * C(4)) + Bb * (4 * B(2) - 4 * B(4)) + Cb * (2 * C(2) - 2 * A(4)),
    ]) / inv.D
    return ThetaForm(theta)


def theta_oracle(F: FTensor | np.ndarray, ginv: np.ndarray) -> ThetaForm:
    """theta_k = g^ij F_ijk."""
    arr = F.F if isinstance(F, FTensor) else F
    return ThetaForm(np.einsum("ij,ijk->k", ginv, arr))


def theta_tilde(theta: ThetaForm | np.ndarray) -> ThetaForm:
    """theta~_i = P_i^a theta_a, i.e. theta(P e_i)."""
    arr = theta.theta if isinstance(theta, ThetaForm) else np.asarray(theta, dtype=float)
    return ThetaForm(p_matrix() @ arr)


def nijenhuis_tensor(S: np.ndarray, dS: np.ndarray) -> np.ndarray:
    """N_ij^k = S_i^a (d_a S_j^k - d_j S_a^k) - S_j^a (d_a S_i^k - d_i S_a^k).

    ``S[j, k] = S_j^k`` and ``dS[a, j, k] = d_a S_j^k``; returns ``N[i, j, k]``.
    """
    S = np.asarray(S, dtype=float)
    dS = np.asarray(dS, dtype=float)
    half = np.einsum("ia,ajk->ijk", S, dS) - np.einsum("ia,jak->ijk", S, dS)
    return half - half.transpose(1, 0, 2)


def nijenhuis_field(entries, p: Sequence[float]) -> np.ndarray:
    """Nijenhuis tensor of a (1,1) field given entrywise (``entries[j][k]``).

    Entries may be numbers or :class:`ScalarField`; derivatives are exact.
    """
    S = np.zeros((4, 4))
    dS = np.zeros((4, 4, 4))
    for j in range(4):
        for k in range(4):
            e = entries[j][k]
            if isinstance(e, ScalarField):
                jet = eval_jet(e, p)
                S[j, k] = jet.value
                dS[:, j, k] = jet.grad
            else:
                S[j, k] = float(e)
    return nijenhuis_tensor(S, dS)


def nijenhuis(spec: MetricSpec | PointJetBundle | None = None,
              p: Sequence[float] | None = None,
              S: np.ndarray | None = None) -> np.ndarray:
    """Nijenhuis tensor of a constant structure (default P) at a point.

    The metric does not enter; the arguments mirror the other tensors.
    """
    S = p_matrix() if S is None else S
    return nijenhuis_tensor(S, np.zeros((4, 4, 4)))
